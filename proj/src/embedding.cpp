#include "chessvec/embedding.hpp"

#include <atomic>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace chessvec {

// ---------------------------------------------------------------------------
// Vocabulary

void Vocabulary::reindex() {
  index_.clear();
  index_.reserve(entries_.size());
  total_ = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    index_.emplace(entries_[i].token, i);
    total_ += entries_[i].count;
  }
}

Vocabulary Vocabulary::from_counts(const std::unordered_map<std::string, std::uint64_t>& counts,
                                   std::uint64_t min_count) {
  Vocabulary v;
  for (const auto& [token, count] : counts)
    if (count >= min_count) v.entries_.push_back({token, count});
  std::sort(v.entries_.begin(), v.entries_.end(), [](const Entry& a, const Entry& b) {
    return a.count != b.count ? a.count > b.count : a.token < b.token;
  });
  v.reindex();
  return v;
}

Vocabulary Vocabulary::from_entries(std::vector<Entry> entries) {
  Vocabulary v;
  v.entries_ = std::move(entries);
  v.reindex();
  return v;
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

template <typename Fn>
void for_each_token(std::string_view line, Fn&& fn) {
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fn(line.substr(start, i - start));
  }
}

}  // namespace

Vocabulary build_vocab(std::istream& corpus, std::uint64_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (std::string line; std::getline(corpus, line);)
    for_each_token(line, [&](std::string_view t) { ++counts[std::string(t)]; });
  Vocabulary v = Vocabulary::from_counts(counts, min_count);
  if (v.empty()) throw EmptyVocabulary("no token reaches min_count " + std::to_string(min_count));
  return v;
}

std::pair<Vocabulary, EncodedCorpus> load_corpus(std::istream& corpus, std::uint64_t min_count) {
  std::unordered_map<std::string, std::int32_t> raw_index;
  std::vector<std::uint64_t> raw_counts;
  std::vector<std::string> raw_tokens;
  EncodedCorpus raw;
  raw.offsets.push_back(0);
  for (std::string line; std::getline(corpus, line);) {
    const std::size_t before = raw.ids.size();
    for_each_token(line, [&](std::string_view t) {
      auto [it, inserted] = raw_index.try_emplace(std::string(t), static_cast<std::int32_t>(raw_tokens.size()));
      if (inserted) {
        raw_tokens.emplace_back(t);
        raw_counts.push_back(0);
      }
      ++raw_counts[static_cast<std::size_t>(it->second)];
      raw.ids.push_back(it->second);
    });
    if (raw.ids.size() > before) raw.offsets.push_back(raw.ids.size());
  }

  std::unordered_map<std::string, std::uint64_t> counts;
  counts.reserve(raw_tokens.size());
  for (std::size_t i = 0; i < raw_tokens.size(); ++i) counts.emplace(raw_tokens[i], raw_counts[i]);
  Vocabulary vocab = Vocabulary::from_counts(counts, min_count);
  if (vocab.empty()) throw EmptyVocabulary("no token reaches min_count " + std::to_string(min_count));

  std::vector<std::int32_t> remap(raw_tokens.size(), -1);
  for (std::size_t i = 0; i < raw_tokens.size(); ++i)
    if (auto idx = vocab.index_of(raw_tokens[i])) remap[i] = static_cast<std::int32_t>(*idx);

  EncodedCorpus out;
  out.offsets.push_back(0);
  out.ids.reserve(raw.ids.size());
  for (std::size_t s = 0; s + 1 < raw.offsets.size(); ++s) {
    const std::size_t before = out.ids.size();
    for (std::size_t k = raw.offsets[s]; k < raw.offsets[s + 1]; ++k)
      if (remap[static_cast<std::size_t>(raw.ids[k])] >= 0) out.ids.push_back(remap[static_cast<std::size_t>(raw.ids[k])]);
    if (out.ids.size() > before) out.offsets.push_back(out.ids.size());
  }
  return {std::move(vocab), std::move(out)};
}

// ---------------------------------------------------------------------------
// Negative sampling

NegativeSampler::NegativeSampler(const Vocabulary& vocab, double power) {
  cumulative_.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    total_ += std::pow(static_cast<double>(vocab.count(i)), power);
    cumulative_.push_back(total_);
  }
}

double NegativeSampler::probability(std::size_t i) const {
  const double lo = i == 0 ? 0.0 : cumulative_[i - 1];
  return (cumulative_[i] - lo) / total_;
}

// ---------------------------------------------------------------------------
// Training

void Hyperparams::validate() const {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (negatives < 1) throw std::invalid_argument("negatives must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(initial_lr >= 0)) throw std::invalid_argument("initial_lr must be >= 0");
  if (subsample_t < 0) throw std::invalid_argument("subsample_t must be >= 0");
}

Hyperparams defaults_for(SentenceType type) {
  Hyperparams h;
  switch (type) {
    case SentenceType::Type1:
      h.window = 5;
      h.dynamic_window = true;
      break;
    case SentenceType::Type2:
      h.window = 32;
      h.dynamic_window = false;
      break;
    case SentenceType::Pro:
      h.window = 40;
      h.dynamic_window = false;
      break;
  }
  return h;
}

namespace {

using FloatVec = Eigen::Map<Eigen::VectorXf>;

// In-place update for one (center, context) pair against shared matrices.
// Output rows move with the pre-update center vector, so with distinct
// targets this is exactly sgns_update().
double train_pair(float* in_base, float* out_base, int dim, std::int32_t center, std::int32_t context,
                  const std::int32_t* negatives, int k, float lr, Eigen::VectorXf& neu1e) {
  FloatVec v(in_base + static_cast<std::ptrdiff_t>(center) * dim, dim);
  neu1e.setZero();
  double loss = 0;
  auto visit = [&](std::int32_t target, bool positive) {
    FloatVec u(out_base + static_cast<std::ptrdiff_t>(target) * dim, dim);
    const float s = u.dot(v);
    float g;
    if (positive) {
      g = 1.0f - sigmoid<float>(s);
      loss -= log_sigmoid<double>(s);
    } else {
      g = -sigmoid<float>(s);
      loss -= log_sigmoid<double>(-s);
    }
    g *= lr;
    neu1e.noalias() += g * u;
    u.noalias() += g * v;
  };
  visit(context, true);
  for (int n = 0; n < k; ++n)
    if (negatives[n] != context) visit(negatives[n], false);
  v += neu1e;
  return loss;
}

bool all_finite(const RowMatrix<float>& m) { return m.allFinite(); }

struct EpochTally {
  double loss = 0;
  std::uint64_t pairs = 0;
};

struct Shared {
  const Vocabulary& vocab;
  const EncodedCorpus& corpus;
  const Hyperparams& params;
  const NegativeSampler& sampler;
  RowMatrix<float>& input;
  RowMatrix<float>& output;
  std::atomic<std::uint64_t>& processed;
  std::uint64_t total_tokens;
};

void run_shard(Shared& sh, std::size_t first, std::size_t last, std::mt19937_64& rng, EpochTally& tally) {
  const Hyperparams& hp = sh.params;
  const int dim = hp.dim;
  std::vector<std::int32_t> kept;
  std::vector<std::int32_t> negs(static_cast<std::size_t>(hp.negatives));
  Eigen::VectorXf neu1e(dim);
  std::uniform_int_distribution<int> radius_dist(1, hp.window);
  std::uint64_t since_check = 0;

  for (std::size_t s = first; s < last; ++s) {
    const std::int32_t* b = sh.corpus.ids.data() + sh.corpus.offsets[s];
    const std::int32_t* e = sh.corpus.ids.data() + sh.corpus.offsets[s + 1];
    subsample_sentence(b, e, sh.vocab, hp.subsample_t, rng, kept);
    const std::uint64_t done_before = sh.processed.fetch_add(static_cast<std::uint64_t>(e - b), std::memory_order_relaxed);
    const int n = static_cast<int>(kept.size());
    for (int i = 0; i < n; ++i) {
      const double progress = static_cast<double>(done_before + static_cast<std::uint64_t>(i)) /
                              static_cast<double>(sh.total_tokens + 1);
      const float lr = static_cast<float>(hp.initial_lr * std::max(1.0 - progress, hp.min_lr_ratio));
      const int radius = hp.dynamic_window ? radius_dist(rng) : hp.window;
      const int lo = std::max(0, i - radius), hi = std::min(n - 1, i + radius);
      for (int j = lo; j <= hi; ++j) {
        if (j == i) continue;
        for (auto& x : negs) x = static_cast<std::int32_t>(sh.sampler.sample(rng));
        const double loss = train_pair(sh.input.data(), sh.output.data(), dim, kept[static_cast<std::size_t>(i)],
                                       kept[static_cast<std::size_t>(j)], negs.data(), hp.negatives, lr, neu1e);
        if (!std::isfinite(loss))
          throw NonFiniteLoss("non-finite loss at sentence " + std::to_string(s) + ", position " + std::to_string(i) +
                              ", lr " + std::to_string(lr));
        tally.loss += loss;
        ++tally.pairs;
        if (++since_check >= 1000000) {
          since_check = 0;
          if (!all_finite(sh.input) || !all_finite(sh.output))
            throw NonFiniteLoss("non-finite weights after " + std::to_string(tally.pairs) + " updates");
        }
      }
    }
  }
}

}  // namespace

EmbeddingModel train(const Vocabulary& vocab, const EncodedCorpus& corpus, const Hyperparams& params) {
  params.validate();
  if (vocab.empty()) throw EmptyVocabulary("empty vocabulary");
  EmbeddingModel model;
  model.vocab = vocab;
  model.params = params;
  const auto V = static_cast<Eigen::Index>(vocab.size());
  const int dim = params.dim;

  std::mt19937_64 rng(params.seed);
  model.input.resize(V, dim);
  std::uniform_real_distribution<float> init(-0.5f / static_cast<float>(dim), 0.5f / static_cast<float>(dim));
  for (Eigen::Index r = 0; r < V; ++r)
    for (int c = 0; c < dim; ++c) model.input(r, c) = init(rng);
  model.output = RowMatrix<float>::Zero(V, dim);

  const NegativeSampler sampler(vocab);
  std::atomic<std::uint64_t> processed{0};
  const std::uint64_t total_tokens = static_cast<std::uint64_t>(corpus.ids.size()) * static_cast<std::uint64_t>(params.epochs);
  Shared shared{vocab, corpus, params, sampler, model.input, model.output, processed, total_tokens};

  const int workers = params.mode == TrainMode::Deterministic ? 1 : std::max(1, params.jobs);
  std::vector<std::mt19937_64> rngs;
  rngs.push_back(rng);
  for (int w = 1; w < workers; ++w) rngs.emplace_back(params.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(w));

  const std::size_t S = corpus.sentences();
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::vector<EpochTally> tallies(static_cast<std::size_t>(workers));
    if (workers == 1) {
      run_shard(shared, 0, S, rngs[0], tallies[0]);
    } else {
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
      {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
          const std::size_t first = S * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers);
          const std::size_t last = S * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(workers);
          pool.emplace_back([&, w, first, last] {
            try {
              run_shard(shared, first, last, rngs[static_cast<std::size_t>(w)], tallies[static_cast<std::size_t>(w)]);
            } catch (...) {
              errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
    EpochTally sum;
    for (const auto& t : tallies) {
      sum.loss += t.loss;
      sum.pairs += t.pairs;
    }
    model.epoch_loss.push_back(sum.pairs ? sum.loss / static_cast<double>(sum.pairs) : 0.0);
  }
  if (!all_finite(model.input) || !all_finite(model.output)) throw NonFiniteLoss("training produced non-finite weights");
  return model;
}

EmbeddingModel train(std::istream& corpus, const Hyperparams& params) {
  params.validate();
  auto [vocab, encoded] = load_corpus(corpus, params.min_count);
  return train(vocab, encoded, params);
}

// ---------------------------------------------------------------------------
// Model files

namespace {

void put_float(std::string& out, float x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, end);
}

void put_row(std::string& out, const RowMatrix<float>& m, Eigen::Index r) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out += ' ';
    put_float(out, m(r, c));
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  return s;
}

// Parses "token f1 f2 ..." into matrix row r.
std::string parse_row(std::string_view line, RowMatrix<float>& m, Eigen::Index r, std::size_t lineno) {
  auto sp = line.find(' ');
  if (sp == std::string_view::npos || sp == 0) throw FormatError(lineno, "expected token followed by values");
  std::string token(line.substr(0, sp));
  const char* p = line.data() + sp;
  const char* end = line.data() + line.size();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    while (p < end && *p == ' ') ++p;
    if (p >= end) throw FormatError(lineno, "expected " + std::to_string(m.cols()) + " values, got " + std::to_string(c));
    float x = 0;
    auto [next, ec] = std::from_chars(p, end, x);
    if (ec != std::errc()) throw FormatError(lineno, "bad number");
    m(r, c) = x;
    p = next;
  }
  while (p < end && *p == ' ') ++p;
  if (p != end) throw FormatError(lineno, "more than " + std::to_string(m.cols()) + " values");
  return token;
}

}  // namespace

void save_model(const EmbeddingModel& model, std::ostream& out) {
  const auto V = static_cast<Eigen::Index>(model.vocab.size());
  std::string buf;
  buf += std::to_string(V) + " " + std::to_string(model.input.cols()) + "\n";
  for (Eigen::Index r = 0; r < V; ++r) {
    buf += model.vocab.token(static_cast<std::size_t>(r));
    put_row(buf, model.input, r);
    buf += '\n';
    if (buf.size() > (1u << 20)) {
      out << buf;
      buf.clear();
    }
  }
  const Hyperparams& h = model.params;
  std::ostringstream meta;
  meta.precision(17);
  meta << "#\n"
       << "dim=" << h.dim << "\n"
       << "window=" << h.window << "\n"
       << "dynamic_window=" << (h.dynamic_window ? 1 : 0) << "\n"
       << "negatives=" << h.negatives << "\n"
       << "epochs=" << h.epochs << "\n"
       << "initial_lr=" << h.initial_lr << "\n"
       << "min_lr_ratio=" << h.min_lr_ratio << "\n"
       << "min_count=" << h.min_count << "\n"
       << "subsample_t=" << h.subsample_t << "\n"
       << "seed=" << h.seed << "\n"
       << "mode=" << (h.mode == TrainMode::Deterministic ? "deterministic" : "parallel") << "\n"
       << "jobs=" << h.jobs << "\n";
  meta << "epoch_loss=";
  for (std::size_t i = 0; i < model.epoch_loss.size(); ++i) meta << (i ? " " : "") << model.epoch_loss[i];
  meta << "\ncounts=";
  for (std::size_t i = 0; i < model.vocab.size(); ++i) meta << (i ? " " : "") << model.vocab.count(i);
  meta << "\n";
  buf += meta.str();
  if (model.output.rows() == V) {
    for (Eigen::Index r = 0; r < V; ++r) {
      buf += "output=";
      buf += model.vocab.token(static_cast<std::size_t>(r));
      put_row(buf, model.output, r);
      buf += '\n';
      if (buf.size() > (1u << 20)) {
        out << buf;
        buf.clear();
      }
    }
  }
  out << buf;
  if (!out) throw std::runtime_error("failed writing model");
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_model(model, out);
}

EmbeddingModel load_model(std::istream& in) {
  EmbeddingModel model;
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw FormatError(1, "empty model file");
  long long V = -1, dim = -1;
  {
    std::istringstream hdr{std::string(trim(line))};
    std::string extra;
    if (!(hdr >> V >> dim) || (hdr >> extra) || V < 0 || dim < 1) throw FormatError(1, "header must be 'V dim'");
  }
  model.input.resize(V, dim);
  std::vector<Vocabulary::Entry> entries;
  entries.reserve(static_cast<std::size_t>(V));
  for (long long r = 0; r < V; ++r) {
    ++lineno;
    if (!std::getline(in, line)) throw FormatError(lineno, "expected " + std::to_string(V) + " vector lines, got " + std::to_string(r));
    std::string_view l = trim(line);
    if (l == "#") throw FormatError(lineno, "expected " + std::to_string(V) + " vector lines, got " + std::to_string(r));
    entries.push_back({parse_row(l, model.input, r, lineno), 0});
  }

  std::vector<std::pair<std::string, std::string>> kv;
  std::vector<std::pair<std::string, std::size_t>> output_lines;
  bool in_meta = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view l = trim(line);
    if (l.empty()) continue;
    if (!in_meta) {
      if (l != "#") throw FormatError(lineno, "unexpected content after " + std::to_string(V) + " vectors");
      in_meta = true;
      continue;
    }
    auto eq = l.find('=');
    if (eq == std::string_view::npos) throw FormatError(lineno, "expected key=value");
    if (l.substr(0, eq) == "output") {
      output_lines.emplace_back(std::string(l.substr(eq + 1)), lineno);
    } else {
      kv.emplace_back(std::string(l.substr(0, eq)), std::string(l.substr(eq + 1)));
    }
  }

  Hyperparams& h = model.params;
  h.dim = static_cast<int>(dim);
  for (const auto& [k, v] : kv) {
    std::istringstream vs(v);
    if (k == "window") vs >> h.window;
    else if (k == "dynamic_window") { int x = 1; vs >> x; h.dynamic_window = x != 0; }
    else if (k == "negatives") vs >> h.negatives;
    else if (k == "epochs") vs >> h.epochs;
    else if (k == "initial_lr") vs >> h.initial_lr;
    else if (k == "min_lr_ratio") vs >> h.min_lr_ratio;
    else if (k == "min_count") vs >> h.min_count;
    else if (k == "subsample_t") vs >> h.subsample_t;
    else if (k == "seed") vs >> h.seed;
    else if (k == "mode") h.mode = v == "parallel" ? TrainMode::Parallel : TrainMode::Deterministic;
    else if (k == "jobs") vs >> h.jobs;
    else if (k == "epoch_loss") { for (double x; vs >> x;) model.epoch_loss.push_back(x); }
    else if (k == "counts") {
      std::size_t i = 0;
      for (std::uint64_t c; vs >> c; ++i)
        if (i < entries.size()) entries[i].count = c;
      if (i != entries.size()) throw FormatError(lineno, "counts has " + std::to_string(i) + " values for " + std::to_string(V) + " tokens");
    }
  }
  model.vocab = Vocabulary::from_entries(std::move(entries));
  if (static_cast<long long>(model.vocab.size()) != V) throw FormatError(lineno, "duplicate tokens in model");

  if (!output_lines.empty()) {
    if (static_cast<long long>(output_lines.size()) != V)
      throw FormatError(output_lines.back().second, "output block has " + std::to_string(output_lines.size()) + " rows");
    model.output.resize(V, dim);
    for (long long r = 0; r < V; ++r) {
      const auto& [text, at] = output_lines[static_cast<std::size_t>(r)];
      if (parse_row(text, model.output, r, at) != model.vocab.token(static_cast<std::size_t>(r)))
        throw FormatError(at, "output rows out of vocabulary order");
    }
  }
  return model;
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model " + path.string());
  return load_model(in);
}

}  // namespace chessvec
