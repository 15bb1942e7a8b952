// chessvec: PGN -> normalized store -> corpus -> word2vec model -> queries / t-SNE plots.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "chessvec/analysis.hpp"
#include "chessvec/corpus.hpp"
#include "chessvec/embedding.hpp"
#include "chessvec/manifest.hpp"
#include "chessvec/pgn.hpp"
#include "chessvec/render.hpp"
#include "chessvec/synthetic.hpp"
#include "chessvec/tsne.hpp"

using namespace chessvec;

namespace {

/// Bad flags or names: exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_neighbors(const std::vector<Neighbor>& list, bool csv) {
  if (csv) {
    std::cout << "token,similarity\n";
    for (const auto& n : list) std::cout << n.token << "," << fixed6(n.similarity) << "\n";
    return;
  }
  std::size_t w = 5;
  for (const auto& n : list) w = std::max(w, n.token.size());
  for (const auto& n : list) {
    std::cout << n.token << std::string(w - n.token.size() + 2, ' ');
    const std::string s = fixed6(n.similarity);
    std::cout << std::string(s.size() < 9 ? 9 - s.size() : 0, ' ') << s << "\n";
  }
}

RunManifest start_manifest(const std::string& sub, const std::vector<std::string>& argv) {
  RunManifest m;
  m.subcommand = sub;
  m.argv = argv;
  m.version = CHESSVEC_VERSION;
  return m;
}

void finish_manifest(RunManifest& m, const std::string& artifact) {
  m.checksum_files();
  write_manifest(m, artifact);
}

std::optional<SentenceType> sentence_type_from_corpus(const std::string& corpus) {
  const auto mpath = manifest_path(corpus);
  if (!std::filesystem::exists(mpath)) return std::nullopt;
  const RunManifest m = read_manifest(mpath);
  if (!m.flags.contains("recipe")) return std::nullopt;
  if (auto r = find_recipe(m.flags["recipe"].get<std::string>())) return r->sentence_type;
  return std::nullopt;
}

int run(const std::vector<std::string>& args);

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> pgn;
  std::string out;
  int jobs = 1;
  int max_errors = 20;
};

int do_ingest(const IngestArgs& a, const std::vector<std::string>& argv) {
  auto out = open_out(a.out);
  std::size_t games = 0, errors = 0, empty = 0, plies = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& path : a.pgn) {
    auto in = open_in(path);
    PgnSplitter splitter(in);
    const std::size_t batch = 512;
    std::vector<RawGame> raws;
    std::vector<GameItem> items;
    for (bool more = true; more;) {
      raws.clear();
      while (raws.size() < batch) {
        auto r = splitter.next();
        if (!r) {
          more = false;
          break;
        }
        raws.push_back(std::move(*r));
      }
      items.assign(raws.size(), GameItem{});
      auto work = [&](std::size_t first, std::size_t last) {
        for (std::size_t i = first; i < last; ++i) items[i] = parse_game(raws[i]);
      };
      const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(a.jobs), 1, std::max<std::size_t>(raws.size(), 1));
      if (workers == 1) {
        work(0, raws.size());
      } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
          pool.emplace_back(work, raws.size() * w / workers, raws.size() * (w + 1) / workers);
      }
      for (const auto& item : items) {
        if (const auto* e = std::get_if<GameError>(&item)) {
          if (static_cast<int>(errors) < a.max_errors)
            std::cerr << path << ": game " << e->game_index << " at byte " << e->byte_offset
                      << (e->ply ? ", ply " + std::to_string(e->ply) : std::string()) << ": " << e->message << "\n";
          ++errors;
          continue;
        }
        const auto& g = std::get<GameRecord>(item);
        if (g.moves.empty()) {
          ++empty;
          continue;
        }
        write_store_line(out, g);
        ++games;
        plies += g.moves.size();
      }
    }
  }
  out.close();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "games " << games << "\nskipped " << errors + empty << " (" << errors << " errors, " << empty
            << " without moves)\nmoves " << plies << "\nseconds " << secs << "\n";

  RunManifest m = start_manifest("ingest", argv);
  m.flags = {{"jobs", a.jobs}};
  for (std::size_t i = 0; i < a.pgn.size(); ++i) m.inputs["pgn" + std::to_string(i)] = a.pgn[i];
  m.outputs["store"] = a.out;
  finish_manifest(m, a.out);
  return 0;
}

struct CorpusArgs {
  std::string store, recipe, out, color;
  int jobs = 1;
};

int do_corpus(const CorpusArgs& a, const std::vector<std::string>& argv) {
  auto recipe = find_recipe(a.recipe);
  if (!recipe) throw UsageError("unknown recipe '" + a.recipe + "'; valid recipes:\n  " + recipe_names("\n  "));
  if (a.color == "white") recipe->color = ColorFilter::WhiteOnly;
  else if (a.color == "black") recipe->color = ColorFilter::BlackOnly;
  else if (a.color == "both") recipe->color = ColorFilter::Both;
  auto in = open_in(a.store);
  auto out = open_out(a.out);
  BuildOptions opts;
  opts.jobs = a.jobs;
  const auto t0 = std::chrono::steady_clock::now();
  const CorpusStats st = build_corpus(in, *recipe, out, opts);
  out.close();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "recipe " << recipe->name << "\ngames " << st.games_used << " of " << st.games_in << " (" << st.games_skipped
            << " skipped)\nsentences " << st.sentences << "\ntokens " << st.tokens << "\ndistinct " << st.distinct_tokens
            << "\nseconds " << secs << "\n";

  RunManifest m = start_manifest("corpus", argv);
  m.flags = {{"recipe", recipe->name}, {"color", a.color.empty() ? "recipe" : a.color}, {"jobs", a.jobs}};
  m.inputs["store"] = a.store;
  m.outputs["corpus"] = a.out;
  finish_manifest(m, a.out);
  return 0;
}

struct TrainArgs {
  std::string corpus, out, type, window_mode;
  std::optional<int> window;
  Hyperparams hp;
  bool deterministic = false;
  int jobs = 1;
};

int do_train(TrainArgs a, const std::vector<std::string>& argv) {
  std::optional<SentenceType> type;
  if (a.type == "type1") type = SentenceType::Type1;
  else if (a.type == "type2") type = SentenceType::Type2;
  else if (a.type == "pro") type = SentenceType::Pro;
  else type = sentence_type_from_corpus(a.corpus);
  const Hyperparams base = defaults_for(type.value_or(SentenceType::Type1));
  Hyperparams hp = a.hp;
  hp.window = a.window.value_or(base.window);
  hp.dynamic_window = a.window_mode.empty() ? base.dynamic_window : a.window_mode == "dynamic";
  hp.jobs = a.jobs;
  hp.mode = a.deterministic || a.jobs <= 1 ? TrainMode::Deterministic : TrainMode::Parallel;
  try {
    hp.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  auto in = open_in(a.corpus);
  const auto t0 = std::chrono::steady_clock::now();
  auto [vocab, encoded] = load_corpus(in, hp.min_count);
  std::cerr << "vocabulary " << vocab.size() << ", sentences " << encoded.sentences() << ", tokens " << encoded.ids.size()
            << ", window " << hp.window << (hp.dynamic_window ? " (dynamic)" : " (fixed)") << "\n";
  EmbeddingModel model = train(vocab, encoded, hp);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (std::size_t e = 0; e < model.epoch_loss.size(); ++e) std::cout << "epoch " << e + 1 << " loss " << fixed6(model.epoch_loss[e]) << "\n";
  std::cout << "seconds " << secs << "\n";
  save_model(model, std::filesystem::path(a.out));

  RunManifest m = start_manifest("train", argv);
  m.flags = {{"dim", hp.dim},         {"window", hp.window},         {"dynamic_window", hp.dynamic_window},
             {"negatives", hp.negatives}, {"epochs", hp.epochs},     {"lr", hp.initial_lr},
             {"min_lr_ratio", hp.min_lr_ratio}, {"min_count", hp.min_count}, {"subsample", hp.subsample_t},
             {"mode", hp.mode == TrainMode::Deterministic ? "deterministic" : "parallel"}, {"jobs", hp.jobs}};
  m.seed = hp.seed;
  m.inputs["corpus"] = a.corpus;
  m.outputs["model"] = a.out;
  finish_manifest(m, a.out);
  return 0;
}

struct QueryArgs {
  std::string model;
  std::vector<std::string> tokens, positive, negative;
  std::size_t k = 10;
  bool csv = false;
};

int do_query(const std::string& kind, const QueryArgs& a) {
  const VectorIndex index(load_model(std::filesystem::path(a.model)));
  if (kind == "similar") {
    if (a.tokens.size() != 1) throw UsageError("query similar takes exactly one token");
    print_neighbors(index.most_similar(a.tokens[0], a.k), a.csv);
  } else if (kind == "distance") {
    if (a.tokens.size() != 2) throw UsageError("query distance takes exactly two tokens");
    std::cout << fixed6(index.cosine(a.tokens[0], a.tokens[1])) << "\n";
  } else if (kind == "analogy") {
    if (a.positive.empty()) throw UsageError("query analogy needs --positive");
    print_neighbors(index.analogy(a.positive, a.negative, a.k), a.csv);
  } else {
    try {
      std::cout << index.odd_one_out(a.tokens) << "\n";
    } catch (const TooFewTokens& e) {
      throw UsageError(e.what());
    }
  }
  return 0;
}

struct StatsArgs {
  std::string model, criterion = "destination";
  std::vector<int> thresholds = {3, 4, 5, 6, 7};
  std::size_t k = 10, limit = 0;
  std::uint64_t min_count = 0;
  int jobs = 1;
  bool csv = false;
};

int do_stats(const std::string& kind, const StatsArgs& a) {
  const VectorIndex index(load_model(std::filesystem::path(a.model)));
  if (kind == "dest") {
    DestStatsOptions opts;
    opts.k = static_cast<int>(a.k);
    opts.limit = a.limit;
    opts.criterion = a.criterion == "piece" ? NeighborCriterion::SamePieceKindColor : NeighborCriterion::SameDestination;
    const auto rows = index.destination_stats(a.thresholds, opts);
    if (a.csv) std::cout << "n,count,percent\n";
    else std::cout << "   n     count  percent\n";
    for (const auto& r : rows) {
      char buf[96];
      if (a.csv) std::snprintf(buf, sizeof buf, "%d,%zu,%.2f\n", r.n, r.count, r.percent);
      else std::snprintf(buf, sizeof buf, "%4d %9zu  %6.2f%%\n", r.n, r.count, r.percent);
      std::cout << buf;
    }
    return 0;
  }
  const auto pairs = index.extreme_pairs(a.k, a.min_count, a.jobs);
  auto show = [&](const char* title, const std::vector<TokenPair>& list) {
    if (a.csv) {
      for (const auto& p : list) std::cout << title << "," << p.a << "," << p.b << "," << fixed6(p.similarity) << "\n";
      return;
    }
    std::cout << title << "\n";
    for (const auto& p : list) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "  %-12s %-12s %10s\n", p.a.c_str(), p.b.c_str(), fixed6(p.similarity).c_str());
      std::cout << buf;
    }
  };
  if (a.csv) std::cout << "list,a,b,similarity\n";
  show("most_similar", pairs.most_similar);
  show("least_similar", pairs.least_similar);
  return 0;
}

struct TsneArgs {
  std::string model, out_svg, out_csv, init = "random", title;
  double perplexity = 30;
  int iters = 1000, label_every = 3, jobs = 1;
  std::uint64_t seed = 1;
  std::size_t top = 0;
};

int do_tsne(const TsneArgs& a, const std::vector<std::string>& argv) {
  if (a.out_svg.empty() && a.out_csv.empty()) throw UsageError("tsne needs --out-svg and/or --out-csv");
  EmbeddingModel model = load_model(std::filesystem::path(a.model));
  std::size_t n = model.size();
  if (a.top && a.top < n) n = a.top;
  std::vector<Vocabulary::Entry> entries(model.vocab.entries().begin(), model.vocab.entries().begin() + static_cast<std::ptrdiff_t>(n));
  const Vocabulary vocab = Vocabulary::from_entries(std::move(entries));
  const RowMatrix<double> x = model.input.topRows(static_cast<Eigen::Index>(n)).cast<double>();

  TsneConfig cfg;
  cfg.perplexity = a.perplexity;
  cfg.iterations = a.iters;
  cfg.exaggeration_iters = std::min(cfg.exaggeration_iters, std::max(0, a.iters - 1));
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  cfg.init = a.init == "pca" ? TsneInit::Pca : TsneInit::RandomGaussian;
  try {
    cfg.validate(n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = tsne(x, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "points " << n << "\nkl_after_exaggeration " << fixed6(result.kl_after_exaggeration) << "\nkl_final "
            << fixed6(result.kl_final) << "\nseconds " << secs << "\n";
  if (!(result.kl_final < result.kl_after_exaggeration))
    std::cerr << "warning: KL did not decrease after the exaggeration phase\n";

  Projection proj = make_projection(vocab, result.embedding, a.label_every);
  classify_pieces(proj);
  RunManifest m = start_manifest("tsne", argv);
  m.flags = {{"perplexity", a.perplexity}, {"iters", a.iters}, {"label_every", a.label_every},
             {"init", a.init}, {"top", a.top}, {"jobs", a.jobs}};
  m.seed = a.seed;
  m.inputs["model"] = a.model;
  if (!a.out_svg.empty()) {
    RenderOptions ro;
    ro.title = a.title.empty() ? "t-SNE, perplexity " + fixed6(a.perplexity).substr(0, fixed6(a.perplexity).find('.') + 2) : a.title;
    auto out = open_out(a.out_svg);
    out << render_svg(proj, ro);
    m.outputs["svg"] = a.out_svg;
  }
  if (!a.out_csv.empty()) {
    auto out = open_out(a.out_csv);
    out << render_csv(proj);
    m.outputs["csv"] = a.out_csv;
  }
  m.checksum_files();
  write_manifest(m, a.out_svg.empty() ? a.out_csv : a.out_svg);
  return 0;
}

struct GenerateArgs {
  std::size_t games = 1000;
  std::uint64_t seed = 1;
  std::string out, format = "store";
  int max_plies = 240;
};

int do_generate(const GenerateArgs& a, const std::vector<std::string>& argv) {
  auto out = open_out(a.out);
  std::mt19937_64 rng(a.seed);
  SelfPlayOptions opts;
  opts.max_plies = a.max_plies;
  for (std::size_t i = 0; i < a.games; ++i) {
    GameRecord g = generate_game(rng, opts);
    if (a.format == "pgn") {
      g.headers.insert(g.headers.begin() + 1, {"Round", std::to_string(i + 1)});
      write_pgn(out, g);
    } else {
      write_store_line(out, g);
    }
  }
  out.close();
  std::cout << "games " << a.games << "\n";
  RunManifest m = start_manifest("generate", argv);
  m.flags = {{"games", a.games}, {"format", a.format}, {"max_plies", a.max_plies}};
  m.seed = a.seed;
  m.outputs[a.format] = a.out;
  finish_manifest(m, a.out);
  return 0;
}

int do_rerun(const std::string& path, bool verify) {
  const RunManifest m = read_manifest(path);
  if (m.argv.empty() || m.argv[0] == "rerun") throw UsageError("manifest has no rerunnable command");
  const int rc = run(m.argv);
  if (rc != 0 || !verify) return rc;
  int mismatches = 0;
  for (const auto& [role, p] : m.outputs) {
    auto it = m.checksums.find(p);
    if (it == m.checksums.end()) continue;
    const std::string now = fnv1a_file(p);
    const bool same = now == it->second;
    std::cout << (same ? "match    " : "MISMATCH ") << p << " " << now << "\n";
    mismatches += !same;
  }
  return mismatches ? 2 : 0;
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args) {
  CLI::App app{"chessvec: chess moves as words -- PGN ingest, corpus recipes, SGNS training, vector queries, t-SNE"};
  app.set_version_flag("--version", std::string(CHESSVEC_VERSION));
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse and replay PGN files into a normalized game store");
  c_ingest->add_option("pgn", ingest.pgn, "PGN files")->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--out", ingest.out, "Store file to write")->required();
  c_ingest->add_option("--jobs", ingest.jobs, "Parser threads")->check(CLI::PositiveNumber);
  c_ingest->add_option("--max-errors", ingest.max_errors, "Errors to print before staying quiet");

  CorpusArgs corpus;
  auto* c_corpus = app.add_subcommand("corpus", "Emit a training corpus from a store with a named recipe");
  c_corpus->add_option("--store", corpus.store, "Normalized game store")->required();
  c_corpus->add_option("--recipe", corpus.recipe, "Recipe name (see `chessvec recipes`)")->required();
  c_corpus->add_option("--out", corpus.out, "Corpus file to write")->required();
  c_corpus->add_option("--color", corpus.color, "Override the recipe's color filter")
      ->check(CLI::IsMember({"white", "black", "both"}));
  c_corpus->add_option("--jobs", corpus.jobs, "Worker threads (output order is fixed)")->check(CLI::PositiveNumber);

  app.add_subcommand("recipes", "List the recipe names");

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train skip-gram embeddings with negative sampling");
  c_train->add_option("--corpus", tr.corpus, "Corpus file, one sentence per line")->required();
  c_train->add_option("--out", tr.out, "Model file to write")->required();
  c_train->add_option("--dim", tr.hp.dim, "Vector size")->capture_default_str();
  c_train->add_option("--window", tr.window,
                      "Context window (default: 5 for move listings, 32 for positions, 40 for combined sentences)");
  c_train->add_option("--window-mode", tr.window_mode, "dynamic (radius sampled per token) or fixed")
      ->check(CLI::IsMember({"dynamic", "fixed"}));
  c_train->add_option("--type", tr.type, "Sentence type, when the corpus has no manifest")
      ->check(CLI::IsMember({"type1", "type2", "pro"}));
  c_train->add_option("--negatives", tr.hp.negatives, "Negative samples per pair")->capture_default_str();
  c_train->add_option("--epochs", tr.hp.epochs, "Passes over the corpus")->capture_default_str();
  c_train->add_option("--lr", tr.hp.initial_lr, "Initial learning rate (decays linearly)")->capture_default_str();
  c_train->add_option("--min-count", tr.hp.min_count, "Drop tokens rarer than this")->capture_default_str();
  c_train->add_option("--subsample", tr.hp.subsample_t, "Frequent-token subsampling threshold (0 disables)")
      ->capture_default_str();
  c_train->add_option("--seed", tr.hp.seed, "Random seed")->capture_default_str();
  c_train->add_flag("--deterministic", tr.deterministic, "Single-threaded, bit-reproducible training");
  c_train->add_option("--jobs", tr.jobs, "Lock-free worker threads (ignored with --deterministic)")
      ->check(CLI::PositiveNumber);

  QueryArgs q;
  auto* c_query = app.add_subcommand("query", "Similarity queries against a model");
  c_query->require_subcommand(1);
  auto add_model = [](CLI::App* c, std::string& target) {
    c->add_option("--model", target, "Model file")->required()->check(CLI::ExistingFile);
  };
  auto* q_similar = c_query->add_subcommand("similar", "Nearest tokens by cosine");
  add_model(q_similar, q.model);
  q_similar->add_option("token", q.tokens, "Query token")->required();
  q_similar->add_option("-k,--top", q.k, "Number of neighbors")->capture_default_str();
  q_similar->add_flag("--csv", q.csv, "CSV output");
  auto* q_distance = c_query->add_subcommand("distance", "Cosine similarity of two tokens");
  add_model(q_distance, q.model);
  q_distance->add_option("tokens", q.tokens, "Two tokens")->required()->expected(2);
  auto* q_analogy = c_query->add_subcommand("analogy", "positive - negative, e.g. --positive Pe2e4 pe7e5 --negative Pf2f4");
  add_model(q_analogy, q.model);
  q_analogy->add_option("--positive", q.positive, "Tokens to add")->required();
  q_analogy->add_option("--negative", q.negative, "Tokens to subtract");
  q_analogy->add_option("-k,--top", q.k, "Number of results")->capture_default_str();
  q_analogy->add_flag("--csv", q.csv, "CSV output");
  auto* q_odd = c_query->add_subcommand("odd", "Token least like the others");
  add_model(q_odd, q.model);
  q_odd->add_option("tokens", q.tokens, "Three or more tokens")->required();

  StatsArgs st;
  auto* c_stats = app.add_subcommand("stats", "Whole-vocabulary statistics");
  c_stats->require_subcommand(1);
  auto* s_dest = c_stats->add_subcommand("dest", "How many move tokens have >= n qualifying neighbors in their top k");
  add_model(s_dest, st.model);
  s_dest->add_option("--thresholds", st.thresholds, "Values of n")->capture_default_str();
  s_dest->add_option("-k,--top", st.k, "Neighbors inspected per token")->capture_default_str();
  s_dest->add_option("--criterion", st.criterion,
                     "destination: same piece and color to the same square; piece: same piece and color")
      ->check(CLI::IsMember({"destination", "piece"}))
      ->capture_default_str();
  s_dest->add_option("--limit", st.limit, "Score only the N most frequent move tokens (0 = all)");
  s_dest->add_flag("--csv", st.csv, "CSV output");
  auto* s_pairs = c_stats->add_subcommand("pairs", "Most and least similar token pairs (exhaustive)");
  add_model(s_pairs, st.model);
  s_pairs->add_option("-k,--top", st.k, "Pairs per list")->capture_default_str();
  s_pairs->add_option("--min-count", st.min_count, "Ignore tokens rarer than this");
  s_pairs->add_option("--jobs", st.jobs, "Worker threads")->check(CLI::PositiveNumber);
  s_pairs->add_flag("--csv", st.csv, "CSV output");

  TsneArgs ts;
  auto* c_tsne = app.add_subcommand("tsne", "Exact t-SNE of model vectors to a labeled SVG scatter and/or CSV");
  add_model(c_tsne, ts.model);
  c_tsne->add_option("--perplexity", ts.perplexity, "Target perplexity (5, 30 and 50 are typical)")->capture_default_str();
  c_tsne->add_option("--iters", ts.iters, "Gradient iterations")->capture_default_str()->check(CLI::PositiveNumber);
  c_tsne->add_option("--seed", ts.seed, "Random seed for the initial layout")->capture_default_str();
  c_tsne->add_option("--label-every", ts.label_every, "Label every Nth token (0 = none)")->capture_default_str();
  c_tsne->add_option("--out-svg", ts.out_svg, "SVG file to write");
  c_tsne->add_option("--out-csv", ts.out_csv, "CSV file to write (token,x,y,piece,color,labeled)");
  c_tsne->add_option("--init", ts.init, "Initial layout")->check(CLI::IsMember({"random", "pca"}))->capture_default_str();
  c_tsne->add_option("--top", ts.top, "Project only the N most frequent tokens (0 = all)");
  c_tsne->add_option("--title", ts.title, "Plot title");
  c_tsne->add_option("--jobs", ts.jobs, "Worker threads")->check(CLI::PositiveNumber);

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Write synthetic self-play games (store or PGN)");
  c_gen->add_option("--games", gen.games, "Number of games")->capture_default_str();
  c_gen->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  c_gen->add_option("--out", gen.out, "Output file")->required();
  c_gen->add_option("--format", gen.format, "store or pgn")->check(CLI::IsMember({"store", "pgn"}))->capture_default_str();
  c_gen->add_option("--max-plies", gen.max_plies, "Game length cap")->capture_default_str();

  std::string manifest;
  bool verify = false;
  auto* c_rerun = app.add_subcommand("rerun", "Re-run the command recorded in a manifest");
  c_rerun->add_option("manifest", manifest, "Manifest file (<artifact>.manifest.json)")->required()->check(CLI::ExistingFile);
  c_rerun->add_flag("--verify", verify, "Compare output checksums with the recorded ones");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (c_ingest->parsed()) return do_ingest(ingest, args);
  if (c_corpus->parsed()) return do_corpus(corpus, args);
  if (app.got_subcommand("recipes")) {
    std::cout << recipe_names("\n") << "\n";
    return 0;
  }
  if (c_train->parsed()) return do_train(tr, args);
  if (c_query->parsed()) {
    for (auto* sub : {q_similar, q_distance, q_analogy, q_odd})
      if (sub->parsed()) return do_query(sub->get_name(), q);
  }
  if (c_stats->parsed()) return do_stats(s_dest->parsed() ? "dest" : "pairs", st);
  if (c_tsne->parsed()) return do_tsne(ts, args);
  if (c_gen->parsed()) return do_generate(gen, args);
  if (c_rerun->parsed()) return do_rerun(manifest, verify);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const UnknownToken& e) {
    std::cerr << "error: unknown token '" << e.token() << "'\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
