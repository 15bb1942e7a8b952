#include "chessvec/corpus.hpp"

#include <algorithm>
#include <thread>
#include <unordered_set>

#include "chessvec/tokens.hpp"

namespace chessvec {

namespace {

CorpusRecipe make(std::string name, SentenceType type, Segment seg = Segment::All, ColorFilter color = ColorFilter::Both,
                  QueenFilter queens = QueenFilter::Any, ResultFilter result = ResultFilter::Any, bool pos = false,
                  bool lemma = false) {
  return CorpusRecipe{std::move(name), type, seg, color, queens, result, pos, lemma};
}

EncodeOptions move_opts(const CorpusRecipe& r, bool arrow) { return EncodeOptions{arrow, r.pos_tags, r.lemmatize}; }

}  // namespace

const std::vector<CorpusRecipe>& shipped_recipes() {
  using S = SentenceType;
  using G = Segment;
  using C = ColorFilter;
  using Q = QueenFilter;
  using R = ResultFilter;
  static const std::vector<CorpusRecipe> kRecipes = {
      make("moves_texts", S::Type1),
      make("lemmatized_moves_texts", S::Type1, G::All, C::Both, Q::Any, R::Any, false, true),
      make("white_moves", S::Type2, G::All, C::WhiteOnly),
      make("black_moves", S::Type2, G::All, C::BlackOnly),
      make("debut_moves", S::Type1, G::Debut),
      make("debut_positions", S::Type2, G::Debut, C::WhiteOnly),
      make("mittel_moves", S::Type1, G::Mittel),
      make("mittel_positions", S::Type2, G::Mittel, C::WhiteOnly),
      make("endgame_moves", S::Type1, G::Endgame),
      make("endgame_positions", S::Type2, G::Endgame, C::WhiteOnly),
      make("moves_pos", S::Type1, G::All, C::Both, Q::Any, R::Any, true),
      make("positions_pos", S::Type2, G::All, C::WhiteOnly, Q::Any, R::Any, true),
      make("queens_moves", S::Type1, G::All, C::Both, Q::QueensPresent),
      make("no_queens_moves", S::Type1, G::All, C::Both, Q::QueensGone),
      make("queens_positions", S::Type2, G::All, C::WhiteOnly, Q::QueensPresent),
      make("no_queens_positions", S::Type2, G::All, C::WhiteOnly, Q::QueensGone),
      make("positions_moves_pro", S::Pro, G::All, C::WhiteOnly),
      make("result_moves", S::Type1, G::All, C::Both, Q::Any, R::DecisiveOnly),
      make("tied_moves", S::Type1, G::All, C::Both, Q::Any, R::DrawOnly),
  };
  return kRecipes;
}

std::optional<CorpusRecipe> find_recipe(std::string_view name) {
  for (const auto& r : shipped_recipes())
    if (r.name == name) return r;
  return std::nullopt;
}

std::string recipe_names(std::string_view separator) {
  std::string out;
  for (const auto& r : shipped_recipes()) {
    if (!out.empty()) out += separator;
    out += r.name;
  }
  return out;
}

bool segment_contains(Segment segment, int fullmove) {
  switch (segment) {
    case Segment::All: return true;
    case Segment::Debut: return fullmove <= 12;
    case Segment::Mittel: return fullmove >= 13 && fullmove <= 30;
    case Segment::Endgame: return fullmove >= 31;
  }
  return false;
}

bool result_accepted(ResultFilter filter, GameResult result) {
  switch (filter) {
    case ResultFilter::Any: return true;
    case ResultFilter::DecisiveOnly: return result == GameResult::WhiteWin || result == GameResult::BlackWin;
    case ResultFilter::DrawOnly: return result == GameResult::Draw;
  }
  return false;
}

std::vector<bool> step_mask(const std::vector<Step>& steps, const CorpusRecipe& recipe) {
  std::vector<bool> mask(steps.size(), true);
  // Once both queens are gone the suffix stays selected, even if a promotion
  // brings a queen back.
  std::size_t queens_gone_from = steps.size();
  if (recipe.queens == QueenFilter::QueensGone) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (steps[i].board_before.queen_count() == 0) {
        queens_gone_from = i;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const Step& s = steps[i];
    bool keep = segment_contains(recipe.segment, s.fullmove_number);
    if (recipe.color == ColorFilter::WhiteOnly) keep = keep && s.moved_piece.color == Color::White;
    if (recipe.color == ColorFilter::BlackOnly) keep = keep && s.moved_piece.color == Color::Black;
    if (recipe.queens == QueenFilter::QueensPresent) keep = keep && s.board_before.queen_count() >= 1;
    if (recipe.queens == QueenFilter::QueensGone) keep = keep && i >= queens_gone_from;
    mask[i] = keep;
  }
  return mask;
}

Sentence type1_sentence(const std::vector<Step>& steps, const CorpusRecipe& recipe) {
  const auto mask = step_mask(steps, recipe);
  const auto opts = move_opts(recipe, false);
  Sentence out;
  out.reserve(steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (mask[i]) out.push_back(encode_move(steps[i], opts));
  return out;
}

std::vector<Sentence> type2_sentences(const std::vector<Step>& steps, const CorpusRecipe& recipe) {
  const auto mask = step_mask(steps, recipe);
  const auto opts = move_opts(recipe, true);
  std::vector<Sentence> out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!mask[i]) continue;
    Sentence s;
    s.reserve(33);
    append_occupancy(steps[i].board_before, s);
    s.push_back(encode_move(steps[i], opts));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sentence> pro_sentences(const std::vector<Step>& steps, const CorpusRecipe& recipe) {
  constexpr std::size_t kContext = 3;
  const auto mask = step_mask(steps, recipe);
  const auto opts = move_opts(recipe, true);
  std::vector<std::string> moves;
  moves.reserve(steps.size());
  for (const Step& s : steps) moves.push_back(encode_move(s, opts));

  std::vector<Sentence> out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!mask[i]) continue;
    Sentence s;
    s.reserve(40);
    for (std::size_t j = i >= kContext ? i - kContext : 0; j < i; ++j) s.push_back(moves[j]);
    append_occupancy(steps[i].board_before, s);
    s.push_back(moves[i]);
    for (std::size_t j = i + 1; j < std::min(steps.size(), i + 1 + kContext); ++j) s.push_back(moves[j]);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sentence> pro_sentences(const std::vector<Step>& steps) {
  return pro_sentences(steps, *find_recipe("positions_moves_pro"));
}

std::vector<Sentence> game_sentences(const std::vector<Step>& steps, const CorpusRecipe& recipe) {
  std::vector<Sentence> out;
  switch (recipe.sentence_type) {
    case SentenceType::Type1: {
      Sentence s = type1_sentence(steps, recipe);
      if (!s.empty()) out.push_back(std::move(s));
      break;
    }
    case SentenceType::Type2: out = type2_sentences(steps, recipe); break;
    case SentenceType::Pro: out = pro_sentences(steps, recipe); break;
  }
  return out;
}

void write_sentence(std::ostream& out, const Sentence& sentence) {
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (i) out << ' ';
    out << sentence[i];
  }
  out << '\n';
}

namespace {

struct GameOutput {
  bool parsed = false;
  bool used = false;
  std::string text;
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::vector<std::string> vocab;
};

GameOutput process_line(const std::string& line, std::size_t index, std::uint64_t offset, const CorpusRecipe& recipe) {
  GameOutput g;
  GameItem item = parse_store_line(line, index, offset);
  auto* game = std::get_if<GameRecord>(&item);
  if (!game) return g;
  g.parsed = true;
  if (!result_accepted(recipe.result, game->result)) return g;
  g.used = true;
  const auto steps = replay(*game);
  std::unordered_set<std::string> seen;
  for (const Sentence& s : game_sentences(steps, recipe)) {
    ++g.sentences;
    g.tokens += s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) g.text += ' ';
      g.text += s[i];
      if (seen.insert(s[i]).second) g.vocab.push_back(s[i]);
    }
    g.text += '\n';
  }
  return g;
}

}  // namespace

CorpusStats build_corpus(std::istream& store, const CorpusRecipe& recipe, std::ostream& out,
                         const BuildOptions& options) {
  CorpusStats stats;
  StoreReader reader(store);
  std::unordered_set<std::string> distinct;
  const std::size_t batch = std::max<std::size_t>(1, options.batch);
  const int jobs = std::max(1, options.jobs);

  std::vector<std::pair<std::string, std::uint64_t>> lines;
  std::vector<GameOutput> results;
  bool done = false;
  while (!done) {
    lines.clear();
    while (lines.size() < batch) {
      auto l = reader.next_line();
      if (!l) {
        done = true;
        break;
      }
      lines.push_back(std::move(*l));
    }
    if (lines.empty()) break;
    const std::size_t base = stats.games_in;
    results.assign(lines.size(), GameOutput{});
    auto work = [&](std::size_t worker) {
      for (std::size_t i = worker; i < lines.size(); i += static_cast<std::size_t>(jobs))
        results[i] = process_line(lines[i].first, base + i, lines[i].second, recipe);
    };
    if (jobs == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < jobs; ++w) pool.emplace_back(work, static_cast<std::size_t>(w));
    }
    for (auto& g : results) {
      ++stats.games_in;
      if (!g.parsed) {
        ++stats.games_skipped;
        continue;
      }
      if (!g.used) continue;
      ++stats.games_used;
      stats.sentences += g.sentences;
      stats.tokens += g.tokens;
      for (auto& t : g.vocab) distinct.insert(std::move(t));
      out << g.text;
    }
    if (!out) throw std::runtime_error("write failed while building corpus");
  }
  stats.distinct_tokens = distinct.size();
  return stats;
}

}  // namespace chessvec
