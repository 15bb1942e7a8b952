#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "chessvec/chess.hpp"
#include "chessvec/pgn.hpp"

namespace chessvec {

enum class SentenceType { Type1, Type2, Pro };

/// Game phase by fullmove number: Debut 1-12, Mittel 13-30, Endgame 31+.
enum class Segment { All, Debut, Mittel, Endgame };
enum class ColorFilter { Both, WhiteOnly, BlackOnly };
enum class QueenFilter { Any, QueensPresent, QueensGone };
enum class ResultFilter { Any, DecisiveOnly, DrawOnly };

struct CorpusRecipe {
  std::string name;
  SentenceType sentence_type = SentenceType::Type1;
  Segment segment = Segment::All;
  ColorFilter color = ColorFilter::Both;
  QueenFilter queens = QueenFilter::Any;
  ResultFilter result = ResultFilter::Any;
  bool pos_tags = false;
  bool lemmatize = false;
};

/// The nineteen named recipes, in their canonical order.
const std::vector<CorpusRecipe>& shipped_recipes();
std::optional<CorpusRecipe> find_recipe(std::string_view name);
std::string recipe_names(std::string_view separator = ", ");

bool segment_contains(Segment segment, int fullmove);
bool result_accepted(ResultFilter filter, GameResult result);

/// Per-step membership after segment, color and queen filters.
std::vector<bool> step_mask(const std::vector<Step>& steps, const CorpusRecipe& recipe);

using Sentence = std::vector<std::string>;

Sentence type1_sentence(const std::vector<Step>& steps, const CorpusRecipe& recipe);
std::vector<Sentence> type2_sentences(const std::vector<Step>& steps, const CorpusRecipe& recipe);

/// Up to three preceding moves, the occupancy before the center move, the
/// center move, then up to three following moves. Centers are the steps the
/// recipe's filters accept (White's moves for positions_moves_pro).
std::vector<Sentence> pro_sentences(const std::vector<Step>& steps, const CorpusRecipe& recipe);
std::vector<Sentence> pro_sentences(const std::vector<Step>& steps);

/// Dispatches on recipe.sentence_type; empty sentences are dropped.
std::vector<Sentence> game_sentences(const std::vector<Step>& steps, const CorpusRecipe& recipe);

struct CorpusStats {
  std::size_t games_in = 0;
  std::size_t games_used = 0;
  std::size_t games_skipped = 0;  // unparsable or illegal
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t distinct_tokens = 0;
};

struct BuildOptions {
  int jobs = 1;
  std::size_t batch = 1024;
};

/// Streams a normalized game store through replay and the recipe's sentence
/// builder. Output order follows game order regardless of `jobs`.
CorpusStats build_corpus(std::istream& store, const CorpusRecipe& recipe, std::ostream& out,
                         const BuildOptions& options = {});

void write_sentence(std::ostream& out, const Sentence& sentence);

}  // namespace chessvec
