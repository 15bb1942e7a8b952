#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chessvec/chess.hpp"

namespace chessvec {

// Token language:
//   move      [->]Pe2e4[Q][_CAP|_N]   piece letter cased by color, origin, destination
//   position  Pe4                      one occupied square
//   lemma     Pe4[Q][_CAP|_N]          move with the origin square removed
// A promotion appends the promoted piece letter in the mover's case.

struct EncodeOptions {
  bool arrow = false;
  bool pos_tags = false;
  bool lemma = false;
};

std::string encode_move(const Step& step, EncodeOptions opts);

/// Black pieces first, then White; each color scanned rank 8 down to rank 1,
/// files a to h.
std::vector<std::string> encode_occupancy(const Board& board);
void append_occupancy(const Board& board, std::vector<std::string>& out);

class MalformedToken : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "Pe2e4" -> "Pe4". Accepts only bare move tokens (promotion suffix allowed).
std::string lemmatize(std::string_view move_token);

enum class TokenKind { Move, Position, Lemma };
enum class PosTag { None, Capture, Normal };

/// A bare three-character token ("Pe4") reads as a position unless the
/// caller says it came from a lemmatized corpus.
enum class ShortForm { Position, Lemma };

struct Token {
  TokenKind kind = TokenKind::Move;
  Piece piece;
  std::optional<Square> from;
  Square to;
  bool arrow = false;
  PosTag pos_tag = PosTag::None;
  std::optional<PieceKind> promotion;

  std::string str() const;
  friend bool operator==(const Token&, const Token&) = default;
};

Token parse_token(std::string_view text, ShortForm short_form = ShortForm::Position);
std::optional<Token> try_parse_token(std::string_view text, ShortForm short_form = ShortForm::Position);

}  // namespace chessvec
