#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chessvec {

enum class Color : std::uint8_t { White, Black };
enum class PieceKind : std::uint8_t { Pawn, Knight, Bishop, Rook, Queen, King };
enum class Castle : std::uint8_t { KingSide, QueenSide };

constexpr Color opposite(Color c) { return c == Color::White ? Color::Black : Color::White; }

/// Uppercase letter for a piece kind: P N B R Q K.
char kind_letter(PieceKind kind);
std::optional<PieceKind> kind_from_letter(char upper);

/// A board square. Index 0 is a1, 7 is h1, 63 is h8.
class Square {
 public:
  constexpr Square() = default;
  constexpr Square(int file, int rank) : index_(static_cast<std::uint8_t>(rank * 8 + file)) {}

  static constexpr Square from_index(int index) { return Square(index % 8, index / 8); }
  /// Parses "e4"; nullopt when out of range or malformed.
  static std::optional<Square> parse(std::string_view text);

  constexpr int file() const { return index_ % 8; }
  constexpr int rank() const { return index_ / 8; }
  constexpr int index() const { return index_; }
  std::string str() const;

  friend constexpr bool operator==(Square, Square) = default;
  friend constexpr auto operator<=>(Square, Square) = default;

 private:
  std::uint8_t index_ = 0;
};

struct Piece {
  Color color = Color::White;
  PieceKind kind = PieceKind::Pawn;

  /// FEN-style letter, uppercase for White.
  char letter() const;
  static std::optional<Piece> from_letter(char c);

  friend constexpr bool operator==(Piece, Piece) = default;
};

struct Move {
  Square from;
  Square to;
  std::optional<PieceKind> promotion;
  bool is_capture = false;
  bool is_en_passant = false;
  std::optional<Castle> castle;

  /// Coordinate form, e.g. "e2e4", "e7e8q".
  std::string uci() const;

  friend bool operator==(const Move&, const Move&) = default;
};

struct CastlingRights {
  bool white_king = true;
  bool white_queen = true;
  bool black_king = true;
  bool black_queen = true;

  friend bool operator==(const CastlingRights&, const CastlingRights&) = default;
};

struct Step;

/// Full position state. Value type; apply() returns a new board.
class Board {
 public:
  /// Standard starting position.
  static Board initial();
  /// Board with no pieces, White to move, no castling rights.
  static Board empty();
  /// Minimal FEN reader for test fixtures (piece placement, side, castling, ep, clocks).
  static Board from_fen(std::string_view fen);

  std::optional<Piece> at(Square sq) const;
  void set(Square sq, std::optional<Piece> piece);

  Color side_to_move() const { return side_; }
  void set_side_to_move(Color c) { side_ = c; }
  const CastlingRights& castling() const { return castling_; }
  void set_castling(CastlingRights rights) { castling_ = rights; }
  std::optional<Square> en_passant_target() const { return ep_; }
  void set_en_passant_target(std::optional<Square> sq) { ep_ = sq; }
  int halfmove_clock() const { return halfmove_; }
  int fullmove_number() const { return fullmove_; }

  int occupied_count() const;
  int count(Piece piece) const;
  int queen_count() const;
  std::optional<Square> king_square(Color c) const;

  /// True when `by` attacks `sq` (pins ignored, as usual for attack maps).
  bool attacked(Square sq, Color by) const;
  bool in_check() const;

  /// Successor position. No legality checking; see apply_move().
  Board apply(const Move& move) const;

  friend bool operator==(const Board&, const Board&) = default;

 private:
  // 0 = empty, otherwise 1 + color * 6 + kind
  std::array<std::uint8_t, 64> cells_{};
  Color side_ = Color::White;
  CastlingRights castling_;
  std::optional<Square> ep_;
  int halfmove_ = 0;
  int fullmove_ = 1;
};

/// One replayed ply.
struct Step {
  int ply_index = 1;
  int fullmove_number = 1;
  Board board_before;
  Move move;
  Piece moved_piece;
  std::optional<Piece> captured;
};

class ChessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllegalMove : public ChessError {
 public:
  IllegalMove(const std::string& what, int ply = 0) : ChessError(what), ply_(ply) {}
  int ply() const { return ply_; }

 private:
  int ply_;
};

class SanError : public ChessError {
 public:
  enum class Kind { Ambiguous, NoLegalMatch, Malformed };
  SanError(Kind kind, const std::string& what) : ChessError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

Board initial_board();

std::vector<Move> legal_moves(const Board& board);
void legal_moves(const Board& board, std::vector<Move>& out);

/// Legal moves restricted to a destination square and optionally a mover kind.
/// Much cheaper than legal_moves() when resolving notation.
void legal_moves_to(const Board& board, Square to, std::optional<PieceKind> kind, std::vector<Move>& out);

bool is_legal(const Board& board, const Move& move);

/// Applies a legal move and returns the successor plus its Step record.
/// Throws IllegalMove when `move` is not legal in `board`.
std::pair<Board, Step> apply_move(const Board& board, const Move& move);

std::uint64_t perft(const Board& board, int depth);

/// SAN for a legal move, with +/# suffixes.
std::string san_of(const Board& board, const Move& move);

/// Resolves SAN against the legal moves of `board`. Check and annotation
/// suffixes (+ # ! ?) are ignored.
Move parse_san(const Board& board, std::string_view text);

/// Resolves the long-algebraic token form "Pe2e4" / "pe7e8q" (optional
/// promotion letter in either case). The piece letter must match the mover.
Move parse_long_algebraic(const Board& board, std::string_view text);

/// True when `text` looks like a long-algebraic token rather than SAN.
bool looks_long_algebraic(std::string_view text);

}  // namespace chessvec
