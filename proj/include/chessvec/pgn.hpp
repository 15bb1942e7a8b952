#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chessvec/chess.hpp"

namespace chessvec {

enum class GameResult { WhiteWin, BlackWin, Draw, Unknown };

std::string_view result_text(GameResult r);
std::optional<GameResult> parse_result(std::string_view text);

struct GameRecord {
  std::vector<std::pair<std::string, std::string>> headers;
  std::vector<Move> moves;
  GameResult result = GameResult::Unknown;

  std::optional<std::string> header(std::string_view name) const;
};

struct GameError {
  std::uint64_t byte_offset = 0;
  std::size_t game_index = 0;
  int ply = 0;  // 0 when the failure is not tied to a move
  std::string message;
};

using GameItem = std::variant<GameRecord, GameError>;

/// Unparsed text of one game as cut out of a PGN stream.
struct RawGame {
  std::uint64_t byte_offset = 0;
  std::size_t game_index = 0;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string movetext;
};

/// Splits a PGN stream into per-game chunks without interpreting moves.
/// A game ends at a result terminator outside comments/variations, at the
/// next tag section, or at end of stream.
class PgnSplitter {
 public:
  explicit PgnSplitter(std::istream& in) : in_(in) {}
  std::optional<RawGame> next();

 private:
  bool read_line(std::string& line);

  std::istream& in_;
  std::uint64_t offset_ = 0;
  std::size_t index_ = 0;
  std::optional<std::string> pending_;
  std::uint64_t pending_offset_ = 0;
};

/// Parses the movetext of a raw game, resolving SAN or long-algebraic moves
/// (auto-detected from the first move) against a replayed board.
GameItem parse_game(const RawGame& raw);

/// Streaming PGN reader. Each call to next() yields one game or one error;
/// errors never abort the stream. Games with no moves are skipped and counted.
class PgnReader {
 public:
  explicit PgnReader(std::istream& in) : splitter_(in) {}
  std::optional<GameItem> next();
  std::size_t skipped_empty() const { return skipped_empty_; }

 private:
  PgnSplitter splitter_;
  std::size_t skipped_empty_ = 0;
};

/// Replays from the standard initial position. Throws IllegalMove (with ply) on failure.
std::vector<Step> replay(const GameRecord& game);

/// Export-style PGN: tag pairs, numbered SAN movetext wrapped at 80 columns,
/// result terminator, blank line.
void write_pgn(std::ostream& out, const GameRecord& game);

/// Normalized store line: "<result>\t<Pe2e4 pc7c5 ...>".
std::string store_line(const GameRecord& game);
void write_store_line(std::ostream& out, const GameRecord& game);

/// Parses one store line, replaying the moves for validation.
GameItem parse_store_line(std::string_view line, std::size_t game_index, std::uint64_t byte_offset);

/// Streaming reader over a normalized store.
class StoreReader {
 public:
  explicit StoreReader(std::istream& in) : in_(in) {}
  std::optional<GameItem> next();
  /// Raw line access for callers that parse in parallel.
  std::optional<std::pair<std::string, std::uint64_t>> next_line();
  std::size_t index() const { return index_; }

 private:
  std::istream& in_;
  std::uint64_t offset_ = 0;
  std::size_t index_ = 0;
};

}  // namespace chessvec
