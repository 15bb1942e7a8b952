#include "chessvec/pgn.hpp"

#include <cctype>

#include "chessvec/tokens.hpp"

namespace chessvec {

namespace {

bool is_blank(std::string_view s) {
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

bool is_terminator(std::string_view w) { return w == "1-0" || w == "0-1" || w == "1/2-1/2" || w == "*"; }

// [Name "Value"] with \" and \\ escapes inside the value.
std::optional<std::pair<std::string, std::string>> parse_tag(std::string_view line) {
  std::size_t i = line.find('[');
  if (i == std::string_view::npos) return std::nullopt;
  ++i;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  std::size_t name_start = i;
  while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '"') ++i;
  std::string name(line.substr(name_start, i - name_start));
  std::size_t q = line.find('"', i);
  if (name.empty() || q == std::string_view::npos) return std::nullopt;
  std::string value;
  for (i = q + 1; i < line.size() && line[i] != '"'; ++i) {
    if (line[i] == '\\' && i + 1 < line.size()) ++i;
    value += line[i];
  }
  return std::make_pair(std::move(name), std::move(value));
}

// Tracks comment/variation nesting across movetext lines so the splitter can
// find the game terminator.
struct MovetextScanner {
  bool in_brace = false;
  int paren = 0;
  bool terminated = false;

  void feed(std::string_view line) {
    std::string word;
    auto flush = [&] {
      if (!in_brace && paren == 0 && is_terminator(word)) terminated = true;
      word.clear();
    };
    for (char c : line) {
      if (terminated) return;
      if (in_brace) {
        if (c == '}') in_brace = false;
        continue;
      }
      if (c == '{') {
        flush();
        in_brace = true;
      } else if (c == ';') {
        flush();
        return;
      } else if (c == '(') {
        flush();
        ++paren;
      } else if (c == ')') {
        flush();
        if (paren > 0) --paren;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else {
        word += c;
      }
    }
    flush();
  }
};

}  // namespace

std::string_view result_text(GameResult r) {
  switch (r) {
    case GameResult::WhiteWin: return "1-0";
    case GameResult::BlackWin: return "0-1";
    case GameResult::Draw: return "1/2-1/2";
    case GameResult::Unknown: return "*";
  }
  return "*";
}

std::optional<GameResult> parse_result(std::string_view text) {
  if (text == "1-0") return GameResult::WhiteWin;
  if (text == "0-1") return GameResult::BlackWin;
  if (text == "1/2-1/2") return GameResult::Draw;
  if (text == "*") return GameResult::Unknown;
  return std::nullopt;
}

std::optional<std::string> GameRecord::header(std::string_view name) const {
  for (const auto& [k, v] : headers)
    if (k == name) return v;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Splitting

bool PgnSplitter::read_line(std::string& line) {
  if (!std::getline(in_, line)) return false;
  offset_ += line.size() + 1;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::optional<RawGame> PgnSplitter::next() {
  std::string line;
  std::uint64_t line_offset = 0;
  auto fetch = [&]() -> bool {
    if (pending_) {
      line = std::move(*pending_);
      line_offset = pending_offset_;
      pending_.reset();
      return true;
    }
    line_offset = offset_;
    return read_line(line);
  };

  // Skip blank lines and escapes before the game.
  do {
    if (!fetch()) return std::nullopt;
  } while (is_blank(line) || line[0] == '%');

  RawGame game;
  game.byte_offset = line_offset;
  game.game_index = index_++;

  bool have_line = true;
  while (have_line && line[0] == '[') {
    if (auto tag = parse_tag(line)) game.headers.push_back(std::move(*tag));
    have_line = fetch();
    while (have_line && is_blank(line)) have_line = fetch();
  }

  MovetextScanner scan;
  while (have_line) {
    if (!line.empty() && line[0] == '%') {
      have_line = fetch();
      continue;
    }
    const bool tag_line = !line.empty() && line[0] == '[';
    if (tag_line && ((!scan.in_brace && scan.paren == 0) || line.rfind("[Event ", 0) == 0)) {
      pending_ = std::move(line);
      pending_offset_ = line_offset;
      break;
    }
    scan.feed(line);
    game.movetext += line;
    game.movetext += '\n';
    if (scan.terminated) break;
    have_line = fetch();
  }
  return game;
}

// ---------------------------------------------------------------------------
// Movetext

GameItem parse_game(const RawGame& raw) {
  GameRecord record;
  record.headers = raw.headers;
  if (auto tag = record.header("Result"))
    if (auto r = parse_result(*tag)) record.result = *r;

  auto fail = [&](int ply, std::string msg) -> GameItem {
    return GameError{raw.byte_offset, raw.game_index, ply, std::move(msg)};
  };

  Board board = Board::initial();
  std::optional<bool> long_form;
  const std::string& text = raw.movetext;
  std::size_t i = 0;
  int brace = 0, paren = 0;
  int ply = 0;
  while (i < text.size()) {
    char c = text[i];
    if (brace) {
      if (c == '}') brace = 0;
      ++i;
      continue;
    }
    if (c == '{') {
      brace = 1;
      ++i;
      continue;
    }
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '(') {
      ++paren;
      ++i;
      continue;
    }
    if (c == ')') {
      if (paren > 0) --paren;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '{' &&
           text[i] != '(' && text[i] != ')' && text[i] != ';')
      ++i;
    if (paren > 0) continue;
    std::string_view word(text.data() + start, i - start);

    if (is_terminator(word)) {
      if (word != "*") record.result = *parse_result(word);
      break;
    }
    if (word[0] == '$') continue;  // NAG
    // Move number prefix: "12." "12..." possibly glued to the move ("1.e4").
    std::size_t k = 0;
    while (k < word.size() && std::isdigit(static_cast<unsigned char>(word[k]))) ++k;
    if (k > 0 && k < word.size() && word[k] == '.') {
      while (k < word.size() && word[k] == '.') ++k;
      word.remove_prefix(k);
    } else if (k == word.size()) {
      continue;  // bare number
    }
    while (!word.empty() && word[0] == '.') word.remove_prefix(1);
    if (word.empty()) continue;
    if (word.find_first_not_of("!?") == std::string_view::npos) continue;  // stand-alone glyph

    ++ply;
    if (!long_form) long_form = looks_long_algebraic(word);
    try {
      Move m = *long_form ? parse_long_algebraic(board, word) : parse_san(board, word);
      board = board.apply(m);
      record.moves.push_back(m);
    } catch (const ChessError& e) {
      return fail(ply, "ply " + std::to_string(ply) + ": " + e.what());
    }
  }
  if (brace) return fail(0, "unterminated comment");
  return record;
}

std::optional<GameItem> PgnReader::next() {
  while (auto raw = splitter_.next()) {
    GameItem item = parse_game(*raw);
    if (auto* g = std::get_if<GameRecord>(&item); g && g->moves.empty()) {
      ++skipped_empty_;
      continue;
    }
    return item;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Replay and store

std::vector<Step> replay(const GameRecord& game) {
  std::vector<Step> steps;
  steps.reserve(game.moves.size());
  Board board = Board::initial();
  for (std::size_t i = 0; i < game.moves.size(); ++i) {
    try {
      auto [next, step] = apply_move(board, game.moves[i]);
      step.ply_index = static_cast<int>(i) + 1;
      step.fullmove_number = (step.ply_index + 1) / 2;
      steps.push_back(std::move(step));
      board = next;
    } catch (const IllegalMove& e) {
      throw IllegalMove(std::string(e.what()) + " at ply " + std::to_string(i + 1), static_cast<int>(i) + 1);
    }
  }
  return steps;
}

void write_pgn(std::ostream& out, const GameRecord& game) {
  bool has_result = false;
  for (const auto& [k, v] : game.headers) {
    out << '[' << k << " \"" << v << "\"]\n";
    has_result = has_result || k == "Result";
  }
  if (!has_result) out << "[Result \"" << result_text(game.result) << "\"]\n";
  out << '\n';
  std::string line;
  auto emit = [&](const std::string& word) {
    if (!line.empty() && line.size() + 1 + word.size() > 80) {
      out << line << '\n';
      line.clear();
    }
    if (!line.empty()) line += ' ';
    line += word;
  };
  Board board = Board::initial();
  for (std::size_t i = 0; i < game.moves.size(); ++i) {
    if (i % 2 == 0) emit(std::to_string(i / 2 + 1) + ".");
    emit(san_of(board, game.moves[i]));
    board = board.apply(game.moves[i]);
  }
  emit(std::string(result_text(game.result)));
  out << line << "\n\n";
}

std::string store_line(const GameRecord& game) {
  std::string out(result_text(game.result));
  out += '\t';
  Board board = Board::initial();
  bool first = true;
  for (const Move& m : game.moves) {
    Step step;
    step.board_before = board;
    step.move = m;
    step.moved_piece = *board.at(m.from);
    if (m.is_capture) step.captured = m.is_en_passant ? Piece{opposite(board.side_to_move()), PieceKind::Pawn}
                                                      : *board.at(m.to);
    if (!first) out += ' ';
    out += encode_move(step, {});
    first = false;
    board = board.apply(m);
  }
  return out;
}

void write_store_line(std::ostream& out, const GameRecord& game) { out << store_line(game) << '\n'; }

GameItem parse_store_line(std::string_view line, std::size_t game_index, std::uint64_t byte_offset) {
  auto fail = [&](int ply, std::string msg) -> GameItem { return GameError{byte_offset, game_index, ply, std::move(msg)}; };
  auto tab = line.find('\t');
  if (tab == std::string_view::npos) return fail(0, "store line has no tab separator");
  auto result = parse_result(line.substr(0, tab));
  if (!result) return fail(0, "bad result field '" + std::string(line.substr(0, tab)) + "'");

  GameRecord record;
  record.result = *result;
  Board board = Board::initial();
  std::string_view rest = line.substr(tab + 1);
  int ply = 0;
  while (!rest.empty()) {
    auto sp = rest.find(' ');
    std::string_view tok = rest.substr(0, sp);
    rest = sp == std::string_view::npos ? std::string_view{} : rest.substr(sp + 1);
    if (tok.empty()) continue;
    ++ply;
    try {
      Move m = parse_long_algebraic(board, tok);
      board = board.apply(m);
      record.moves.push_back(m);
    } catch (const ChessError& e) {
      return fail(ply, "ply " + std::to_string(ply) + ": " + e.what());
    }
  }
  return record;
}

std::optional<std::pair<std::string, std::uint64_t>> StoreReader::next_line() {
  std::string line;
  while (true) {
    std::uint64_t at = offset_;
    if (!std::getline(in_, line)) return std::nullopt;
    offset_ += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    return std::make_pair(std::move(line), at);
  }
}

std::optional<GameItem> StoreReader::next() {
  auto l = next_line();
  if (!l) return std::nullopt;
  return parse_store_line(l->first, index_++, l->second);
}

}  // namespace chessvec
