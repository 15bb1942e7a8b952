#include "chessvec/chess.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace chessvec {

namespace {

constexpr std::uint8_t encode(Piece p) {
  return static_cast<std::uint8_t>(1 + static_cast<int>(p.color) * 6 + static_cast<int>(p.kind));
}

constexpr Piece decode(std::uint8_t code) {
  return Piece{static_cast<Color>((code - 1) / 6), static_cast<PieceKind>((code - 1) % 6)};
}

constexpr int kKnightDf[8] = {1, 2, 2, 1, -1, -2, -2, -1};
constexpr int kKnightDr[8] = {2, 1, -1, -2, -2, -1, 1, 2};
constexpr int kKingDf[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kKingDr[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDiagDf[4] = {1, 1, -1, -1};
constexpr int kDiagDr[4] = {1, -1, 1, -1};
constexpr int kOrthDf[4] = {1, -1, 0, 0};
constexpr int kOrthDr[4] = {0, 0, 1, -1};

Move basic_move(Square from, Square to) {
  Move m;
  m.from = from;
  m.to = to;
  return m;
}

constexpr bool on_board(int f, int r) { return f >= 0 && f < 8 && r >= 0 && r < 8; }

constexpr PieceKind kPromotionKinds[4] = {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop, PieceKind::Knight};

}  // namespace

char kind_letter(PieceKind kind) {
  static constexpr char kLetters[6] = {'P', 'N', 'B', 'R', 'Q', 'K'};
  return kLetters[static_cast<int>(kind)];
}

std::optional<PieceKind> kind_from_letter(char upper) {
  switch (upper) {
    case 'P': return PieceKind::Pawn;
    case 'N': return PieceKind::Knight;
    case 'B': return PieceKind::Bishop;
    case 'R': return PieceKind::Rook;
    case 'Q': return PieceKind::Queen;
    case 'K': return PieceKind::King;
    default: return std::nullopt;
  }
}

std::optional<Square> Square::parse(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  int f = text[0] - 'a';
  int r = text[1] - '1';
  if (!on_board(f, r)) return std::nullopt;
  return Square(f, r);
}

std::string Square::str() const {
  return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
}

char Piece::letter() const {
  char c = kind_letter(kind);
  return color == Color::White ? c : static_cast<char>(std::tolower(c));
}

std::optional<Piece> Piece::from_letter(char c) {
  bool white = std::isupper(static_cast<unsigned char>(c)) != 0;
  auto kind = kind_from_letter(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (!kind) return std::nullopt;
  return Piece{white ? Color::White : Color::Black, *kind};
}

std::string Move::uci() const {
  std::string s = from.str() + to.str();
  if (promotion) s += static_cast<char>(std::tolower(kind_letter(*promotion)));
  return s;
}

// ---------------------------------------------------------------------------
// Board

Board Board::empty() {
  Board b;
  b.castling_ = CastlingRights{false, false, false, false};
  return b;
}

Board Board::initial() {
  Board b;
  static constexpr PieceKind kBackRank[8] = {PieceKind::Rook, PieceKind::Knight, PieceKind::Bishop, PieceKind::Queen,
                                             PieceKind::King, PieceKind::Bishop, PieceKind::Knight, PieceKind::Rook};
  for (int f = 0; f < 8; ++f) {
    b.set(Square(f, 0), Piece{Color::White, kBackRank[f]});
    b.set(Square(f, 1), Piece{Color::White, PieceKind::Pawn});
    b.set(Square(f, 6), Piece{Color::Black, PieceKind::Pawn});
    b.set(Square(f, 7), Piece{Color::Black, kBackRank[f]});
  }
  return b;
}

Board Board::from_fen(std::string_view fen) {
  Board b = empty();
  std::size_t i = 0;
  int rank = 7, file = 0;
  for (; i < fen.size() && fen[i] != ' '; ++i) {
    char c = fen[i];
    if (c == '/') {
      --rank;
      file = 0;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      file += c - '0';
    } else {
      auto p = Piece::from_letter(c);
      if (!p || !on_board(file, rank)) throw ChessError("bad FEN placement: " + std::string(fen));
      b.set(Square(file, rank), *p);
      ++file;
    }
  }
  auto next_field = [&]() -> std::string_view {
    while (i < fen.size() && fen[i] == ' ') ++i;
    std::size_t start = i;
    while (i < fen.size() && fen[i] != ' ') ++i;
    return fen.substr(start, i - start);
  };
  std::string_view side = next_field();
  b.side_ = side == "b" ? Color::Black : Color::White;
  for (char c : next_field()) {
    if (c == 'K') b.castling_.white_king = true;
    if (c == 'Q') b.castling_.white_queen = true;
    if (c == 'k') b.castling_.black_king = true;
    if (c == 'q') b.castling_.black_queen = true;
  }
  std::string_view ep = next_field();
  if (!ep.empty() && ep != "-") b.ep_ = Square::parse(ep);
  std::string_view half = next_field();
  if (!half.empty()) b.halfmove_ = std::atoi(std::string(half).c_str());
  std::string_view full = next_field();
  if (!full.empty()) b.fullmove_ = std::max(1, std::atoi(std::string(full).c_str()));
  return b;
}

std::optional<Piece> Board::at(Square sq) const {
  std::uint8_t c = cells_[sq.index()];
  if (c == 0) return std::nullopt;
  return decode(c);
}

void Board::set(Square sq, std::optional<Piece> piece) { cells_[sq.index()] = piece ? encode(*piece) : 0; }

int Board::occupied_count() const {
  return static_cast<int>(std::count_if(cells_.begin(), cells_.end(), [](std::uint8_t c) { return c != 0; }));
}

int Board::count(Piece piece) const {
  return static_cast<int>(std::count(cells_.begin(), cells_.end(), encode(piece)));
}

int Board::queen_count() const {
  return count({Color::White, PieceKind::Queen}) + count({Color::Black, PieceKind::Queen});
}

std::optional<Square> Board::king_square(Color c) const {
  const std::uint8_t code = encode({c, PieceKind::King});
  for (int i = 0; i < 64; ++i)
    if (cells_[i] == code) return Square::from_index(i);
  return std::nullopt;
}

bool Board::attacked(Square sq, Color by) const {
  const int f0 = sq.file(), r0 = sq.rank();
  auto is = [&](int f, int r, PieceKind k) { return cells_[r * 8 + f] == encode({by, k}); };

  const int pawn_dir = by == Color::White ? -1 : 1;  // attacker sits behind the target
  for (int df : {-1, 1}) {
    int f = f0 + df, r = r0 + pawn_dir;
    if (on_board(f, r) && is(f, r, PieceKind::Pawn)) return true;
  }
  for (int i = 0; i < 8; ++i) {
    int f = f0 + kKnightDf[i], r = r0 + kKnightDr[i];
    if (on_board(f, r) && is(f, r, PieceKind::Knight)) return true;
    f = f0 + kKingDf[i];
    r = r0 + kKingDr[i];
    if (on_board(f, r) && is(f, r, PieceKind::King)) return true;
  }
  auto ray = [&](const int* dfs, const int* drs, PieceKind slider) {
    for (int d = 0; d < 4; ++d) {
      for (int f = f0 + dfs[d], r = r0 + drs[d]; on_board(f, r); f += dfs[d], r += drs[d]) {
        std::uint8_t c = cells_[r * 8 + f];
        if (c == 0) continue;
        if (c == encode({by, slider}) || c == encode({by, PieceKind::Queen})) return true;
        break;
      }
    }
    return false;
  };
  return ray(kDiagDf, kDiagDr, PieceKind::Bishop) || ray(kOrthDf, kOrthDr, PieceKind::Rook);
}

bool Board::in_check() const {
  auto k = king_square(side_);
  return k && attacked(*k, opposite(side_));
}

Board Board::apply(const Move& m) const {
  Board n = *this;
  const std::uint8_t mover_code = cells_[m.from.index()];
  const Piece mover = decode(mover_code);
  const bool capture = cells_[m.to.index()] != 0 || m.is_en_passant;

  if (m.is_en_passant) n.cells_[Square(m.to.file(), m.from.rank()).index()] = 0;
  n.cells_[m.to.index()] = m.promotion ? encode({mover.color, *m.promotion}) : mover_code;
  n.cells_[m.from.index()] = 0;
  if (m.castle) {
    const int r = m.from.rank();
    const int rook_from = *m.castle == Castle::KingSide ? 7 : 0;
    const int rook_to = *m.castle == Castle::KingSide ? 5 : 3;
    n.cells_[Square(rook_to, r).index()] = n.cells_[Square(rook_from, r).index()];
    n.cells_[Square(rook_from, r).index()] = 0;
  }

  n.ep_.reset();
  if (mover.kind == PieceKind::Pawn && std::abs(m.to.rank() - m.from.rank()) == 2)
    n.ep_ = Square(m.from.file(), (m.from.rank() + m.to.rank()) / 2);

  auto touch = [&](Square s) {
    if (s == Square(4, 0)) n.castling_.white_king = n.castling_.white_queen = false;
    if (s == Square(4, 7)) n.castling_.black_king = n.castling_.black_queen = false;
    if (s == Square(0, 0)) n.castling_.white_queen = false;
    if (s == Square(7, 0)) n.castling_.white_king = false;
    if (s == Square(0, 7)) n.castling_.black_queen = false;
    if (s == Square(7, 7)) n.castling_.black_king = false;
  };
  touch(m.from);
  touch(m.to);

  n.halfmove_ = (mover.kind == PieceKind::Pawn || capture) ? 0 : halfmove_ + 1;
  if (side_ == Color::Black) ++n.fullmove_;
  n.side_ = opposite(side_);
  return n;
}

// ---------------------------------------------------------------------------
// Move generation

namespace {

// Emits pseudo-legal moves of the side to move for the piece on `from`.
template <typename Sink>
void piece_moves(const Board& b, Square from, Piece p, Sink&& emit) {
  const Color us = p.color;
  const int f0 = from.file(), r0 = from.rank();
  auto target = [&](int f, int r) -> int {  // 0 empty, 1 enemy, 2 own
    auto q = b.at(Square(f, r));
    if (!q) return 0;
    return q->color == us ? 2 : 1;
  };
  auto step = [&](const int* dfs, const int* drs, int n) {
    for (int i = 0; i < n; ++i) {
      int f = f0 + dfs[i], r = r0 + drs[i];
      if (!on_board(f, r)) continue;
      int t = target(f, r);
      if (t == 2) continue;
      Move m = basic_move(from, Square(f, r));
      m.is_capture = t == 1;
      emit(m);
    }
  };
  auto slide = [&](const int* dfs, const int* drs) {
    for (int d = 0; d < 4; ++d) {
      for (int f = f0 + dfs[d], r = r0 + drs[d]; on_board(f, r); f += dfs[d], r += drs[d]) {
        int t = target(f, r);
        if (t == 2) break;
        Move m = basic_move(from, Square(f, r));
        m.is_capture = t == 1;
        emit(m);
        if (t == 1) break;
      }
    }
  };

  switch (p.kind) {
    case PieceKind::Knight: step(kKnightDf, kKnightDr, 8); break;
    case PieceKind::Bishop: slide(kDiagDf, kDiagDr); break;
    case PieceKind::Rook: slide(kOrthDf, kOrthDr); break;
    case PieceKind::Queen:
      slide(kDiagDf, kDiagDr);
      slide(kOrthDf, kOrthDr);
      break;
    case PieceKind::King: {
      step(kKingDf, kKingDr, 8);
      const CastlingRights& cr = b.castling();
      const int home = us == Color::White ? 0 : 7;
      if (from != Square(4, home)) break;
      const Color them = opposite(us);
      const bool ks = us == Color::White ? cr.white_king : cr.black_king;
      const bool qs = us == Color::White ? cr.white_queen : cr.black_queen;
      const Piece rook{us, PieceKind::Rook};
      if (ks && b.at(Square(7, home)) == rook && !b.at(Square(5, home)) && !b.at(Square(6, home)) &&
          !b.attacked(from, them) && !b.attacked(Square(5, home), them) && !b.attacked(Square(6, home), them)) {
        Move m = basic_move(from, Square(6, home));
        m.castle = Castle::KingSide;
        emit(m);
      }
      if (qs && b.at(Square(0, home)) == rook && !b.at(Square(1, home)) && !b.at(Square(2, home)) &&
          !b.at(Square(3, home)) && !b.attacked(from, them) && !b.attacked(Square(3, home), them) &&
          !b.attacked(Square(2, home), them)) {
        Move m = basic_move(from, Square(2, home));
        m.castle = Castle::QueenSide;
        emit(m);
      }
      break;
    }
    case PieceKind::Pawn: {
      const int dir = us == Color::White ? 1 : -1;
      const int start = us == Color::White ? 1 : 6;
      const int last = us == Color::White ? 7 : 0;
      auto push = [&](Move m) {
        if (m.to.rank() == last) {
          for (PieceKind k : kPromotionKinds) {
            m.promotion = k;
            emit(m);
          }
        } else {
          emit(m);
        }
      };
      const int r1 = r0 + dir;
      if (!on_board(f0, r1)) break;
      if (target(f0, r1) == 0) {
        push(basic_move(from, Square(f0, r1)));
        if (r0 == start && target(f0, r1 + dir) == 0) emit(basic_move(from, Square(f0, r1 + dir)));
      }
      for (int df : {-1, 1}) {
        const int f = f0 + df;
        if (!on_board(f, r1)) continue;
        const Square to(f, r1);
        if (target(f, r1) == 1) {
          Move m = basic_move(from, to);
          m.is_capture = true;
          push(m);
        } else if (b.en_passant_target() == to) {
          Move m = basic_move(from, to);
          m.is_capture = true;
          m.is_en_passant = true;
          emit(m);
        }
      }
      break;
    }
  }
}

bool leaves_king_safe(const Board& b, const Move& m) {
  const Color us = b.side_to_move();
  Board n = b.apply(m);
  auto k = n.king_square(us);
  return !k || !n.attacked(*k, opposite(us));
}

}  // namespace

void legal_moves(const Board& board, std::vector<Move>& out) {
  out.clear();
  const Color us = board.side_to_move();
  for (int i = 0; i < 64; ++i) {
    const Square from = Square::from_index(i);
    auto p = board.at(from);
    if (!p || p->color != us) continue;
    piece_moves(board, from, *p, [&](const Move& m) {
      if (leaves_king_safe(board, m)) out.push_back(m);
    });
  }
}

std::vector<Move> legal_moves(const Board& board) {
  std::vector<Move> out;
  legal_moves(board, out);
  return out;
}

void legal_moves_to(const Board& board, Square to, std::optional<PieceKind> kind, std::vector<Move>& out) {
  out.clear();
  const Color us = board.side_to_move();
  for (int i = 0; i < 64; ++i) {
    const Square from = Square::from_index(i);
    auto p = board.at(from);
    if (!p || p->color != us || (kind && p->kind != *kind)) continue;
    piece_moves(board, from, *p, [&](const Move& m) {
      if (m.to == to && leaves_king_safe(board, m)) out.push_back(m);
    });
  }
}

bool is_legal(const Board& board, const Move& move) {
  std::vector<Move> candidates;
  legal_moves_to(board, move.to, std::nullopt, candidates);
  return std::find(candidates.begin(), candidates.end(), move) != candidates.end();
}

std::pair<Board, Step> apply_move(const Board& board, const Move& move) {
  if (!is_legal(board, move)) throw IllegalMove("illegal move " + move.uci());
  Step step;
  step.board_before = board;
  step.move = move;
  step.moved_piece = *board.at(move.from);
  step.fullmove_number = board.fullmove_number();
  step.ply_index = (board.fullmove_number() - 1) * 2 + (board.side_to_move() == Color::White ? 1 : 2);
  if (move.is_en_passant)
    step.captured = Piece{opposite(board.side_to_move()), PieceKind::Pawn};
  else if (move.is_capture)
    step.captured = board.at(move.to);
  return {board.apply(move), step};
}

std::uint64_t perft(const Board& board, int depth) {
  if (depth == 0) return 1;
  std::vector<Move> moves;
  legal_moves(board, moves);
  if (depth == 1) return moves.size();
  std::uint64_t total = 0;
  for (const Move& m : moves) total += perft(board.apply(m), depth - 1);
  return total;
}

Board initial_board() { return Board::initial(); }

// ---------------------------------------------------------------------------
// Notation

std::string san_of(const Board& board, const Move& move) {
  const Piece p = *board.at(move.from);
  std::string s;
  if (move.castle) {
    s = *move.castle == Castle::KingSide ? "O-O" : "O-O-O";
  } else if (p.kind == PieceKind::Pawn) {
    if (move.is_capture) {
      s += static_cast<char>('a' + move.from.file());
      s += 'x';
    }
    s += move.to.str();
    if (move.promotion) {
      s += '=';
      s += kind_letter(*move.promotion);
    }
  } else {
    s += kind_letter(p.kind);
    std::vector<Move> rivals;
    legal_moves_to(board, move.to, p.kind, rivals);
    bool clash = false, same_file = false, same_rank = false;
    for (const Move& r : rivals) {
      if (r.from == move.from) continue;
      clash = true;
      if (r.from.file() == move.from.file()) same_file = true;
      if (r.from.rank() == move.from.rank()) same_rank = true;
    }
    if (clash) {
      if (!same_file)
        s += static_cast<char>('a' + move.from.file());
      else if (!same_rank)
        s += static_cast<char>('1' + move.from.rank());
      else
        s += move.from.str();
    }
    if (move.is_capture) s += 'x';
    s += move.to.str();
  }
  Board next = board.apply(move);
  if (next.in_check()) s += legal_moves(next).empty() ? '#' : '+';
  return s;
}

Move parse_san(const Board& board, std::string_view text) {
  const std::string original(text);
  while (!text.empty() && (text.back() == '+' || text.back() == '#' || text.back() == '!' || text.back() == '?'))
    text.remove_suffix(1);
  if (text.empty()) throw SanError(SanError::Kind::Malformed, "empty SAN");

  std::vector<Move> candidates;
  if (text == "O-O" || text == "0-0" || text == "O-O-O" || text == "0-0-0") {
    const Castle side = text.size() == 3 ? Castle::KingSide : Castle::QueenSide;
    const int home = board.side_to_move() == Color::White ? 0 : 7;
    legal_moves_to(board, Square(side == Castle::KingSide ? 6 : 2, home), PieceKind::King, candidates);
    for (const Move& m : candidates)
      if (m.castle == side) return m;
    throw SanError(SanError::Kind::NoLegalMatch, "no legal move for SAN '" + original + "'");
  }

  PieceKind kind = PieceKind::Pawn;
  std::size_t i = 0;
  if (auto k = kind_from_letter(text[0]); k && text[0] != 'P') {
    kind = *k;
    i = 1;
  } else if (text[0] == 'P') {
    i = 1;
  }

  std::optional<PieceKind> promo;
  if (auto eq = text.find('='); eq != std::string_view::npos) {
    if (eq + 2 != text.size()) throw SanError(SanError::Kind::Malformed, "malformed promotion in '" + original + "'");
    promo = kind_from_letter(text[eq + 1]);
    if (!promo || *promo == PieceKind::King || *promo == PieceKind::Pawn)
      throw SanError(SanError::Kind::Malformed, "bad promotion piece in '" + original + "'");
    text = text.substr(0, eq);
  } else if (kind == PieceKind::Pawn && text.size() >= 3 && kind_from_letter(text.back()) &&
             std::isdigit(static_cast<unsigned char>(text[text.size() - 2]))) {
    // "e8Q" without '='
    promo = kind_from_letter(text.back());
    text.remove_suffix(1);
  }

  std::string_view body = text.substr(i);
  std::string filtered;
  filtered.reserve(body.size());
  bool capture_marked = false;
  for (char c : body) {
    if (c == 'x' || c == ':') {
      capture_marked = true;
      continue;
    }
    if (c == '-') continue;
    filtered += c;
  }
  if (filtered.size() < 2 || filtered.size() > 4)
    throw SanError(SanError::Kind::Malformed, "malformed SAN '" + original + "'");
  auto to = Square::parse(std::string_view(filtered).substr(filtered.size() - 2));
  if (!to) throw SanError(SanError::Kind::Malformed, "bad destination in '" + original + "'");
  std::optional<int> from_file, from_rank;
  for (char c : std::string_view(filtered).substr(0, filtered.size() - 2)) {
    if (c >= 'a' && c <= 'h')
      from_file = c - 'a';
    else if (c >= '1' && c <= '8')
      from_rank = c - '1';
    else
      throw SanError(SanError::Kind::Malformed, "bad disambiguator in '" + original + "'");
  }

  legal_moves_to(board, *to, kind, candidates);
  const Move* found = nullptr;
  for (const Move& m : candidates) {
    if (from_file && m.from.file() != *from_file) continue;
    if (from_rank && m.from.rank() != *from_rank) continue;
    if (m.promotion != promo) continue;
    if (m.castle) continue;  // king two-square moves only via O-O notation
    if (capture_marked && !m.is_capture) continue;
    if (found) throw SanError(SanError::Kind::Ambiguous, "ambiguous SAN '" + original + "'");
    found = &m;
  }
  if (!found) throw SanError(SanError::Kind::NoLegalMatch, "no legal move for SAN '" + original + "'");
  return *found;
}

bool looks_long_algebraic(std::string_view t) {
  if (t.size() != 5 && t.size() != 6) return false;
  if (!Piece::from_letter(t[0])) return false;
  if (!Square::parse(t.substr(1, 2)) || !Square::parse(t.substr(3, 2))) return false;
  return t.size() == 5 || Piece::from_letter(t[5]).has_value();
}

Move parse_long_algebraic(const Board& board, std::string_view text) {
  if (!looks_long_algebraic(text))
    throw SanError(SanError::Kind::Malformed, "malformed move token '" + std::string(text) + "'");
  const Piece p = *Piece::from_letter(text[0]);
  const Square from = *Square::parse(text.substr(1, 2));
  const Square to = *Square::parse(text.substr(3, 2));
  std::optional<PieceKind> promo;
  if (text.size() == 6) promo = Piece::from_letter(text[5])->kind;
  if (p.color != board.side_to_move() || board.at(from) != p)
    throw SanError(SanError::Kind::NoLegalMatch, "no " + std::string(1, p.letter()) + " on " + from.str() +
                                                     " to move for '" + std::string(text) + "'");
  std::vector<Move> candidates;
  legal_moves_to(board, to, p.kind, candidates);
  for (const Move& m : candidates)
    if (m.from == from && m.promotion == promo) return m;
  throw SanError(SanError::Kind::NoLegalMatch, "illegal move token '" + std::string(text) + "'");
}

}  // namespace chessvec
