#include "chessvec/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace chessvec {

namespace {

constexpr double kValue[6] = {1.0, 3.0, 3.2, 5.0, 9.0, 0.0};

double value(PieceKind k) { return kValue[static_cast<int>(k)]; }

double material(const Board& b, Color c) {
  double total = 0;
  for (int i = 0; i < 64; ++i) {
    auto p = b.at(Square::from_index(i));
    if (p && p->color == c) total += value(p->kind);
  }
  return total;
}

int non_pawn_pieces(const Board& b) {
  int n = 0;
  for (int i = 0; i < 64; ++i) {
    auto p = b.at(Square::from_index(i));
    if (p && p->kind != PieceKind::Pawn && p->kind != PieceKind::King) ++n;
  }
  return n;
}

bool insufficient(const Board& b) {
  int minors = 0;
  for (int i = 0; i < 64; ++i) {
    auto p = b.at(Square::from_index(i));
    if (!p || p->kind == PieceKind::King) continue;
    if (p->kind == PieceKind::Knight || p->kind == PieceKind::Bishop)
      ++minors;
    else
      return false;
  }
  return minors <= 1;
}

double centrality(Square s) {
  const double df = std::abs(s.file() - 3.5), dr = std::abs(s.rank() - 3.5);
  return 3.5 - std::max(df, dr);
}

double score_move(const Board& b, const Move& m, const Board& next, bool endgame) {
  const Piece mover = *b.at(m.from);
  const Color us = mover.color;
  const int home = us == Color::White ? 0 : 7;
  const int forward = us == Color::White ? 1 : -1;
  const int fullmove = b.fullmove_number();
  double s = 0;

  if (m.is_capture) {
    const double taken = m.is_en_passant ? 1.0 : value(b.at(m.to)->kind);
    s += 1.2 * taken;
  }
  if (m.promotion) s += m.promotion == PieceKind::Queen ? 8.0 : 1.0;

  // Moving onto an attacked, undefended square, or leaving a piece en prise.
  if (next.attacked(m.to, opposite(us))) {
    const bool defended = [&] {
      Board probe = next;
      probe.set(m.to, Piece{opposite(us), PieceKind::Pawn});
      return probe.attacked(m.to, us);
    }();
    const double mine = m.promotion ? value(*m.promotion) : value(mover.kind);
    s -= defended ? std::max(0.0, mine - 2.5) : 0.9 * mine;
  }
  if (next.in_check()) s += 0.4;

  if (!endgame) {
    if (m.castle) s += 2.5;
    if (mover.kind == PieceKind::King && !m.castle) s -= 2.0;
    if ((mover.kind == PieceKind::Knight || mover.kind == PieceKind::Bishop) && m.from.rank() == home) s += 1.0;
    if (mover.kind == PieceKind::Pawn && fullmove <= 10) {
      if (m.from.file() == 3 || m.from.file() == 4) s += 1.0;
      if (m.from.file() == 0 || m.from.file() == 7) s -= 0.6;
    }
    if (mover.kind == PieceKind::Queen && fullmove <= 8) s -= 0.8;
    if (mover.kind == PieceKind::Rook && fullmove <= 10 && !m.is_capture) s -= 0.5;
    s += 0.15 * (centrality(m.to) - centrality(m.from));
  } else {
    if (mover.kind == PieceKind::King) s += 0.35 * (centrality(m.to) - centrality(m.from));
    if (mover.kind == PieceKind::Pawn) s += 0.3 * (m.to.rank() - m.from.rank()) * forward + 0.1 * std::abs(m.to.rank() - home);
  }
  return s;
}

}  // namespace

GameRecord generate_game(std::mt19937_64& rng, const SelfPlayOptions& options) {
  GameRecord game;
  Board board = Board::initial();
  std::vector<Move> moves;
  std::vector<double> weights;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  game.result = GameResult::Draw;

  for (int ply = 0; ply < options.max_plies; ++ply) {
    legal_moves(board, moves);
    if (moves.empty()) {
      if (board.in_check())
        game.result = board.side_to_move() == Color::White ? GameResult::BlackWin : GameResult::WhiteWin;
      break;
    }
    if (board.halfmove_clock() >= 100 || insufficient(board)) break;

    const bool endgame = non_pawn_pieces(board) <= 6;
    weights.resize(moves.size());
    double best = -1e9;
    for (std::size_t i = 0; i < moves.size(); ++i) {
      Board next = board.apply(moves[i]);
      if (next.in_check() && legal_moves(next).empty()) {
        weights[i] = 1e6;  // always take mate in one
      } else {
        weights[i] = score_move(board, moves[i], next, endgame);
      }
      best = std::max(best, weights[i]);
    }
    double total = 0;
    for (double& w : weights) {
      w = std::exp((w - best) / options.temperature);
      total += w;
    }
    double pick = unit(rng) * total;
    std::size_t chosen = moves.size() - 1;
    for (std::size_t i = 0; i < moves.size(); ++i) {
      pick -= weights[i];
      if (pick <= 0) {
        chosen = i;
        break;
      }
    }
    game.moves.push_back(moves[chosen]);
    board = board.apply(moves[chosen]);
  }

  if (game.result == GameResult::Draw && !legal_moves(board).empty()) {
    const double lead = material(board, Color::White) - material(board, Color::Black);
    if (lead >= options.adjudicate_margin) game.result = GameResult::WhiteWin;
    if (lead <= -options.adjudicate_margin) game.result = GameResult::BlackWin;
  }
  game.headers = {{"Event", "self-play"}, {"Result", std::string(result_text(game.result))}};
  return game;
}

std::vector<GameRecord> generate_games(std::size_t count, std::uint64_t seed, const SelfPlayOptions& options) {
  std::mt19937_64 rng(seed);
  std::vector<GameRecord> games;
  games.reserve(count);
  for (std::size_t i = 0; i < count; ++i) games.push_back(generate_game(rng, options));
  return games;
}

}  // namespace chessvec
