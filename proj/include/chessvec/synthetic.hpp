#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "chessvec/pgn.hpp"

namespace chessvec {

/// Weak, randomized self-play used as a stand-in game collection for tests,
/// benchmarks and desk-scale experiments. Moves are drawn from a softmax over
/// a handful of chess heuristics (material, development, king safety, pawn
/// advancement), so openings, middlegames and endings look roughly like chess.
struct SelfPlayOptions {
  int max_plies = 240;
  double temperature = 0.6;
  /// Material lead (pawns) that decides an unfinished game.
  int adjudicate_margin = 4;
};

GameRecord generate_game(std::mt19937_64& rng, const SelfPlayOptions& options = {});
std::vector<GameRecord> generate_games(std::size_t count, std::uint64_t seed, const SelfPlayOptions& options = {});

}  // namespace chessvec
