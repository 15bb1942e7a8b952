#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chessvec/pgn.hpp"

#ifndef CHESSVEC_FIXTURE_DIR
#error "CHESSVEC_FIXTURE_DIR must be defined"
#endif

namespace test_support {

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(CHESSVEC_FIXTURE_DIR) + "/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> fixture_lines(const std::string& name) {
  std::istringstream in(read_fixture(name));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

inline chessvec::GameRecord sample_game() {
  std::istringstream in(read_fixture("sample_game_long.txt"));
  chessvec::PgnReader reader(in);
  auto item = reader.next();
  if (!item || !std::holds_alternative<chessvec::GameRecord>(*item)) throw std::runtime_error("sample game did not parse");
  return std::get<chessvec::GameRecord>(*item);
}

/// Sample game moves as a single space-joined line.
inline std::string sample_listing() {
  std::string joined;
  for (const auto& line : fixture_lines("sample_game_long.txt")) {
    if (!joined.empty()) joined += ' ';
    joined += line;
  }
  return joined;
}

}  // namespace test_support
