#include <doctest.h>

#include <random>
#include <set>

#include "chessvec/pgn.hpp"
#include "chessvec/tokens.hpp"
#include "test_support.hpp"

using namespace chessvec;

namespace {

Step step_for(const Board& b, const char* san) { return apply_move(b, parse_san(b, san)).second; }

}  // namespace

TEST_CASE("encode_move") {
  Board b = initial_board();
  Step e4 = step_for(b, "e4");
  CHECK(encode_move(e4, {}) == "Pe2e4");
  CHECK(encode_move(e4, {.arrow = true}) == "->Pe2e4");
  CHECK(encode_move(e4, {.pos_tags = true}) == "Pe2e4_N");
  CHECK(encode_move(e4, {.lemma = true}) == "Pe4");

  Board c = Board::from_fen("rn1qkbnr/ppp1pppp/3p3b/8/8/3P4/PPP1PPPP/RNBQKBNR w KQkq - 0 1");
  Step bxh6 = step_for(c, "Bxh6");
  CHECK(encode_move(bxh6, {.pos_tags = true}) == "Bc1h6_CAP");
  CHECK(encode_move(bxh6, {.arrow = true, .pos_tags = true}) == "->Bc1h6_CAP");

  Board ep = Board::from_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 1");
  CHECK(encode_move(step_for(ep, "exd6"), {.pos_tags = true}) == "Pe5d6_CAP");

  Board promo = Board::from_fen("4k3/8/8/8/8/8/1p6/4K3 b - - 0 1");
  CHECK(encode_move(step_for(promo, "b1=Q"), {}) == "pb2b1q");
  CHECK(encode_move(step_for(promo, "b1=N"), {.lemma = true}) == "pb1n");
}

TEST_CASE("encode_occupancy reproduces the reference sentences") {
  const auto expected = test_support::fixture_lines("sample_type2_head.txt");
  REQUIRE(expected.size() == 3);
  const auto steps = replay(test_support::sample_game());
  for (int i = 0; i < 3; ++i) {
    auto tokens = encode_occupancy(steps[i].board_before);
    std::string line;
    for (const auto& t : tokens) line += t + " ";
    line += encode_move(steps[i], {.arrow = true});
    CHECK(line == expected[i]);
  }
  CHECK(encode_occupancy(initial_board()).size() == 32);
}

TEST_CASE("lemmatize") {
  CHECK(lemmatize("Pe2e4") == "Pe4");
  CHECK(lemmatize("ng8f6") == "nf6");
  CHECK(lemmatize("Ke1g1") == "Kg1");
  CHECK(lemmatize("Pe7e8Q") == "Pe8Q");
  CHECK_THROWS_AS(lemmatize("->Pe2e4"), MalformedToken);
  CHECK_THROWS_AS(lemmatize("Pe2e4_N"), MalformedToken);
  CHECK_THROWS_AS(lemmatize("Pe4"), MalformedToken);
  CHECK_THROWS_AS(lemmatize("Xe2e4"), MalformedToken);
}

TEST_CASE("parse_token") {
  Token t = parse_token("->Bf1b5");
  CHECK(t.kind == TokenKind::Move);
  CHECK(t.piece == Piece{Color::White, PieceKind::Bishop});
  CHECK(t.from == Square::parse("f1"));
  CHECK(t.to == *Square::parse("b5"));
  CHECK(t.arrow);

  Token r = parse_token("ra8");
  CHECK(r.kind == TokenKind::Position);
  CHECK(r.piece == Piece{Color::Black, PieceKind::Rook});
  CHECK(r.to == *Square::parse("a8"));
  CHECK(parse_token("ra8", ShortForm::Lemma).kind == TokenKind::Lemma);

  Token q = parse_token("qf7f8");
  CHECK(q.kind == TokenKind::Move);
  CHECK(q.piece == Piece{Color::Black, PieceKind::Queen});

  Token cap = parse_token("kf2e2_CAP");
  CHECK(cap.pos_tag == PosTag::Capture);
  CHECK(parse_token("Bc1h6_N").pos_tag == PosTag::Normal);
  CHECK(parse_token("Pe8Q").kind == TokenKind::Lemma);
  CHECK(parse_token("Pe7e8Q").promotion == PieceKind::Queen);

  for (const char* bad : {"", "->", "Xe2e4", "Pe2e9", "Pe2e2", "Pe2e4q", "Pe6e7Q", "pe2e1K", "Pe2e4_X", "Pe", "e2e4"})
    CHECK_THROWS_AS_MESSAGE(parse_token(bad), MalformedToken, bad);
}

TEST_CASE("parse_token inverts encode_move on random replays") {
  std::mt19937_64 rng(99);
  int checked = 0;
  std::set<std::string> lemmas;
  while (checked < 100000) {
    Board b = initial_board();
    for (int ply = 0; ply < 200; ++ply) {
      auto moves = legal_moves(b);
      if (moves.empty()) break;
      auto [n, step] = apply_move(b, moves[rng() % moves.size()]);
      for (int bits = 0; bits < 8; ++bits) {
        EncodeOptions o{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0};
        const auto text = encode_move(step, o);
        const Token t = parse_token(text, o.lemma ? ShortForm::Lemma : ShortForm::Position);
        REQUIRE(t.str() == text);
        CHECK(t.piece == step.moved_piece);
        CHECK(t.to == step.move.to);
        CHECK(t.arrow == o.arrow);
        CHECK(t.promotion == step.move.promotion);
        if (o.lemma) {
          CHECK(t.kind == TokenKind::Lemma);
          CHECK_FALSE(t.from);
          if (!o.arrow && !o.pos_tags && !step.move.promotion) lemmas.insert(text);
        } else {
          CHECK(t.kind == TokenKind::Move);
          CHECK(t.from == step.move.from);
        }
        if (o.pos_tags) CHECK(t.pos_tag == (step.captured ? PosTag::Capture : PosTag::Normal));
        ++checked;
      }
      b = n;
    }
  }
  CHECK(lemmas.size() <= 768);
}

TEST_CASE("occupancy tokens are distinct and count occupied squares") {
  std::mt19937_64 rng(3);
  Board b = initial_board();
  for (int ply = 0; ply < 150; ++ply) {
    auto tokens = encode_occupancy(b);
    CHECK(static_cast<int>(tokens.size()) == b.occupied_count());
    CHECK(std::set<std::string>(tokens.begin(), tokens.end()).size() == tokens.size());
    for (const auto& t : tokens) CHECK(parse_token(t).kind == TokenKind::Position);
    auto moves = legal_moves(b);
    if (moves.empty()) break;
    b = b.apply(moves[rng() % moves.size()]);
  }
}
