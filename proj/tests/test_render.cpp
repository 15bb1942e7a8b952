#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "chessvec/render.hpp"

using namespace chessvec;

namespace {

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

Projection sample() {
  std::vector<Vocabulary::Entry> e;
  const char* toks[] = {"Pe2e4", "Ng1f3", "ng8f6", "Bf1c4", "Nb1c3", "nb8c6", "Qd1h5", "ke8g8", "<odd&>", "Pe4"};
  for (int i = 0; i < 10; ++i) e.push_back({toks[i], std::uint64_t(100 - i)});
  Vocabulary v = Vocabulary::from_entries(e);
  RowMatrix<double> y(10, 2);
  for (int i = 0; i < 10; ++i) y(i, 0) = i, y(i, 1) = -i * 0.5;
  Projection p = make_projection(v, y, 3);
  classify_pieces(p);
  return p;
}

}  // namespace

TEST_CASE("labels every third token") {
  const Projection p = sample();
  REQUIRE(p.size() == 10);
  std::vector<std::size_t> labeled;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i].labeled) labeled.push_back(i);
  CHECK(labeled == std::vector<std::size_t>{0, 3, 6, 9});
  const std::string svg = render_svg(p);
  CHECK(count_of(svg, "font-size=\"9\"") == 1);
  // 4 label <text> elements inside the label group
  const auto g = svg.find("font-size=\"9\"");
  const auto end = svg.find("</g>", g);
  CHECK(count_of(svg.substr(g, end - g), "<text") == 4);
}

TEST_CASE("markers and colors") {
  const Projection p = sample();
  const std::string svg = render_svg(p);
  CHECK(count_of(svg, "<polygon") == 3);  // ng8f6, nb8c6, ke8g8
  CHECK(count_of(svg, "<title>") == 10);
  CHECK(svg.find("&lt;odd&amp;&gt;") != std::string::npos);
  CHECK(svg.find("<odd&>") == std::string::npos);

  // all knight moves share the knight color
  RenderOptions o;
  const std::string knight = "fill=\"" + o.palette[1] + "\"><title>";
  CHECK(count_of(svg, knight) == 4);
  CHECK(!p[8].piece);
  CHECK(p[9].piece->kind == PieceKind::Pawn);
}

TEST_CASE("csv table") {
  const std::string csv = render_csv(sample());
  std::istringstream in(csv);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 11);
  CHECK(lines[0] == "token,x,y,piece,color,labeled");
  CHECK(lines[1] == "Pe2e4,0,0,pawn,white,1");
  CHECK(lines[3] == "ng8f6,2,-1,knight,black,0");
  CHECK(lines[9] == "<odd&>,8,-4,,,0");
}

TEST_CASE("label_every 0 and 1") {
  Vocabulary v = Vocabulary::from_entries({{"a", 1}, {"b", 1}});
  RowMatrix<float> y = RowMatrix<float>::Zero(2, 2);
  for (const auto& p : make_projection(v, y, 0)) CHECK_FALSE(p.labeled);
  for (const auto& p : make_projection(v, y, 1)) CHECK(p.labeled);
}
