#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "chessvec/chess.hpp"
#include "chessvec/embedding.hpp"

namespace chessvec {

struct ProjectedPoint {
  std::string token;
  double x = 0;
  double y = 0;
  std::optional<Piece> piece;  // absent for tokens outside the chess grammar
  bool labeled = false;
};

using Projection = std::vector<ProjectedPoint>;

/// One point per vocabulary token, in vocabulary order; every
/// `label_every`-th token (starting with the first) is labeled. 0 labels none.
template <typename Scalar>
Projection make_projection(const Vocabulary& vocab, const RowMatrix<Scalar>& coords, int label_every = 3) {
  Projection out;
  out.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    ProjectedPoint p;
    p.token = vocab.token(i);
    p.x = static_cast<double>(coords(static_cast<Eigen::Index>(i), 0));
    p.y = static_cast<double>(coords(static_cast<Eigen::Index>(i), 1));
    p.labeled = label_every > 0 && i % static_cast<std::size_t>(label_every) == 0;
    out.push_back(std::move(p));
  }
  return out;
}

/// Fills ProjectedPoint::piece from the token text.
void classify_pieces(Projection& projection);

struct RenderOptions {
  int width = 1000;
  int height = 1000;
  double point_size = 4;
  /// Fill colors indexed by PieceKind (pawn, knight, bishop, rook, queen, king).
  std::array<std::string, 6> palette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  std::string other_color = "#999999";
  std::string title;
};

/// SVG 1.1 scatter: fill by piece kind, circles for White, triangles for Black.
std::string render_svg(const Projection& projection, const RenderOptions& options = {});

/// Columns token,x,y,piece,color,labeled.
std::string render_csv(const Projection& projection);

std::string xml_escape(std::string_view text);

}  // namespace chessvec
