#include "chessvec/render.hpp"

#include <algorithm>
#include <cstdio>

#include "chessvec/tokens.hpp"

namespace chessvec {

namespace {

constexpr const char* kKindName[6] = {"pawn", "knight", "bishop", "rook", "queen", "king"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void classify_pieces(Projection& projection) {
  for (auto& p : projection) {
    auto t = try_parse_token(p.token);
    p.piece = t ? std::optional<Piece>(t->piece) : std::nullopt;
  }
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_svg(const Projection& projection, const RenderOptions& options) {
  const double margin = 40;
  const double w = options.width, h = options.height;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!projection.empty()) {
    auto [xa, xb] = std::minmax_element(projection.begin(), projection.end(), [](auto& a, auto& b) { return a.x < b.x; });
    auto [ya, yb] = std::minmax_element(projection.begin(), projection.end(), [](auto& a, auto& b) { return a.y < b.y; });
    xmin = xa->x, xmax = xb->x, ymin = ya->y, ymax = yb->y;
  }
  const double sx = (w - 2 * margin) / std::max(xmax - xmin, 1e-12);
  const double sy = (h - 2 * margin) / std::max(ymax - ymin, 1e-12);
  const double s = std::min(sx, sy);
  auto px = [&](double x) { return margin + (x - xmin) * s; };
  auto py = [&](double y) { return h - margin - (y - ymin) * s; };
  const double r = options.point_size;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(options.width) +
         "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " + std::to_string(options.width) + " " +
         std::to_string(options.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    out += "<text x=\"" + num(margin) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" +
           xml_escape(options.title) + "</text>\n";

  out += "<g stroke=\"black\" stroke-width=\"0.3\">\n";
  for (const auto& p : projection) {
    const std::string fill =
        p.piece ? options.palette[static_cast<std::size_t>(p.piece->kind)] : options.other_color;
    const double cx = px(p.x), cy = py(p.y);
    if (p.piece && p.piece->color == Color::Black) {
      out += "<polygon points=\"" + num(cx) + "," + num(cy - r) + " " + num(cx - r) + "," + num(cy + r * 0.8) + " " +
             num(cx + r) + "," + num(cy + r * 0.8) + "\" fill=\"" + fill + "\"><title>" + xml_escape(p.token) +
             "</title></polygon>\n";
    } else {
      out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + fill +
             "\"><title>" + xml_escape(p.token) + "</title></circle>\n";
    }
  }
  out += "</g>\n<g font-family=\"monospace\" font-size=\"9\" fill=\"#222222\">\n";
  for (const auto& p : projection) {
    if (!p.labeled) continue;
    out += "<text x=\"" + num(px(p.x) + r + 1) + "\" y=\"" + num(py(p.y) - r - 1) + "\">" + xml_escape(p.token) +
           "</text>\n";
  }
  out += "</g>\n";

  // Legend
  out += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k < 6; ++k) {
    const double ly = margin + 16.0 * k;
    out += "<circle cx=\"" + num(w - 110) + "\" cy=\"" + num(ly) + "\" r=\"5\" fill=\"" +
           options.palette[static_cast<std::size_t>(k)] + "\"/>";
    out += "<text x=\"" + num(w - 100) + "\" y=\"" + num(ly + 4) + "\">" + kKindName[k] + "</text>\n";
  }
  out += "<text x=\"" + num(margin) + "\" y=\"" + num(h - 12) + "\">circle = white, triangle = black</text>\n";
  out += "</g>\n</svg>\n";
  return out;
}

std::string render_csv(const Projection& projection) {
  std::string out = "token,x,y,piece,color,labeled\n";
  for (const auto& p : projection) {
    out += csv_field(p.token) + "," + full(p.x) + "," + full(p.y) + ",";
    if (p.piece) {
      out += kKindName[static_cast<int>(p.piece->kind)];
      out += p.piece->color == Color::White ? ",white," : ",black,";
    } else {
      out += ",,";
    }
    out += p.labeled ? "1\n" : "0\n";
  }
  return out;
}

}  // namespace chessvec
