#include "chessvec/tokens.hpp"

#include <cctype>

namespace chessvec {

namespace {

constexpr std::string_view kArrow = "->";
constexpr std::string_view kCap = "_CAP";
constexpr std::string_view kNon = "_N";

char cased(PieceKind kind, Color color) { return Piece{color, kind}.letter(); }

// Parses without throwing; `why` receives the reason on failure.
std::optional<Token> parse_impl(std::string_view text, ShortForm short_form, std::string& why) {
  Token t;
  std::string_view s = text;
  if (s.starts_with(kArrow)) {
    t.arrow = true;
    s.remove_prefix(kArrow.size());
  }
  if (s.ends_with(kCap)) {
    t.pos_tag = PosTag::Capture;
    s.remove_suffix(kCap.size());
  } else if (s.ends_with(kNon)) {
    t.pos_tag = PosTag::Normal;
    s.remove_suffix(kNon.size());
  }
  if (s.empty()) {
    why = "empty token";
    return std::nullopt;
  }
  auto piece = Piece::from_letter(s[0]);
  if (!piece) {
    why = "bad piece letter";
    return std::nullopt;
  }
  t.piece = *piece;

  std::size_t core = s.size();
  // Promotion letter: a trailing piece letter after a full square.
  if ((core == 4 || core == 6) && Piece::from_letter(s.back())) {
    auto promo = Piece::from_letter(s.back());
    if (promo->color != piece->color || piece->kind != PieceKind::Pawn || promo->kind == PieceKind::Pawn ||
        promo->kind == PieceKind::King) {
      why = "bad promotion suffix";
      return std::nullopt;
    }
    t.promotion = promo->kind;
    --core;
  }

  if (core == 5) {
    auto from = Square::parse(s.substr(1, 2));
    auto to = Square::parse(s.substr(3, 2));
    if (!from || !to) {
      why = "bad square";
      return std::nullopt;
    }
    if (*from == *to) {
      why = "origin equals destination";
      return std::nullopt;
    }
    t.kind = TokenKind::Move;
    t.from = from;
    t.to = *to;
  } else if (core == 3) {
    auto to = Square::parse(s.substr(1, 2));
    if (!to) {
      why = "bad square";
      return std::nullopt;
    }
    t.to = *to;
    const bool affixed = t.arrow || t.pos_tag != PosTag::None || t.promotion;
    t.kind = (affixed || short_form == ShortForm::Lemma) ? TokenKind::Lemma : TokenKind::Position;
  } else {
    why = "unexpected length";
    return std::nullopt;
  }

  if (t.promotion) {
    const int last = t.piece.color == Color::White ? 7 : 0;
    if (t.to.rank() != last) {
      why = "promotion off the last rank";
      return std::nullopt;
    }
  }
  return t;
}

}  // namespace

std::string encode_move(const Step& step, EncodeOptions opts) {
  std::string s;
  s.reserve(12);
  if (opts.arrow) s += kArrow;
  s += step.moved_piece.letter();
  if (!opts.lemma) s += step.move.from.str();
  s += step.move.to.str();
  if (step.move.promotion) s += cased(*step.move.promotion, step.moved_piece.color);
  if (opts.pos_tags) s += (step.captured || step.move.is_capture || step.move.is_en_passant) ? kCap : kNon;
  return s;
}

void append_occupancy(const Board& board, std::vector<std::string>& out) {
  for (Color color : {Color::Black, Color::White}) {
    for (int rank = 7; rank >= 0; --rank) {
      for (int file = 0; file < 8; ++file) {
        const Square sq(file, rank);
        auto p = board.at(sq);
        if (!p || p->color != color) continue;
        std::string tok;
        tok += p->letter();
        tok += sq.str();
        out.push_back(std::move(tok));
      }
    }
  }
}

std::vector<std::string> encode_occupancy(const Board& board) {
  std::vector<std::string> out;
  out.reserve(32);
  append_occupancy(board, out);
  return out;
}

std::string lemmatize(std::string_view move_token) {
  std::string why;
  auto t = parse_impl(move_token, ShortForm::Position, why);
  if (!t) throw MalformedToken("cannot lemmatize '" + std::string(move_token) + "': " + why);
  if (t->kind != TokenKind::Move || t->arrow || t->pos_tag != PosTag::None)
    throw MalformedToken("cannot lemmatize '" + std::string(move_token) + "': not a bare move token");
  t->kind = TokenKind::Lemma;
  t->from.reset();
  return t->str();
}

std::string Token::str() const {
  std::string s;
  if (arrow) s += kArrow;
  s += piece.letter();
  if (kind == TokenKind::Move && from) s += from->str();
  s += to.str();
  if (promotion) s += cased(*promotion, piece.color);
  if (pos_tag == PosTag::Capture) s += kCap;
  if (pos_tag == PosTag::Normal) s += kNon;
  return s;
}

std::optional<Token> try_parse_token(std::string_view text, ShortForm short_form) {
  std::string why;
  return parse_impl(text, short_form, why);
}

Token parse_token(std::string_view text, ShortForm short_form) {
  std::string why;
  auto t = parse_impl(text, short_form, why);
  if (!t) throw MalformedToken("malformed token '" + std::string(text) + "': " + why);
  return *t;
}

}  // namespace chessvec
