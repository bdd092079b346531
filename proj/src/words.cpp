#include "towerlab/words.hpp"

#include <cctype>
#include <cstdlib>

namespace towerlab {

FreeWord FreeWord::generator(unsigned g, std::int64_t e) {
  FreeWord w;
  w.append(g, e);
  return w;
}

void FreeWord::append(unsigned g, std::int64_t e) {
  if (e == 0) return;
  if (!syl_.empty() && syl_.back().gen == g) {
    syl_.back().exp += e;
    if (syl_.back().exp == 0) syl_.pop_back();
    return;
  }
  syl_.push_back(Syllable{std::uint8_t(g), e});
}

void FreeWord::append(const FreeWord& w) {
  for (const Syllable& s : w.syl_) append(s.gen, s.exp);
}

FreeWord FreeWord::inverse() const {
  FreeWord r;
  for (auto it = syl_.rbegin(); it != syl_.rend(); ++it)
    r.append(it->gen, -it->exp);
  return r;
}

FreeWord FreeWord::operator*(const FreeWord& o) const {
  FreeWord r = *this;
  r.append(o);
  return r;
}

FreeWord FreeWord::pow(std::int64_t k) const {
  FreeWord base = k < 0 ? inverse() : *this;
  std::int64_t n = k < 0 ? -k : k;
  FreeWord r;
  for (std::int64_t i = 0; i < n; ++i) r.append(base);
  return r;
}

std::size_t FreeWord::length() const {
  std::size_t n = 0;
  for (const Syllable& s : syl_) n += std::size_t(s.exp < 0 ? -s.exp : s.exp);
  return n;
}

std::int64_t FreeWord::exponent_sum(unsigned g) const {
  std::int64_t n = 0;
  for (const Syllable& s : syl_)
    if (s.gen == g) n += s.exp;
  return n;
}

bool FreeWord::in_frattini() const {
  return exponent_sum(0) % 2 == 0 && exponent_sum(1) % 2 == 0;
}

bool FreeWord::operator==(const FreeWord& o) const {
  if (syl_.size() != o.syl_.size()) return false;
  for (std::size_t i = 0; i < syl_.size(); ++i)
    if (syl_[i].gen != o.syl_[i].gen || syl_[i].exp != o.syl_[i].exp)
      return false;
  return true;
}

std::string FreeWord::str() const {
  if (syl_.empty()) return "1";
  std::string s;
  for (const Syllable& y : syl_) {
    char c = y.gen == 0 ? 'x' : 'y';
    std::int64_t e = y.exp;
    if (e < 0) {
      c = char(std::toupper(c));
      e = -e;
    }
    s += c;
    if (e > 1) {
      s += '^';
      s += std::to_string(e);
    }
  }
  return s;
}

namespace {

struct Parser {
  const std::string& t;
  std::size_t pos = 0;

  void skip() {
    while (pos < t.size() && std::isspace(static_cast<unsigned char>(t[pos])))
      ++pos;
  }

  bool done() {
    skip();
    return pos >= t.size();
  }

  char peek() {
    skip();
    return pos < t.size() ? t[pos] : '\0';
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("word parse error at position " + std::to_string(pos) +
                     ": " + what);
  }

  std::int64_t integer() {
    skip();
    std::size_t start = pos;
    if (pos < t.size() && (t[pos] == '-' || t[pos] == '+')) ++pos;
    while (pos < t.size() && std::isdigit(static_cast<unsigned char>(t[pos])))
      ++pos;
    if (pos == start || (pos == start + 1 && !std::isdigit(static_cast<unsigned char>(t[start + 1 - 1]))
                         && (t[start] == '-' || t[start] == '+')))
      fail("expected integer");
    return std::strtoll(t.substr(start, pos - start).c_str(), nullptr, 10);
  }

  // word := atom*, atom := letter | '(' word [',' word] ')', with optional ^k.
  FreeWord word(bool stop_at_comma) {
    FreeWord w;
    for (;;) {
      char c = peek();
      if (c == '\0' || c == ')' || (stop_at_comma && c == ',')) return w;
      FreeWord atom;
      if (c == '(') {
        ++pos;
        FreeWord a = word(true);
        if (peek() == ',') {
          ++pos;
          FreeWord b = word(true);
          if (peek() != ')') fail("expected ')'");
          ++pos;
          atom = commutator(a, b);
        } else if (peek() == ')') {
          ++pos;
          atom = a;
        } else {
          fail("expected ',' or ')'");
        }
      } else if (c == 'x' || c == 'y' || c == 'X' || c == 'Y') {
        ++pos;
        unsigned g = (c == 'x' || c == 'X') ? 0 : 1;
        atom = FreeWord::generator(g, std::isupper(static_cast<unsigned char>(c)) ? -1 : 1);
      } else if (c == '1') {
        ++pos;
        // identity literal
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
      if (peek() == '^') {
        ++pos;
        atom = atom.pow(integer());
      }
      w.append(atom);
    }
  }
};

}  // namespace

FreeWord FreeWord::parse(const std::string& text) {
  Parser p{text};
  FreeWord w = p.word(false);
  if (!p.done()) p.fail("trailing input");
  return w;
}

FreeWord sigma_apply(const FreeWord& w, unsigned k) {
  if (k % 3 == 0) return w;
  FreeWord cur = w;
  static const FreeWord img_x = FreeWord::generator(1, -1);           // y^-1
  static const FreeWord img_y = FreeWord::generator(0) * FreeWord::generator(1, -1);  // x y^-1
  for (unsigned step = 0; step < k % 3; ++step) {
    FreeWord next;
    for (const FreeWord::Syllable& s : cur.syllables()) {
      const FreeWord& img = s.gen == 0 ? img_x : img_y;
      next.append(img.pow(s.exp));
    }
    cur = next;
  }
  return cur;
}

RelatorPair make_pair(const FreeWord& u) {
  if (!u.in_frattini())
    throw Error("make_pair: u is not in the Frattini subgroup "
                "(odd exponent sum)");
  FreeWord v = u.inverse() * sigma_apply(u);
  return RelatorPair{v, sigma_apply(v)};
}

FpPresentation FpPresentation::from_pairs(const std::vector<FreeWord>& us) {
  FpPresentation p;
  for (const FreeWord& u : us) {
    RelatorPair pr = make_pair(u);
    p.relators.push_back(pr.v);
    p.relators.push_back(pr.sigma_v);
  }
  p.sigma_closed = true;
  return p;
}

FpPresentation FpPresentation::plain(std::vector<FreeWord> relators) {
  FpPresentation p;
  p.relators = std::move(relators);
  p.sigma_closed = false;
  return p;
}

}  // namespace towerlab
