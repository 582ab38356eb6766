#include "khop/poly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace khop {

VarRegistry::VarRegistry() {
  names_.push_back("lambda");
  roles_.push_back(VarRole::lambda);
  for (int i = 1; i <= kMaxIndexed; ++i) {
    names_.push_back("lambda" + std::to_string(i));
    roles_.push_back(VarRole::lambda);
  }
  names_.push_back("tau");
  roles_.push_back(VarRole::tau);
  for (int i = 1; i <= kMaxIndexed; ++i) {
    names_.push_back("tau" + std::to_string(i));
    roles_.push_back(VarRole::tau);
  }
  for (int i = 1; i <= kMaxIndexed; ++i) {
    names_.push_back("u" + std::to_string(i));
    roles_.push_back(VarRole::bound);
  }
}

const VarRegistry& VarRegistry::standard() {
  static const VarRegistry instance;
  return instance;
}

const VarRegistry& registry() { return VarRegistry::standard(); }

Var VarRegistry::lambda(int i) const {
  if (i < 1 || i > kMaxIndexed) throw std::out_of_range("lambda index " + std::to_string(i));
  return Var{static_cast<std::uint8_t>(i)};
}

Var VarRegistry::tau(int i) const {
  if (i < 1 || i > kMaxIndexed) throw std::out_of_range("tau index " + std::to_string(i));
  return Var{static_cast<std::uint8_t>(9 + i)};
}

Var VarRegistry::bound(int i) const {
  if (i < 1 || i > kMaxIndexed) throw std::out_of_range("bound index " + std::to_string(i));
  return Var{static_cast<std::uint8_t>(9 + kMaxIndexed + i)};
}

std::optional<Var> VarRegistry::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return Var{static_cast<std::uint8_t>(i)};
  return std::nullopt;
}

int VarRegistry::tau_index(Var v) const {
  return v.id >= 10 && v.id < 10 + kMaxIndexed ? v.id - 9 : 0;
}

bool VarRegistry::tau_comparable(Var a, Var b) const {
  if (a == b) return role(a) == VarRole::tau;
  return tau_index(a) > 0 && tau_index(b) > 0;
}

bool VarRegistry::tau_less(Var a, Var b) const {
  if (!tau_comparable(a, b)) throw std::invalid_argument("undeclared order between " + name(a) + " and " + name(b));
  return tau_index(a) < tau_index(b);
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (auto e : exp) d += e;
  return d;
}

MultiPoly::MultiPoly(const Rational& c) {
  if (c != 0) terms_.emplace_back(Monomial{}, c);
}

MultiPoly MultiPoly::var(Var v, unsigned power) {
  MultiPoly p;
  Monomial m;
  m.exp[v.id] = static_cast<std::uint8_t>(power);
  p.terms_.emplace_back(m, Rational(1));
  return p;
}

MultiPoly MultiPoly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
  MultiPoly p;
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().first == t.first) {
      p.terms_.back().second += t.second;
    } else {
      if (!p.terms_.empty() && p.terms_.back().second == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().second == 0) p.terms_.pop_back();
  return p;
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].first == Monomial{});
}

bool MultiPoly::contains(Var v) const {
  return std::any_of(terms_.begin(), terms_.end(), [v](const Term& t) { return t.first[v] > 0; });
}

unsigned MultiPoly::degree_in(Var v) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.first[v]);
  return d;
}

unsigned MultiPoly::total_degree() const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.first.degree());
  return d;
}

Rational MultiPoly::constant_term() const {
  if (!terms_.empty() && terms_[0].first == Monomial{}) return terms_[0].second;
  return 0;
}

namespace {

template <class Combine>
std::vector<Term> merge(const std::vector<Term>& a, const std::vector<Term>& b, Combine combine) {
  std::vector<Term> out;
  out.reserve(a.size() + b.size());
  auto i = a.begin(), j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.emplace_back(j->first, combine(Rational(0), j->second));
      ++j;
    } else {
      Rational c = combine(i->second, j->second);
      if (c != 0) out.emplace_back(i->first, std::move(c));
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  terms_ = merge(terms_, o.terms_, [](const Rational& x, const Rational& y) { return Rational(x + y); });
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  terms_ = merge(terms_, o.terms_, [](const Rational& x, const Rational& y) { return Rational(x - y); });
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m;
      for (std::size_t i = 0; i < kMaxVars; ++i) m.exp[i] = static_cast<std::uint8_t>(ma.exp[i] + mb.exp[i]);
      out.emplace_back(m, ca * cb);
    }
  return MultiPoly::from_terms(std::move(out));
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) { return *this = *this * o; }

MultiPoly& MultiPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& t : terms_) t.second *= c;
  }
  return *this;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly p = *this;
  for (auto& t : p.terms_) t.second = -t.second;
  return p;
}

MultiPoly pow(const MultiPoly& p, unsigned exponent) {
  MultiPoly out(1);
  MultiPoly base = p;
  while (exponent > 0) {
    if (exponent & 1u) out *= base;
    exponent >>= 1;
    if (exponent > 0) base *= base;
  }
  return out;
}

MultiPoly substitute(const MultiPoly& p, Var v, const MultiPoly& q) {
  unsigned top = p.degree_in(v);
  std::vector<MultiPoly> powers{MultiPoly(1)};
  for (unsigned e = 1; e <= top; ++e) powers.push_back(powers.back() * q);
  std::vector<Term> rest;
  MultiPoly out;
  for (const auto& [m, c] : p.terms()) {
    unsigned e = m[v];
    Monomial base = m;
    base.exp[v.id] = 0;
    if (e == 0) {
      rest.emplace_back(base, c);
    } else {
      MultiPoly t = MultiPoly::from_terms({Term{base, c}});
      out += t * powers[e];
    }
  }
  return out + MultiPoly::from_terms(std::move(rest));
}

MultiPoly rename(const MultiPoly& p, std::span<const std::pair<Var, Var>> mapping) {
  std::vector<Term> out;
  out.reserve(p.size());
  for (const auto& [m, c] : p.terms()) {
    Monomial r = m;
    for (const auto& [from, to] : mapping) r.exp[from.id] = 0;
    for (const auto& [from, to] : mapping) r.exp[to.id] = static_cast<std::uint8_t>(r.exp[to.id] + m.exp[from.id]);
    out.emplace_back(r, c);
  }
  return MultiPoly::from_terms(std::move(out));
}

MultiPoly derivative(const MultiPoly& p, Var v) {
  std::vector<Term> out;
  for (const auto& [m, c] : p.terms()) {
    unsigned e = m[v];
    if (e == 0) continue;
    Monomial r = m;
    r.exp[v.id] = static_cast<std::uint8_t>(e - 1);
    out.emplace_back(r, c * e);
  }
  return MultiPoly::from_terms(std::move(out));
}

MultiPoly definite_integral(const MultiPoly& p, Var v, const MultiPoly& lo, const MultiPoly& hi) {
  if (lo.contains(v) || hi.contains(v))
    throw std::invalid_argument("integration bound contains the variable " + registry().name(v));
  std::vector<Term> anti;
  anti.reserve(p.size());
  for (const auto& [m, c] : p.terms()) {
    Monomial r = m;
    unsigned e = m[v] + 1;
    r.exp[v.id] = static_cast<std::uint8_t>(e);
    anti.emplace_back(r, c / e);
  }
  MultiPoly F = MultiPoly::from_terms(std::move(anti));
  return substitute(F, v, hi) - substitute(F, v, lo);
}

MultiPoly integrate_between(const MultiPoly& p, Var v, std::optional<Var> lo, Var hi) {
  if (hi == v || (lo && *lo == v))
    throw std::invalid_argument("integration bound contains the variable " + registry().name(v));
  std::vector<Term> out;
  out.reserve(p.size() * (lo ? 2 : 1));
  for (const auto& [m, c] : p.terms()) {
    unsigned e = m[v] + 1;
    Rational q = c / e;
    Monomial r = m;
    r.exp[v.id] = 0;
    Monomial up = r;
    up.exp[hi.id] = static_cast<std::uint8_t>(up.exp[hi.id] + e);
    if (lo) {
      Monomial down = r;
      down.exp[lo->id] = static_cast<std::uint8_t>(down.exp[lo->id] + e);
      out.emplace_back(down, -q);
    }
    out.emplace_back(up, std::move(q));
  }
  return MultiPoly::from_terms(std::move(out));
}

Rational eval(const MultiPoly& p, const Assignment& at) {
  Rational total = 0;
  for (const auto& [m, c] : p.terms()) {
    Rational t = c;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (m.exp[i] == 0) continue;
      auto it = at.find(Var{static_cast<std::uint8_t>(i)});
      if (it == at.end())
        throw std::invalid_argument("no value for symbol " + registry().name(Var{static_cast<std::uint8_t>(i)}));
      t *= pow(it->second, m.exp[i]);
    }
    total += t;
  }
  return total;
}

double eval_float(const MultiPoly& p, const FloatAssignment& at) {
  long double total = 0;
  for (const auto& [m, c] : p.terms()) {
    long double t = c.get_d();
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      if (m.exp[i] == 0) continue;
      auto it = at.find(Var{static_cast<std::uint8_t>(i)});
      if (it == at.end())
        throw std::invalid_argument("no value for symbol " + registry().name(Var{static_cast<std::uint8_t>(i)}));
      t *= std::pow(static_cast<long double>(it->second), static_cast<int>(m.exp[i]));
    }
    total += t;
  }
  return static_cast<double>(total);
}

std::string to_string(const MultiPoly& p) {
  if (p.is_zero()) return "0";
  std::vector<const Term*> order;
  for (const auto& t : p.terms()) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const Term* a, const Term* b) {
    unsigned da = a->first.degree(), db = b->first.degree();
    if (da != db) return da < db;
    return a->first > b->first;
  });
  const auto& reg = registry();
  std::string out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& [m, c] = *order[k];
    Rational mag = abs(c);
    if (k == 0) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    std::string factors;
    for (std::size_t i = 0; i < reg.size(); ++i) {
      if (m.exp[i] == 0) continue;
      if (!factors.empty()) factors += "*";
      factors += reg.name(Var{static_cast<std::uint8_t>(i)});
      if (m.exp[i] > 1) factors += "^" + std::to_string(m.exp[i]);
    }
    if (factors.empty()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += factors;
    } else {
      out += mag.get_str() + "*" + factors;
    }
  }
  return out;
}

namespace {

class PolyParser {
 public:
  explicit PolyParser(std::string_view s) : s_(s) {}

  MultiPoly parse() {
    skip();
    std::vector<Term> terms;
    bool negative = false;
    if (peek() == '-' || peek() == '+') {
      negative = get() == '-';
      skip();
    }
    for (;;) {
      Term t = term();
      if (negative) t.second = -t.second;
      terms.push_back(std::move(t));
      skip();
      if (pos_ == s_.size()) break;
      char op = get();
      if (op != '+' && op != '-') fail();
      negative = op == '-';
      skip();
    }
    return MultiPoly::from_terms(std::move(terms));
  }

 private:
  Term term() {
    Term t{Monomial{}, Rational(1)};
    bool first = true;
    for (;;) {
      skip();
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        if (!first) fail();
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '/') ++pos_;
        t.second = parse_rational(s_.substr(start, pos_ - start));
      } else if (std::isalpha(static_cast<unsigned char>(peek()))) {
        std::size_t start = pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
        auto v = registry().find(s_.substr(start, pos_ - start));
        if (!v) fail();
        unsigned e = 1;
        skip();
        if (peek() == '^') {
          ++pos_;
          skip();
          std::size_t es = pos_;
          while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
          if (es == pos_) fail();
          e = static_cast<unsigned>(std::stoul(std::string(s_.substr(es, pos_ - es))));
        }
        t.first.exp[v->id] = static_cast<std::uint8_t>(t.first.exp[v->id] + e);
      } else {
        fail();
      }
      first = false;
      skip();
      if (peek() != '*') return t;
      ++pos_;
    }
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char get() { return s_[pos_++]; }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail() const {
    throw std::invalid_argument("cannot parse polynomial at offset " + std::to_string(pos_) + ": " + std::string(s_));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(std::string_view text) { return PolyParser(text).parse(); }

MultiPoly collapse(const ChamberPoly& c, Var v) {
  std::vector<std::pair<Var, Var>> mapping;
  for (Var x : c.chain) mapping.emplace_back(x, v);
  return rename(c.poly, mapping);
}

}  // namespace khop
