#include "seqsos/polynomial.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace seqsos {

namespace {

void check_same_nvars(int a, int b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string("polynomial ") + op +
                                ": variable count mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) +
                                ")");
  }
}

}  // namespace

Monomial::Monomial(std::vector<int> exponents) : alpha_(std::move(exponents)) {
  for (int e : alpha_) {
    if (e < 0) throw std::invalid_argument("monomial exponent must be >= 0");
    degree_ += e;
  }
}

Monomial Monomial::one(int nvars) {
  return Monomial(std::vector<int>(nvars, 0));
}

Monomial Monomial::var(int nvars, int i) {
  std::vector<int> a(nvars, 0);
  a.at(i) = 1;
  return Monomial(std::move(a));
}

Monomial Monomial::operator*(const Monomial& rhs) const {
  check_same_nvars(nvars(), rhs.nvars(), "monomial product");
  std::vector<int> a(alpha_.size());
  for (size_t i = 0; i < a.size(); ++i) a[i] = alpha_[i] + rhs.alpha_[i];
  return Monomial(std::move(a));
}

std::pair<int, Monomial> Monomial::diff(int i) const {
  if (alpha_[i] == 0) return {0, Monomial::one(nvars())};
  std::vector<int> a = alpha_;
  a[i] -= 1;
  return {alpha_[i], Monomial(std::move(a))};
}

double Monomial::eval(const Eigen::VectorXd& point) const {
  double v = 1.0;
  for (int i = 0; i < nvars(); ++i) {
    for (int k = 0; k < alpha_[i]; ++k) v *= point[i];
  }
  return v;
}

std::string Monomial::to_string() const {
  std::string out;
  for (int i = 0; i < nvars(); ++i) {
    if (alpha_[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += "x" + std::to_string(i + 1);
    if (alpha_[i] > 1) out += "^" + std::to_string(alpha_[i]);
  }
  return out.empty() ? "1" : out;
}

bool grlex_less(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // Within a degree, larger exponent vectors (lexicographically) come first.
  return a.exponents() > b.exponents();
}

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Monomial::one(nvars), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  Polynomial p(nvars);
  p.add_term(Monomial::var(nvars, i), 1.0);
  return p;
}

Polynomial Polynomial::term(const Monomial& m, double c) {
  Polynomial p(m.nvars());
  p.add_term(m, c);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  check_same_nvars(nvars_, m.nvars(), "add_term");
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kStructuralZero) terms_.erase(it);
}

void Polynomial::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < kStructuralZero) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
  check_same_nvars(nvars_, rhs.nvars_, "add");
  Polynomial out = *this;
  for (const auto& [m, c] : rhs.terms_) out.add_term(m, c);
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  check_same_nvars(nvars_, rhs.nvars_, "add");
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

Polynomial Polynomial::operator-(const Polynomial& rhs) const {
  return *this + (-rhs);
}

Polynomial Polynomial::operator-() const { return *this * -1.0; }

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
  check_same_nvars(nvars_, rhs.nvars_, "mul");
  Polynomial out(nvars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) {
      out.add_term(ma * mb, ca * cb);
    }
  }
  out.prune();
  return out;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) out.add_term(m, c * s);
  return out;
}

Polynomial Polynomial::diff(int i) const {
  Polynomial out(nvars_);
  for (const auto& [m, c] : terms_) {
    auto [factor, dm] = m.diff(i);
    if (factor != 0) out.add_term(dm, c * factor);
  }
  return out;
}

std::vector<Polynomial> Polynomial::grad() const {
  std::vector<Polynomial> out;
  out.reserve(nvars_);
  for (int i = 0; i < nvars_; ++i) out.push_back(diff(i));
  return out;
}

namespace {

// Recursive Horner evaluation over the variable with index `var`: terms are
// sorted lexicographically by exponent vector so that equal leading exponents
// are contiguous.
using TermRef = std::pair<const std::vector<int>*, double>;

double horner(const TermRef* begin, const TermRef* end, int var, int nvars,
              const Eigen::VectorXd& z) {
  if (var == nvars) {
    double sum = 0.0;
    for (const TermRef* t = begin; t != end; ++t) sum += t->second;
    return sum;
  }
  // Terms arrive sorted with larger exponents of x_var first; fold the groups
  // as acc = (...(g1 * z^(e1-e2) + g2) * z^(e2-e3) + ...) * z^(ek).
  double acc = 0.0;
  int held_exp = 0;
  bool first = true;
  const TermRef* t = begin;
  while (t != end) {
    const int e = (*t->first)[var];
    const TermRef* g = t;
    while (g != end && (*g->first)[var] == e) ++g;
    const double inner = horner(t, g, var + 1, nvars, z);
    if (first) {
      acc = inner;
      first = false;
    } else {
      for (int k = 0; k < held_exp - e; ++k) acc *= z[var];
      acc += inner;
    }
    held_exp = e;
    t = g;
  }
  for (int k = 0; k < held_exp; ++k) acc *= z[var];
  return acc;
}

}  // namespace

double Polynomial::eval(const Eigen::VectorXd& point) const {
  if (point.size() != nvars_) {
    throw std::invalid_argument("eval: point dimension mismatch");
  }
  if (terms_.empty()) return 0.0;
  std::vector<TermRef> refs;
  refs.reserve(terms_.size());
  for (const auto& [m, c] : terms_) refs.emplace_back(&m.exponents(), c);
  // Sort by exponent vector, descending, so Horner grouping sees the highest
  // power of each variable first.
  std::sort(refs.begin(), refs.end(),
            [](const TermRef& a, const TermRef& b) { return *a.first > *b.first; });
  return horner(refs.data(), refs.data() + refs.size(), 0, nvars_, point);
}

double Polynomial::norm() const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += c * c;
  return std::sqrt(s);
}

double Polynomial::inf_norm() const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s = std::max(s, std::abs(c));
  return s;
}

bool Polynomial::operator==(const Polynomial& rhs) const {
  return nvars_ == rhs.nvars_ &&
         std::equal(terms_.begin(), terms_.end(), rhs.terms_.begin(),
                    rhs.terms_.end());
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [m, c] : terms_) {
    const bool first = out.empty();
    double mag = c;
    if (c < 0) {
      out += first ? "-" : " - ";
      mag = -c;
    } else if (!first) {
      out += " + ";
    }
    if (m.degree() == 0) {
      out += format_double(mag);
    } else if (mag == 1.0) {
      out += m.to_string();
    } else {
      out += format_double(mag) + "*" + m.to_string();
    }
  }
  return out;
}

namespace {

void enumerate_monomials(int nvars, int maxdeg, int var, std::vector<int>& cur,
                         std::vector<Monomial>& out) {
  if (var == nvars) {
    out.emplace_back(cur);
    return;
  }
  const int used = std::accumulate(cur.begin(), cur.begin() + var, 0);
  for (int e = 0; e <= maxdeg - used; ++e) {
    cur[var] = e;
    enumerate_monomials(nvars, maxdeg, var + 1, cur, out);
  }
  cur[var] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int maxdeg)
    : nvars_(nvars), maxdeg_(maxdeg) {
  if (nvars < 1) throw std::invalid_argument("basis: nvars must be >= 1");
  if (maxdeg < 0) throw std::invalid_argument("basis: maxdeg must be >= 0");
  std::vector<int> cur(nvars, 0);
  enumerate_monomials(nvars, maxdeg, 0, cur, list_);
  std::sort(list_.begin(), list_.end(), GrlexLess{});
}

int MonomialBasis::index_of(const Monomial& m) const {
  auto it = std::lower_bound(list_.begin(), list_.end(), m, GrlexLess{});
  if (it == list_.end() || !(*it == m)) return -1;
  return static_cast<int>(it - list_.begin());
}

CoeffVector::CoeffVector(MonomialBasis basis)
    : basis_(std::move(basis)), data_(Eigen::VectorXd::Zero(basis_.size())) {}

CoeffVector::CoeffVector(MonomialBasis basis, Eigen::VectorXd data)
    : basis_(std::move(basis)), data_(std::move(data)) {
  if (data_.size() != basis_.size()) {
    throw std::invalid_argument("coefficient vector length != basis size");
  }
}

CoeffVector CoeffVector::from_polynomial(const Polynomial& p,
                                         const MonomialBasis& basis) {
  if (p.nvars() != basis.nvars()) {
    throw std::invalid_argument("from_polynomial: variable count mismatch");
  }
  CoeffVector out(basis);
  for (const auto& [m, c] : p.terms()) {
    const int idx = basis.index_of(m);
    if (idx < 0) {
      throw std::invalid_argument("from_polynomial: degree overflow, term " +
                                  m.to_string() + " not in basis of degree " +
                                  std::to_string(basis.maxdeg()));
    }
    out.data_[idx] = c;
  }
  return out;
}

Polynomial CoeffVector::to_polynomial() const {
  Polynomial p(basis_.nvars());
  for (int i = 0; i < size(); ++i) {
    if (std::abs(data_[i]) >= kStructuralZero) p.add_term(basis_[i], data_[i]);
  }
  return p;
}

double CoeffVector::pair(const Polynomial& p) const {
  return data_.dot(from_polynomial(p, basis_).data());
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace seqsos
