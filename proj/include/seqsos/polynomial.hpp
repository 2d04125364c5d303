#pragma once

#include <Eigen/Core>

#include <map>
#include <string>
#include <vector>

namespace seqsos {

/// Coefficients with magnitude below this threshold are treated as structural
/// zeros and pruned after every arithmetic operation.
inline constexpr double kStructuralZero = 1e-14;

/// Exponent multi-index (alpha_1, ..., alpha_n) of a power product
/// x1^a1 * ... * xn^an.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  /// Constant monomial (all exponents zero) in n variables.
  static Monomial one(int nvars);
  /// The monomial x_i (0-based index) in n variables.
  static Monomial var(int nvars, int i);

  int nvars() const { return static_cast<int>(alpha_.size()); }
  int degree() const { return degree_; }
  int exponent(int i) const { return alpha_[i]; }
  const std::vector<int>& exponents() const { return alpha_; }

  Monomial operator*(const Monomial& rhs) const;
  /// d/dx_i applied to this monomial: returns {alpha_i, monomial with
  /// exponent i lowered}; the factor is 0 for constants in x_i.
  std::pair<int, Monomial> diff(int i) const;

  double eval(const Eigen::VectorXd& point) const;

  bool operator==(const Monomial& rhs) const { return alpha_ == rhs.alpha_; }
  bool operator!=(const Monomial& rhs) const { return !(*this == rhs); }

  std::string to_string() const;

 private:
  std::vector<int> alpha_;
  int degree_ = 0;
};

/// Graded lexicographic order: lower total degree first; within a degree,
/// lexicographically larger exponent vectors come first, so that for n = 2
/// the order is 1, x1, x2, x1^2, x1*x2, x2^2, ...
bool grlex_less(const Monomial& a, const Monomial& b);

struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return grlex_less(a, b);
  }
};

/// Multivariate polynomial with real coefficients over a graded-lex ordered
/// term map. Immutable in spirit: all operations return new values.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double, GrlexLess>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, double c);
  static Polynomial variable(int nvars, int i);
  static Polynomial term(const Monomial& m, double c);

  int nvars() const { return nvars_; }
  /// Max total degree over stored terms; 0 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  int num_terms() const { return static_cast<int>(terms_.size()); }

  double coeff(const Monomial& m) const;
  void add_term(const Monomial& m, double c);
  const TermMap& terms() const { return terms_; }

  Polynomial operator+(const Polynomial& rhs) const;
  Polynomial operator-(const Polynomial& rhs) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& rhs) const;
  Polynomial operator*(double s) const;
  Polynomial& operator+=(const Polynomial& rhs);

  /// Partial derivative with respect to x_i.
  Polynomial diff(int i) const;
  /// Row vector (d/dx_1 p, ..., d/dx_n p).
  std::vector<Polynomial> grad() const;

  /// Value at a point, evaluated by recursive Horner factorization.
  double eval(const Eigen::VectorXd& point) const;

  /// Euclidean norm of the coefficient vector.
  double norm() const;
  /// Largest coefficient magnitude.
  double inf_norm() const;

  bool operator==(const Polynomial& rhs) const;

  std::string to_string() const;

 private:
  void prune();

  int nvars_ = 0;
  TermMap terms_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

/// All monomials in n variables of total degree <= maxdeg, in graded-lex
/// order; the first element is the constant monomial and the length is
/// binomial(n + maxdeg, maxdeg).
class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int nvars, int maxdeg);

  int nvars() const { return nvars_; }
  int maxdeg() const { return maxdeg_; }
  int size() const { return static_cast<int>(list_.size()); }
  const Monomial& operator[](int i) const { return list_[i]; }
  const std::vector<Monomial>& monomials() const { return list_; }

  /// Position of m in the basis, or -1 if m is not contained.
  int index_of(const Monomial& m) const;

  bool operator==(const MonomialBasis& rhs) const {
    return nvars_ == rhs.nvars_ && maxdeg_ == rhs.maxdeg_;
  }

 private:
  int nvars_ = 0;
  int maxdeg_ = 0;
  std::vector<Monomial> list_;
};

/// Coefficient vector over a monomial basis. Serves both as coordinates for
/// polynomials of bounded degree and as a linear functional on them via the
/// basis dot product (the two roles coincide for the Euclidean pairing).
class CoeffVector {
 public:
  CoeffVector() = default;
  explicit CoeffVector(MonomialBasis basis);
  CoeffVector(MonomialBasis basis, Eigen::VectorXd data);

  /// Coordinates of p in the given basis; throws if p has a term outside it.
  static CoeffVector from_polynomial(const Polynomial& p,
                                     const MonomialBasis& basis);
  Polynomial to_polynomial() const;

  const MonomialBasis& basis() const { return basis_; }
  const Eigen::VectorXd& data() const { return data_; }
  Eigen::VectorXd& data() { return data_; }
  int size() const { return static_cast<int>(data_.size()); }

  /// <this, p> = dot product with p's coefficients in the same basis.
  double pair(const Polynomial& p) const;

  double norm() const { return data_.norm(); }

 private:
  MonomialBasis basis_;
  Eigen::VectorXd data_;
};

/// binomial(n, k) as a double-safe integer (desk-scale arguments).
long long binomial(int n, int k);

/// Shortest decimal representation of v that parses back to the same double.
std::string format_double(double v);

}  // namespace seqsos
