#pragma once

#include "seqsos/gram.hpp"
#include "seqsos/polynomial.hpp"

#include <optional>
#include <string>
#include <vector>

namespace seqsos {

/// Linear map between polynomial spaces, stored as the images of the domain
/// basis monomials. Used for operator factors inside constraint terms, e.g.
/// the Lie derivative v -> dv/dx * phi.
class LinearPolyMap {
 public:
  LinearPolyMap() = default;
  LinearPolyMap(MonomialBasis domain, std::vector<Polynomial> images);

  static LinearPolyMap identity(const MonomialBasis& domain);

  const MonomialBasis& domain() const { return domain_; }
  const std::vector<Polynomial>& images() const { return images_; }
  int max_image_degree() const { return max_image_degree_; }
  bool is_identity() const { return identity_; }

  Polynomial apply(const Polynomial& p) const;

 private:
  MonomialBasis domain_;
  std::vector<Polynomial> images_;
  int max_image_degree_ = 0;
  bool identity_ = false;
};

/// The coefficient-space matrix of q * op(.) from `domain` into `target`.
Eigen::MatrixXd multiplication_matrix(const Polynomial& q,
                                      const MonomialBasis& domain,
                                      const MonomialBasis& target);

struct DecisionVar {
  std::string name;
  MonomialBasis space;  // coefficient space of the polynomial value
  bool sos = false;     // member of the SOS cone (free otherwise)
};

/// One multiplicative factor of a constraint term: a decision variable,
/// optionally pre-composed with a linear map.
struct TermFactor {
  int var = -1;
  std::optional<LinearPolyMap> op;  // identity when absent
};

/// c_j(x) * prod_i op_i(xi_{var_i}); an empty factor list is an affine
/// offset. The factor count is the term's degree in the decision variables.
struct ConstraintTerm {
  Polynomial coeff;
  std::vector<TermFactor> factors;
};

struct ConstraintExpr {
  std::vector<ConstraintTerm> terms;
  MonomialBasis cone;  // target SOS cone; maxdeg must be even
};

/// Nonlinear SOS program: minimize <f, xi> subject to g_c(xi) in Sigma for
/// every constraint and xi_v in Sigma for every SOS-flagged variable.
class NlSosProblem {
 public:
  int add_var(std::string name, MonomialBasis space, bool sos);
  void add_constraint(ConstraintExpr expr);
  void set_cost(Eigen::VectorXd f);

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const DecisionVar& var(int v) const { return vars_[v]; }
  int var_index(const std::string& name) const;  // -1 if absent
  const ConstraintExpr& constraint(int c) const { return constraints_[c]; }
  const std::vector<int>& sos_vars() const { return sos_vars_; }

  int total_dim() const { return total_dim_; }
  int var_offset(int v) const { return offsets_[v]; }
  const Eigen::VectorXd& cost() const { return cost_; }

  Eigen::VectorXd pack(const std::vector<Polynomial>& xi) const;
  std::vector<Polynomial> unpack(const Eigen::VectorXd& coords) const;

 private:
  std::vector<DecisionVar> vars_;
  std::vector<int> offsets_;
  std::vector<int> sos_vars_;
  std::vector<ConstraintExpr> constraints_;
  Eigen::VectorXd cost_;
  int total_dim_ = 0;
};

/// Primal-dual pair: decision polynomials, one functional per constraint
/// (over its cone basis) and one per SOS-flagged variable (over its space).
struct Iterate {
  std::vector<Polynomial> xi;
  std::vector<CoeffVector> ell;
  std::vector<CoeffVector> svar;
};

/// Iterate with the given primal values and zero dual functionals.
Iterate make_iterate(const NlSosProblem& prob, std::vector<Polynomial> xi);

/// Euclidean norm of the stacked dual coefficient vectors.
double dual_norm(const Iterate& it);
double dual_distance(const Iterate& a, const Iterate& b);

std::vector<Polynomial> eval_g(const NlSosProblem& prob,
                               const std::vector<Polynomial>& xi);

/// Directional derivative of g at xi0 applied to delta (product rule,
/// coefficient-exact).
std::vector<Polynomial> apply_deriv(const NlSosProblem& prob,
                                    const std::vector<Polynomial>& xi0,
                                    const std::vector<Polynomial>& delta);

/// Matrix of the derivative of constraint c at xi0: rows over the cone
/// basis, columns over the packed primal coordinates.
Eigen::MatrixXd deriv_matrix(const NlSosProblem& prob, int c,
                             const std::vector<Polynomial>& xi0);

/// w with <w, delta> = sum_c <ell_c, grad g_c(xi0) delta> for all delta.
Eigen::VectorXd apply_adjoint(const NlSosProblem& prob,
                              const std::vector<Polynomial>& xi0,
                              const std::vector<CoeffVector>& ell);

/// L(xi, l) = <f, xi> - sum_c <l_c, g_c(xi)>
double lagrangian(const NlSosProblem& prob, const Iterate& it);

struct KktResidual {
  double stationarity = 0.0;
  double comp_primal = 0.0;  // |<s, xi>| summed over SOS variables
  double comp_dual = 0.0;    // |<l, g(xi)>| summed over constraints
  double feas_primal = 0.0;  // worst SOS-membership violation (Gram check)
};

/// Full KKT residual; feas_primal runs one Gram feasibility solve per
/// membership, so this is a diagnostic rather than a hot-path call.
KktResidual kkt_residual(const NlSosProblem& prob, const Iterate& it,
                         const SolverOptions& opts = {});

}  // namespace seqsos
