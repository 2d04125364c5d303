#pragma once

#include "seqsos/polynomial.hpp"
#include "seqsos/sdp.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace seqsos {

/// Accepted certificates must reconstruct the target to this coefficient
/// inf-norm and keep the Gram spectrum above -kSosEigTol.
inline constexpr double kSosResidualTol = 1e-6;
inline constexpr double kSosEigTol = 1e-8;

/// Gram representation pi = zeta' Q zeta over the monomial vector zeta.
struct GramForm {
  MonomialBasis basis;
  Eigen::MatrixXd Q;

  Polynomial reconstruct() const;
};

struct SosCertificate {
  GramForm gram;
  double min_eig = 0.0;
  double residual = 0.0;  // inf-norm of p - zeta' Q zeta over coefficients

  bool accepted() const {
    return min_eig >= -kSosEigTol && residual <= kSosResidualTol;
  }
};

/// Bookkeeping for one SOS membership emitted into a conic program: the PSD
/// block and the monomial-matching equality rows, one per target monomial.
struct SosRows {
  int block = -1;
  int svec_offset = 0;
  int block_dim = 0;
  std::vector<int> row_ids;
  MonomialBasis target_basis;  // degree <= 2*halfdeg
  MonomialBasis gram_basis;    // zeta, degree <= halfdeg
};

/// Polynomial-valued affine expression in conic-program variables: the
/// coefficient of target monomial mu is sum_j lin[mu](j) x_j + constant[mu].
struct LinearPolyExpr {
  MonomialBasis basis;
  std::vector<std::vector<std::pair<int, double>>> lin;
  Eigen::VectorXd constant;

  explicit LinearPolyExpr(MonomialBasis b)
      : basis(std::move(b)),
        lin(basis.size()),
        constant(Eigen::VectorXd::Zero(basis.size())) {}
};

/// Kernel (implicit) relaxation of "expr must be SOS": appends one PSD block
/// Q of size s_halfdeg and, for every monomial mu of degree <= 2*halfdeg,
/// one equality row
///
///   lin_mu(x) - sum_{(i,j): zeta_i zeta_j = mu} Q_ij = -constant_mu,
///
/// so that each Gram entry appears in exactly one row. Throws if the
/// expression has monomials above degree 2*halfdeg.
SosRows add_sos_rows(ConicProgram& prog, const LinearPolyExpr& expr,
                     int halfdeg);

/// Gram matrix of a solved membership, symmetrized.
GramForm extract_gram(const ConicSolution& sol, const SosRows& rows);

/// Equality-row duals as a functional on the target space. With the row
/// convention above the functional's moment matrix equals the block's dual
/// slack, so it pairs nonnegatively with every SOS polynomial.
CoeffVector extract_dual(const ConicSolution& sol, const SosRows& rows);

/// Result of a Gram feasibility check. `slack` is the minimal t such that
/// p + t * (zeta' zeta) admits a PSD Gram matrix: nonpositive slack means
/// p is SOS with margin |slack|, positive slack quantifies the violation.
struct SosCheck {
  bool accepted = false;
  SolveStatus solver_status = SolveStatus::kNumericalFailure;
  double slack = 0.0;
  SosCertificate certificate;  // meaningful when the solve succeeded

  double violation() const { return std::max(0.0, slack); }
};

/// Decides SOS membership in Sigma_{2*halfdeg} by solving the minimal-shift
/// Gram program; the certificate invariant is checked independently of the
/// solver (eigenvalues and reconstruction residual recomputed).
SosCheck check_sos(const Polynomial& p, int halfdeg,
                   const SolverOptions& opts = {});

/// Convenience overload; requires even degree.
SosCheck check_sos(const Polynomial& p, const SolverOptions& opts = {});

/// Audit record {basis, Q row-major, min_eig, residual}.
std::string certificate_json(const SosCertificate& cert);

}  // namespace seqsos
