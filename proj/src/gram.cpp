#include "seqsos/gram.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace seqsos {

Polynomial GramForm::reconstruct() const {
  Polynomial out(basis.nvars());
  for (int i = 0; i < basis.size(); ++i) {
    for (int j = 0; j < basis.size(); ++j) {
      out.add_term(basis[i] * basis[j], Q(i, j));
    }
  }
  return out;
}

SosRows add_sos_rows(ConicProgram& prog, const LinearPolyExpr& expr,
                     int halfdeg) {
  const int n = expr.basis.nvars();
  if (expr.basis.maxdeg() > 2 * halfdeg) {
    throw std::invalid_argument(
        "add_sos_rows: expression degree exceeds 2*halfdeg");
  }
  SosRows out;
  out.target_basis = MonomialBasis(n, 2 * halfdeg);
  out.gram_basis = MonomialBasis(n, halfdeg);
  out.block_dim = out.gram_basis.size();
  out.block = prog.add_psd_block(out.block_dim);
  out.svec_offset = prog.block_offset(out.block);

  const double sqrt2 = std::sqrt(2.0);
  // Gram coefficients per target monomial: entry (i, j) of Q lands in the
  // row of zeta_i * zeta_j and nowhere else.
  std::vector<std::vector<std::pair<int, double>>> gram_cols(
      out.target_basis.size());
  for (int i = 0; i < out.block_dim; ++i) {
    for (int j = 0; j <= i; ++j) {
      const Monomial mu = out.gram_basis[i] * out.gram_basis[j];
      const int row = out.target_basis.index_of(mu);
      gram_cols[row].emplace_back(prog.svec_index(out.block, i, j),
                                  i == j ? 1.0 : sqrt2);
    }
  }

  out.row_ids.resize(out.target_basis.size());
  for (int r = 0; r < out.target_basis.size(); ++r) {
    ConicProgram::Row row;
    const int src = expr.basis.index_of(out.target_basis[r]);
    if (src >= 0) {
      row.coeffs = expr.lin[src];
      row.rhs = -expr.constant[src];
    }
    for (const auto& [idx, w] : gram_cols[r]) row.coeffs.emplace_back(idx, -w);
    out.row_ids[r] = prog.add_row(std::move(row));
  }
  return out;
}

GramForm extract_gram(const ConicSolution& sol, const SosRows& rows) {
  const int len = rows.block_dim * (rows.block_dim + 1) / 2;
  GramForm g{rows.gram_basis,
             svec_to_mat(sol.primal.segment(rows.svec_offset, len),
                         rows.block_dim)};
  g.Q = 0.5 * (g.Q + g.Q.transpose()).eval();
  return g;
}

CoeffVector extract_dual(const ConicSolution& sol, const SosRows& rows) {
  if (sol.eq_duals.size() == 0) {
    throw std::runtime_error("extract_dual: solution carries no row duals");
  }
  CoeffVector out(rows.target_basis);
  for (int r = 0; r < rows.target_basis.size(); ++r) {
    out.data()[r] = sol.eq_duals[rows.row_ids[r]];
  }
  return out;
}

SosCheck check_sos(const Polynomial& p, int halfdeg,
                   const SolverOptions& opts) {
  if (p.degree() > 2 * halfdeg) {
    throw std::invalid_argument("check_sos: degree exceeds 2*halfdeg");
  }
  const MonomialBasis target(p.nvars(), 2 * halfdeg);

  ConicProgram prog;
  const int t = prog.add_free(1);
  prog.set_objective(t, 1.0);

  LinearPolyExpr expr(target);
  expr.constant = CoeffVector::from_polynomial(p, target).data();
  {
    // coefficients of zeta' zeta = sum_i zeta_i^2
    const MonomialBasis zeta(p.nvars(), halfdeg);
    for (int i = 0; i < zeta.size(); ++i) {
      const int idx = target.index_of(zeta[i] * zeta[i]);
      bool found = false;
      for (auto& [var, w] : expr.lin[idx]) {
        if (var == t) {
          w += 1.0;
          found = true;
        }
      }
      if (!found) expr.lin[idx].emplace_back(t, 1.0);
    }
  }
  const SosRows rows = add_sos_rows(prog, expr, halfdeg);

  SosCheck out;
  const ConicSolution sol = solve(prog, opts);
  out.solver_status = sol.status;
  if (sol.status != SolveStatus::kOptimal) return out;

  out.slack = sol.primal[t];
  GramForm gram = extract_gram(sol, rows);
  // Q matches p + t* zeta'zeta, so Q - t* I is a Gram matrix for p itself.
  gram.Q -= out.slack * Eigen::MatrixXd::Identity(gram.Q.rows(), gram.Q.cols());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.Q,
                                                    Eigen::EigenvaluesOnly);
  out.certificate.gram = gram;
  out.certificate.min_eig = es.eigenvalues().minCoeff();
  out.certificate.residual = (p - gram.reconstruct()).inf_norm();
  out.accepted = out.certificate.accepted();
  return out;
}

SosCheck check_sos(const Polynomial& p, const SolverOptions& opts) {
  if (p.degree() % 2 != 0) {
    throw std::invalid_argument("check_sos: polynomial must have even degree");
  }
  return check_sos(p, p.degree() / 2, opts);
}

std::string certificate_json(const SosCertificate& cert) {
  std::string out = "{\"basis\": [";
  for (int i = 0; i < cert.gram.basis.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + cert.gram.basis[i].to_string() + "\"";
  }
  out += "], \"Q\": [";
  for (int i = 0; i < cert.gram.Q.rows(); ++i) {
    for (int j = 0; j < cert.gram.Q.cols(); ++j) {
      if (i || j) out += ", ";
      out += format_double(cert.gram.Q(i, j));
    }
  }
  out += "], \"min_eig\": " + format_double(cert.min_eig);
  out += ", \"residual\": " + format_double(cert.residual) + "}";
  return out;
}

}  // namespace seqsos
