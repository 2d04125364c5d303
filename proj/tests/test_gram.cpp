#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "seqsos/gram.hpp"
#include "seqsos/parse.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <set>

using namespace seqsos;

namespace {

// Membership with a constant target polynomial: expr = p with no variables.
SosRows add_constant_membership(ConicProgram& prog, const Polynomial& p,
                                int halfdeg) {
  const MonomialBasis target(p.nvars(), 2 * halfdeg);
  LinearPolyExpr expr(target);
  expr.constant = CoeffVector::from_polynomial(p, target).data();
  return add_sos_rows(prog, expr, halfdeg);
}

Polynomial random_square_sum(std::mt19937_64& rng, int nvars, int halfdeg,
                             int count) {
  MonomialBasis basis(nvars, halfdeg);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial out(nvars);
  for (int k = 0; k < count; ++k) {
    Polynomial q(nvars);
    for (int i = 0; i < basis.size(); ++i) q.add_term(basis[i], u(rng));
    out += q * q;
  }
  return out;
}

}  // namespace

TEST_CASE("kernel rows: diagonal pattern for x1^2 + x2^2") {
  ConicProgram prog;
  const SosRows rows =
      add_constant_membership(prog, parse_polynomial("x1^2 + x2^2"), 1);
  CHECK(rows.block_dim == 3);  // zeta = (1, x1, x2)
  CHECK(static_cast<int>(rows.row_ids.size()) == 6);

  // Rows encode lin - gram = -coeff: the constant row forces Q[1,1] = 0,
  // the x1^2 and x2^2 rows pin the corresponding diagonal entries to 1.
  const auto& all = prog.rows();
  const int r1 = rows.row_ids[rows.target_basis.index_of(Monomial({0, 0}))];
  const int rx1 = rows.row_ids[rows.target_basis.index_of(Monomial({2, 0}))];
  const int rx2 = rows.row_ids[rows.target_basis.index_of(Monomial({0, 2}))];
  CHECK(all[r1].rhs == 0.0);
  CHECK(all[rx1].rhs == -1.0);
  CHECK(all[rx2].rhs == -1.0);
  CHECK(all[r1].coeffs.size() == 1);   // only Q[1,1]
  CHECK(all[rx1].coeffs.size() == 1);  // only Q[x1,x1]
  CHECK(all[rx1].coeffs[0].second == -1.0);

  // Every Gram entry appears in exactly one equality row.
  std::map<int, int> seen;
  for (int r : rows.row_ids) {
    for (const auto& [idx, v] : all[r].coeffs) seen[idx] += 1;
  }
  for (int k = rows.svec_offset;
       k < rows.svec_offset + rows.block_dim * (rows.block_dim + 1) / 2; ++k) {
    CHECK(seen[k] == 1);
  }
}

TEST_CASE("kernel rows: zero target is feasible with Q = 0") {
  ConicProgram prog;
  const SosRows rows = add_constant_membership(prog, Polynomial(2), 1);
  for (int r : rows.row_ids) CHECK(prog.rows()[r].rhs == 0.0);
  prog.set_objective(prog.svec_index(rows.block, 0, 0), 1.0);
  const ConicSolution sol = solve(prog);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(extract_gram(sol, rows).Q.norm() < 1e-6);
}

TEST_CASE("check_sos: perfect square accepted") {
  const SosCheck chk = check_sos(parse_polynomial("x1^2 - 2*x1*x2 + x2^2"));
  REQUIRE(chk.solver_status == SolveStatus::kOptimal);
  CHECK(chk.accepted);
  CHECK(chk.violation() <= 1e-8);
  CHECK(chk.certificate.residual <= 1e-6);
  CHECK(chk.certificate.min_eig >= -1e-8);
}

TEST_CASE("check_sos: rank-1 target (x1 - x2)^2 feasible") {
  const SosCheck chk = check_sos(parse_polynomial("(x1 - x2)^2"));
  CHECK(chk.accepted);
  const Polynomial back = chk.certificate.gram.reconstruct();
  CHECK((back - parse_polynomial("(x1 - x2)^2")).inf_norm() <= 1e-6);
}

TEST_CASE("check_sos: indefinite quadratic refused") {
  const SosCheck chk = check_sos(parse_polynomial("x1*x2"));
  REQUIRE(chk.solver_status == SolveStatus::kOptimal);
  CHECK(!chk.accepted);
  CHECK(chk.violation() == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("check_sos: Motzkin polynomial refused") {
  const Polynomial motzkin =
      parse_polynomial("x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2 + 1");
  const SosCheck chk = check_sos(motzkin);
  REQUIRE(chk.solver_status == SolveStatus::kOptimal);
  CHECK(!chk.accepted);
  CHECK(chk.violation() > 1e-4);
}

TEST_CASE("check_sos: odd degree rejected, halfdeg overflow rejected") {
  CHECK_THROWS_AS(check_sos(parse_polynomial("x1^3 + 1")),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_sos(parse_polynomial("x1^4"), 1),
                  std::invalid_argument);
}

TEST_CASE("round trip: accepted certificates reconstruct the target") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 1 + trial % 2;
    const Polynomial p = random_square_sum(rng, n, 2, 2);
    const SosCheck chk = check_sos(p, 2);
    REQUIRE(chk.accepted);
    CHECK((p - chk.certificate.gram.reconstruct()).inf_norm() <= 1e-6);
    CHECK(chk.certificate.min_eig >= -1e-8);
  }
}

TEST_CASE("eigenvalue soundness: accepted target nonnegative on samples") {
  std::mt19937_64 rng(37);
  const Polynomial p = random_square_sum(rng, 2, 2, 3);
  const SosCheck chk = check_sos(p, 2);
  REQUIRE(chk.accepted);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const MonomialBasis zeta(2, 2);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd z(2);
    z << u(rng), u(rng);
    double zeta_sq = 0.0;
    for (int i = 0; i < zeta.size(); ++i) {
      const double v = zeta[i].eval(z);
      zeta_sq += v * v;
    }
    CHECK(p.eval(z) >= -1e-6 * zeta_sq);
  }
}

TEST_CASE("dual functional pairs nonnegatively with squares") {
  // Minimal-shift program for a non-SOS target: the row duals at the optimum
  // are a separating moment functional, nonnegative on every square yet
  // negative on the target itself.
  const Polynomial p = parse_polynomial("x1*x2");
  const MonomialBasis target(2, 2), zeta(2, 1);
  ConicProgram prog;
  const int t = prog.add_free(1);
  prog.set_objective(t, 1.0);
  LinearPolyExpr expr(target);
  expr.constant = CoeffVector::from_polynomial(p, target).data();
  for (int i = 0; i < zeta.size(); ++i) {
    expr.lin[target.index_of(zeta[i] * zeta[i])].emplace_back(t, 1.0);
  }
  const SosRows rows = add_sos_rows(prog, expr, 1);
  const ConicSolution sol = solve(prog);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  const CoeffVector l = extract_dual(sol, rows);

  std::mt19937_64 rng(41);
  for (int k = 0; k < 100; ++k) {
    const Polynomial sq = random_square_sum(rng, 2, 1, 1);
    CHECK(l.pair(sq) >= -1e-8);
  }
  CHECK(l.pair(p) < -1e-3);  // separation from the SOS cone
}

TEST_CASE("extract_dual: all-zero duals give the zero functional") {
  ConicSolution sol;
  SosRows rows;
  rows.target_basis = MonomialBasis(1, 2);
  rows.gram_basis = MonomialBasis(1, 1);
  rows.block_dim = 2;
  rows.row_ids = {0, 1, 2};
  sol.eq_duals = Eigen::VectorXd::Zero(3);
  CHECK(extract_dual(sol, rows).norm() == 0.0);

  ConicSolution empty;
  CHECK_THROWS_AS(extract_dual(empty, rows), std::runtime_error);
}

TEST_CASE("certificate json export carries the documented fields") {
  const SosCheck chk = check_sos(parse_polynomial("x1^2 + 1"));
  REQUIRE(chk.accepted);
  const std::string js = certificate_json(chk.certificate);
  CHECK(js.find("\"basis\"") != std::string::npos);
  CHECK(js.find("\"Q\"") != std::string::npos);
  CHECK(js.find("\"min_eig\"") != std::string::npos);
  CHECK(js.find("\"residual\"") != std::string::npos);
  CHECK(js.find("\"x1\"") != std::string::npos);
}
