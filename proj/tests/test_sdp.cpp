#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "seqsos/sdp.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <sstream>

using namespace seqsos;

namespace {

// min q  s.t.  [[q, 1], [1, q]] >= 0; optimum q* = 1 (eigenvalues q +- 1).
ConicProgram saddle_program() {
  ConicProgram prog;
  const int q = prog.add_free(1);
  const int blk = prog.add_psd_block(2);
  prog.set_objective(q, 1.0);
  prog.add_row({{{prog.svec_index(blk, 0, 0), 1.0}, {q, -1.0}}, 0.0});
  prog.add_row({{{prog.svec_index(blk, 1, 1), 1.0}, {q, -1.0}}, 0.0});
  prog.add_row({{{prog.svec_index(blk, 1, 0), 1.0 / std::sqrt(2.0)}}, 1.0});
  return prog;
}

// min tr(Q)  s.t.  Q >= 0 (2x2), Q_11 = 1; optimum 1.
ConicProgram trace_program() {
  ConicProgram prog;
  const int blk = prog.add_psd_block(2);
  prog.set_objective(prog.svec_index(blk, 0, 0), 1.0);
  prog.set_objective(prog.svec_index(blk, 1, 1), 1.0);
  prog.add_row({{{prog.svec_index(blk, 0, 0), 1.0}}, 1.0});
  return prog;
}

// Q >= 0 with Q_11 = -1: infeasible.
ConicProgram infeasible_program() {
  ConicProgram prog;
  const int blk = prog.add_psd_block(2);
  prog.add_row({{{prog.svec_index(blk, 0, 0), 1.0}}, -1.0});
  return prog;
}

Eigen::VectorXd random_psd_svec(std::mt19937_64& rng, int m, double shift) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd B(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) B(i, j) = g(rng);
  const Eigen::MatrixXd Q =
      B * B.transpose() + shift * Eigen::MatrixXd::Identity(m, m);
  return mat_to_svec(Q);
}

// Random program with strictly feasible primal and dual points, so the
// optimum exists and strong duality holds.
ConicProgram random_feasible_program(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nfree(0, 3), nlin(0, 6), nblk(1, 2),
      bsize(2, 4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);

  ConicProgram prog;
  const int nf = nfree(rng);
  const int nn = nlin(rng);
  if (nf > 0) prog.add_free(nf);
  if (nn > 0) prog.add_nonneg(nn);
  const int blocks = nblk(rng);
  std::vector<int> sizes;
  for (int b = 0; b < blocks; ++b) {
    sizes.push_back(bsize(rng));
    prog.add_psd_block(sizes.back());
  }
  const int N = prog.total_dim();

  Eigen::VectorXd x0(N), s0 = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < nf; ++i) x0[i] = g(rng);
  for (int i = 0; i < nn; ++i) {
    x0[nf + i] = pos(rng);
    s0[nf + i] = pos(rng);
  }
  int off = nf + nn;
  for (int b = 0; b < blocks; ++b) {
    const int len = sizes[b] * (sizes[b] + 1) / 2;
    x0.segment(off, len) = random_psd_svec(rng, sizes[b], 0.5);
    s0.segment(off, len) = random_psd_svec(rng, sizes[b], 0.5);
    off += len;
  }

  std::uniform_int_distribution<int> nrows(2, std::min(40, N));
  const int M = nrows(rng);
  Eigen::MatrixXd A(M, N);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < N; ++j) A(i, j) = g(rng);
  const Eigen::VectorXd b = A * x0;
  Eigen::VectorXd y0(M);
  for (int i = 0; i < M; ++i) y0[i] = g(rng);
  const Eigen::VectorXd c = A.transpose() * y0 + s0;

  for (int j = 0; j < N; ++j) prog.set_objective(j, c[j]);
  for (int i = 0; i < M; ++i) {
    ConicProgram::Row row;
    row.rhs = b[i];
    for (int j = 0; j < N; ++j) row.coeffs.emplace_back(j, A(i, j));
    prog.add_row(std::move(row));
  }
  return prog;
}

void check_block_psd(const ConicProgram& prog, const Eigen::VectorXd& x,
                     double tol) {
  for (int b = 0; b < prog.num_blocks(); ++b) {
    const int m = prog.block_dim(b);
    const Eigen::MatrixXd X =
        svec_to_mat(x.segment(prog.block_offset(b), m * (m + 1) / 2), m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -tol);
  }
}

}  // namespace

TEST_CASE("analytic: min q with [[q,1],[1,q]] psd") {
  const ConicSolution sol = solve(saddle_program());
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.primal[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(sol.obj_primal - sol.obj_dual) <=
        1e-8 * (1.0 + std::abs(sol.obj_primal)));
}

TEST_CASE("analytic: min trace with pinned corner") {
  const ConicSolution sol = solve(trace_program());
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.obj_primal == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("analytic: infeasible corner sign") {
  const ConicSolution sol = solve(infeasible_program());
  CHECK(sol.status == SolveStatus::kInfeasible);
}

TEST_CASE("unbounded direction is recognized") {
  // min -x11 with only x12 pinned: objective unbounded below.
  ConicProgram prog;
  const int blk = prog.add_psd_block(2);
  prog.set_objective(prog.svec_index(blk, 0, 0), -1.0);
  prog.add_row({{{prog.svec_index(blk, 1, 0), 1.0}}, 0.0});
  const ConicSolution sol = solve(prog);
  CHECK(sol.status == SolveStatus::kUnbounded);
}

TEST_CASE("cost order values") {
  CHECK(cost_order(47, 21) == 2180283.0);
  CHECK(cost_order(1, 1) == 1.0);
  CHECK(cost_order(304, 69) == 1938518016.0);
  CHECK(cost_order(304, 69) == doctest::Approx(1.94e9).epsilon(1e-2));
  CHECK_THROWS_AS(cost_order(0, 5), std::invalid_argument);
}

TEST_CASE("random feasible programs: gap, feasibility, psd blocks") {
  std::mt19937_64 rng(2024);
  for (int inst = 0; inst < 40; ++inst) {
    const ConicProgram prog = random_feasible_program(rng);
    const ConicSolution sol = solve(prog);
    REQUIRE_MESSAGE(sol.status == SolveStatus::kOptimal,
                    "instance " << inst << " status " << to_string(sol.status));
    CHECK(std::abs(sol.obj_primal - sol.obj_dual) <=
          1e-8 * (1.0 + std::abs(sol.obj_primal)));
    const Eigen::VectorXd resid =
        prog.dense_coeffs() * sol.primal - prog.dense_rhs();
    CHECK(resid.lpNorm<Eigen::Infinity>() <=
          1e-8 * (1.0 + prog.dense_rhs().lpNorm<Eigen::Infinity>()));
    check_block_psd(prog, sol.primal, 1e-9);
  }
}

TEST_CASE("determinism: bitwise-identical repeat solves") {
  std::mt19937_64 rng(7);
  const ConicProgram prog = random_feasible_program(rng);
  const ConicSolution a = solve(prog);
  const ConicSolution b = solve(prog);
  CHECK(a.iterations == b.iterations);
  CHECK(std::memcmp(&a.obj_primal, &b.obj_primal, sizeof(double)) == 0);
  CHECK(std::memcmp(&a.obj_dual, &b.obj_dual, sizeof(double)) == 0);
  CHECK(a.primal == b.primal);
  CHECK(a.eq_duals == b.eq_duals);
}

TEST_CASE("dump format round trip") {
  const ConicProgram prog = saddle_program();
  std::stringstream ss;
  dump_program(prog, ss);
  const ConicProgram back = read_program(ss);
  CHECK(back.total_dim() == prog.total_dim());
  CHECK(back.num_rows() == prog.num_rows());
  const ConicSolution a = solve(prog);
  const ConicSolution b = solve(back);
  CHECK(a.iterations == b.iterations);
  CHECK(a.obj_primal == b.obj_primal);
}

TEST_CASE("svec round trip preserves trace inner products") {
  std::mt19937_64 rng(5);
  const Eigen::VectorXd u = random_psd_svec(rng, 4, 0.1);
  const Eigen::VectorXd v = random_psd_svec(rng, 4, 0.1);
  const Eigen::MatrixXd U = svec_to_mat(u, 4);
  const Eigen::MatrixXd V = svec_to_mat(v, 4);
  CHECK(u.dot(v) == doctest::Approx((U * V).trace()).epsilon(1e-12));
  CHECK((mat_to_svec(U) - u).norm() == doctest::Approx(0.0));
}

TEST_CASE("declaration order is enforced") {
  ConicProgram prog;
  prog.add_nonneg(2);
  CHECK_THROWS_AS(prog.add_free(1), std::logic_error);
  prog.add_psd_block(2);
  CHECK_THROWS_AS(prog.add_nonneg(1), std::logic_error);
}
