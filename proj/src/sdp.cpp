#include "seqsos/sdp.hpp"

#include "seqsos/polynomial.hpp"  // format_double

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace seqsos {

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);
}  // namespace

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

int ConicProgram::add_free(int count) {
  if (nonneg_vars_ > 0 || !psd_blocks_.empty()) {
    throw std::logic_error("free variables must be declared first");
  }
  const int start = free_vars_;
  free_vars_ += count;
  total_dim_ += count;
  return start;
}

int ConicProgram::add_nonneg(int count) {
  if (!psd_blocks_.empty()) {
    throw std::logic_error("nonnegative variables must precede PSD blocks");
  }
  const int start = total_dim_;
  nonneg_vars_ += count;
  total_dim_ += count;
  return start;
}

int ConicProgram::add_psd_block(int size) {
  if (size < 1) throw std::invalid_argument("PSD block size must be >= 1");
  psd_blocks_.push_back(size);
  block_offsets_.push_back(total_dim_);
  total_dim_ += size * (size + 1) / 2;
  return static_cast<int>(psd_blocks_.size()) - 1;
}

int ConicProgram::svec_index(int block, int i, int j) const {
  const int m = psd_blocks_.at(block);
  if (i < j) std::swap(i, j);
  // column-major lower triangle: columns 0..j-1 hold m, m-1, ... entries
  return block_offsets_[block] + j * m - j * (j - 1) / 2 + (i - j);
}

void ConicProgram::set_objective(int var, double coeff) {
  obj_.emplace_back(var, coeff);
}

int ConicProgram::add_row(Row row) {
  rows_.push_back(std::move(row));
  return static_cast<int>(rows_.size()) - 1;
}

Eigen::MatrixXd ConicProgram::dense_coeffs() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(num_rows(), total_dim_);
  for (int i = 0; i < num_rows(); ++i) {
    for (const auto& [j, v] : rows_[i].coeffs) A(i, j) += v;
  }
  return A;
}

Eigen::VectorXd ConicProgram::dense_rhs() const {
  Eigen::VectorXd b(num_rows());
  for (int i = 0; i < num_rows(); ++i) b[i] = rows_[i].rhs;
  return b;
}

Eigen::VectorXd ConicProgram::dense_objective() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(total_dim_);
  for (const auto& [j, v] : obj_) c[j] += v;
  return c;
}

Eigen::MatrixXd svec_to_mat(const Eigen::Ref<const Eigen::VectorXd>& u, int m) {
  Eigen::MatrixXd X(m, m);
  int k = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i, ++k) {
      if (i == j) {
        X(i, i) = u[k];
      } else {
        X(i, j) = X(j, i) = u[k] / kSqrt2;
      }
    }
  }
  return X;
}

Eigen::VectorXd mat_to_svec(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  const int m = static_cast<int>(X.rows());
  Eigen::VectorXd u(m * (m + 1) / 2);
  int k = 0;
  for (int j = 0; j < m; ++j) {
    for (int i = j; i < m; ++i, ++k) {
      u[k] = (i == j) ? X(i, i) : kSqrt2 * 0.5 * (X(i, j) + X(j, i));
    }
  }
  return u;
}

double cost_order(int total_dim, int num_rows) {
  if (total_dim < 1 || num_rows < 1) {
    throw std::invalid_argument("cost_order requires N, M >= 1");
  }
  const double n = static_cast<double>(total_dim);
  return n * n * n * static_cast<double>(num_rows);
}

namespace {

// Nesterov-Todd scaling state for all cone coordinates (nonneg + PSD).
struct Scaling {
  Eigen::VectorXd h;      // nonneg: x_i / s_i
  Eigen::VectorXd lam_l;  // nonneg: sqrt(x_i s_i)
  std::vector<Eigen::MatrixXd> G;     // per block: scaling matrix, G S G = X
  std::vector<Eigen::MatrixXd> R;     // G = R R'
  std::vector<Eigen::MatrixXd> Rinv;
  std::vector<Eigen::VectorXd> lam;   // scaled spectrum
  std::vector<Eigen::LLT<Eigen::MatrixXd>> lltx, llts;
};

struct ConeView {
  int nn;                      // nonneg count
  std::vector<int> blk_size;   // PSD block sizes
  std::vector<int> blk_off;    // offsets within the cone segment
  int dim;                     // total cone scalar count
  int nu;                      // barrier degree
};

ConeView make_cone_view(const ConicProgram& prog) {
  ConeView cv;
  cv.nn = prog.nonneg_vars();
  cv.dim = prog.cone_dim();
  cv.nu = cv.nn;
  int off = cv.nn;
  for (int b = 0; b < prog.num_blocks(); ++b) {
    cv.blk_size.push_back(prog.block_dim(b));
    cv.blk_off.push_back(off);
    off += prog.block_dim(b) * (prog.block_dim(b) + 1) / 2;
    cv.nu += prog.block_dim(b);
  }
  return cv;
}

bool compute_scaling(const ConeView& cv, const Eigen::VectorXd& xc,
                     const Eigen::VectorXd& sc, Scaling* w) {
  w->h = xc.head(cv.nn).cwiseQuotient(sc.head(cv.nn));
  w->lam_l = (xc.head(cv.nn).cwiseProduct(sc.head(cv.nn))).cwiseSqrt();
  const int nb = static_cast<int>(cv.blk_size.size());
  w->G.resize(nb);
  w->R.resize(nb);
  w->Rinv.resize(nb);
  w->lam.resize(nb);
  w->lltx.resize(nb);
  w->llts.resize(nb);
  for (int b = 0; b < nb; ++b) {
    const int m = cv.blk_size[b];
    const int len = m * (m + 1) / 2;
    const Eigen::MatrixXd X = svec_to_mat(xc.segment(cv.blk_off[b], len), m);
    const Eigen::MatrixXd S = svec_to_mat(sc.segment(cv.blk_off[b], len), m);
    w->lltx[b].compute(X);
    w->llts[b].compute(S);
    if (w->lltx[b].info() != Eigen::Success || w->llts[b].info() != Eigen::Success) {
      return false;
    }
    const Eigen::MatrixXd Lx = w->lltx[b].matrixL();
    const Eigen::MatrixXd Ls = w->llts[b].matrixL();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ls.transpose() * Lx,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sig = svd.singularValues();
    if (sig.minCoeff() <= 0.0) return false;
    const Eigen::VectorXd isqrt = sig.cwiseSqrt().cwiseInverse();
    w->R[b] = Lx * svd.matrixV() * isqrt.asDiagonal();
    w->Rinv[b] = sig.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                 Lx.triangularView<Eigen::Lower>().solve(
                     Eigen::MatrixXd::Identity(m, m));
    w->G[b] = w->R[b] * w->R[b].transpose();
    w->lam[b] = sig;
  }
  return true;
}

// u -> H u where H is the NT quadratic representation: elementwise x/s on the
// orthant, G mat(u) G on PSD blocks.
Eigen::VectorXd apply_ntscaling(const ConeView& cv, const Scaling& w,
                                const Eigen::VectorXd& u) {
  Eigen::VectorXd out(cv.dim);
  out.head(cv.nn) = w.h.cwiseProduct(u.head(cv.nn));
  for (size_t b = 0; b < cv.blk_size.size(); ++b) {
    const int m = cv.blk_size[b];
    const int len = m * (m + 1) / 2;
    const Eigen::MatrixXd U = svec_to_mat(u.segment(cv.blk_off[b], len), m);
    out.segment(cv.blk_off[b], len) = mat_to_svec(w.G[b] * U * w.G[b]);
  }
  return out;
}

// Largest step a with z + a*dz staying in the cone (chol factor of z given
// for PSD blocks); returns +inf when unrestricted.
double max_step(const ConeView& cv, const Eigen::VectorXd& z,
                const std::vector<Eigen::LLT<Eigen::MatrixXd>>& llt,
                const Eigen::VectorXd& dz) {
  double alpha = kInfinity;
  for (int i = 0; i < cv.nn; ++i) {
    if (dz[i] < 0.0) alpha = std::min(alpha, -z[i] / dz[i]);
  }
  for (size_t b = 0; b < cv.blk_size.size(); ++b) {
    const int m = cv.blk_size[b];
    const int len = m * (m + 1) / 2;
    const Eigen::MatrixXd D = svec_to_mat(dz.segment(cv.blk_off[b], len), m);
    const Eigen::MatrixXd L = llt[b].matrixL();
    Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(D);
    W = L.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
    W = 0.5 * (W + W.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues().minCoeff();
    if (emin < 0.0) alpha = std::min(alpha, -1.0 / emin);
  }
  return alpha;
}

struct KktSolver {
  Eigen::MatrixXd K;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  int m = 0, nf = 0;

  void factor(const Eigen::MatrixXd& k11, const Eigen::MatrixXd& af) {
    m = static_cast<int>(k11.rows());
    nf = static_cast<int>(af.cols());
    K.setZero(m + nf, m + nf);
    K.topLeftCorner(m, m) = k11;
    K.topRightCorner(m, nf) = af;
    K.bottomLeftCorner(nf, m) = af.transpose();
    lu.compute(K);
  }

  // Solve K z = rhs with one round of iterative refinement.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd z = lu.solve(rhs);
    z += lu.solve(rhs - K * z);
    return z;
  }
};

}  // namespace

ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts) {
  const int N = prog.total_dim();
  const int M = prog.num_rows();
  const int nf = prog.free_vars();
  if (N < 1 || M < 1) throw std::invalid_argument("solve requires N, M >= 1");
  const ConeView cv = make_cone_view(prog);
  if (cv.nu < 1) {
    throw std::invalid_argument("program has no cone variables");
  }

  const Eigen::MatrixXd A = prog.dense_coeffs();
  const Eigen::VectorXd b = prog.dense_rhs();
  const Eigen::VectorXd c = prog.dense_objective();
  const auto Af = A.leftCols(nf);
  const auto Ac = A.rightCols(cv.dim);
  const double bscale = 1.0 + b.lpNorm<Eigen::Infinity>();
  const double cscale = 1.0 + c.lpNorm<Eigen::Infinity>();
  const double ascale = std::max(1.0, A.lpNorm<Eigen::Infinity>());

  // Identity-scaled interior start.
  const double tau = 1.0 + b.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(N);
  for (int i = 0; i < cv.nn; ++i) x[nf + i] = s[nf + i] = tau;
  for (size_t bk = 0; bk < cv.blk_size.size(); ++bk) {
    const Eigen::VectorXd eye =
        mat_to_svec(tau * Eigen::MatrixXd::Identity(cv.blk_size[bk], cv.blk_size[bk]));
    x.segment(nf + cv.blk_off[bk], eye.size()) = eye;
    s.segment(nf + cv.blk_off[bk], eye.size()) = eye;
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(M);

  ConicSolution sol;
  KktSolver kkt;
  int stalls = 0;

  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    const Eigen::VectorXd rp = b - A * x;
    Eigen::VectorXd rd = c - A.transpose() * y - s;
    const double pobj = c.dot(x);
    const double dobj = b.dot(y);
    const double pinf = rp.lpNorm<Eigen::Infinity>() / bscale;
    const double dinf = rd.lpNorm<Eigen::Infinity>() / cscale;
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

    sol.primal = x;
    sol.eq_duals = y;
    sol.dual_slack = s;
    sol.obj_primal = pobj;
    sol.obj_dual = dobj;
    sol.iterations = iter;
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    sol.rel_gap = relgap;

    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !rp.allFinite()) {
      sol.status = SolveStatus::kNumericalFailure;
      return sol;
    }

    if (pinf <= opts.feas_tol && dinf <= opts.feas_tol && relgap <= opts.gap_tol) {
      sol.status = SolveStatus::kOptimal;
      return sol;
    }

    // Farkas-type certificates: an improving dual ray proves primal
    // infeasibility, an improving primal ray proves unboundedness.
    if (dobj > 1e-8 * bscale) {
      const double ray_res = (A.transpose() * y + s).lpNorm<Eigen::Infinity>();
      if (ray_res <= 1e-8 * ascale * dobj) {
        sol.status = SolveStatus::kInfeasible;
        return sol;
      }
    }
    if (pobj < -1e-8 * cscale) {
      const double ray_res = (A * x).lpNorm<Eigen::Infinity>();
      if (ray_res <= 1e-8 * ascale * (-pobj)) {
        sol.status = SolveStatus::kUnbounded;
        return sol;
      }
    }

    if (iter == opts.max_iters) break;

    const Eigen::VectorXd xc = x.tail(cv.dim);
    const Eigen::VectorXd sc = s.tail(cv.dim);
    const double mu = xc.dot(sc) / cv.nu;

    Scaling w;
    if (!compute_scaling(cv, xc, sc, &w)) {
      sol.status = SolveStatus::kNumericalFailure;
      return sol;
    }

    // Normal-equation block A_c H A_c' and the free-variable border.
    Eigen::MatrixXd HAt(cv.dim, M);
    for (int i = 0; i < M; ++i) {
      HAt.col(i) = apply_ntscaling(cv, w, Ac.row(i).transpose());
    }
    Eigen::MatrixXd k11 = Ac * HAt;
    k11 = 0.5 * (k11 + k11.transpose());
    kkt.factor(k11, Af);

    const Eigen::VectorXd rd_c = rd.tail(cv.dim);
    const Eigen::VectorXd rd_f = rd.head(nf);

    const auto direction = [&](const Eigen::VectorXd& rc) {
      Eigen::VectorXd rhs(M + nf);
      rhs.head(M) = rp - Ac * (rc - apply_ntscaling(cv, w, rd_c));
      rhs.tail(nf) = rd_f;
      const Eigen::VectorXd z = kkt.solve(rhs);
      const Eigen::VectorXd dy = z.head(M);
      const Eigen::VectorXd dxf = z.tail(nf);
      const Eigen::VectorXd dsc = rd_c - Ac.transpose() * dy;
      const Eigen::VectorXd dxc = rc - apply_ntscaling(cv, w, dsc);
      Eigen::VectorXd dx(N);
      dx.head(nf) = dxf;
      dx.tail(cv.dim) = dxc;
      return std::make_tuple(dx, dy, dsc);
    };

    // Predictor.
    const auto [dx_a, dy_a, dsc_a] = direction(-xc);
    const double ap_a = std::min(1.0, max_step(cv, xc, w.lltx, dx_a.tail(cv.dim)));
    const double ad_a = std::min(1.0, max_step(cv, sc, w.llts, dsc_a));
    const double mu_aff = (xc + ap_a * dx_a.tail(cv.dim)).dot(sc + ad_a * dsc_a) / cv.nu;
    const double sigma =
        std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector right-hand side in the scaled space.
    Eigen::VectorXd rc(cv.dim);
    {
      const Eigen::VectorXd dxa = dx_a.tail(cv.dim);
      for (int i = 0; i < cv.nn; ++i) {
        rc[i] = (sigma * mu - xc[i] * sc[i] - dxa[i] * dsc_a[i]) / sc[i];
      }
      for (size_t bk = 0; bk < cv.blk_size.size(); ++bk) {
        const int m = cv.blk_size[bk];
        const int len = m * (m + 1) / 2;
        const Eigen::MatrixXd dXh =
            w.Rinv[bk] * svec_to_mat(dxa.segment(cv.blk_off[bk], len), m) *
            w.Rinv[bk].transpose();
        const Eigen::MatrixXd dSh =
            w.R[bk].transpose() * svec_to_mat(dsc_a.segment(cv.blk_off[bk], len), m) *
            w.R[bk];
        const Eigen::MatrixXd cross = 0.5 * (dXh * dSh + dSh * dXh);
        const Eigen::VectorXd& lam = w.lam[bk];
        Eigen::MatrixXd Mh(m, m);
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < m; ++j) {
            const double num = (i == j ? sigma * mu - lam[i] * lam[i] : 0.0) - cross(i, j);
            Mh(i, j) = 2.0 * num / (lam[i] + lam[j]);
          }
        }
        rc.segment(cv.blk_off[bk], len) =
            mat_to_svec(w.R[bk] * Mh * w.R[bk].transpose());
      }
    }

    const auto [dx, dy, dsc] = direction(rc);
    const double ap = std::min(1.0, 0.99 * max_step(cv, xc, w.lltx, dx.tail(cv.dim)));
    const double ad = std::min(1.0, 0.99 * max_step(cv, sc, w.llts, dsc));

    if (std::min(ap, ad) < 1e-10 || !dx.allFinite() || !dy.allFinite()) {
      if (++stalls >= 3) {
        sol.status = SolveStatus::kNumericalFailure;
        return sol;
      }
    } else {
      stalls = 0;
    }

    x += ap * dx;
    y += ad * dy;
    s.tail(cv.dim) += ad * dsc;
  }

  sol.status = SolveStatus::kNumericalFailure;
  return sol;
}

void dump_program(const ConicProgram& prog, std::ostream& os) {
  os << prog.total_dim() << " " << prog.num_rows() << " "
     << prog.num_blocks() << "\n";
  os << prog.free_vars() << " " << prog.nonneg_vars();
  for (int b = 0; b < prog.num_blocks(); ++b) os << " " << prog.block_dim(b);
  os << "\n";
  const auto rows = prog.rows();
  for (int i = 0; i < prog.num_rows(); ++i) {
    if (rows[i].rhs != 0.0) {
      os << "b " << i << " " << format_double(rows[i].rhs) << "\n";
    }
  }
  for (const auto& [j, v] : prog.objective()) {
    os << "c " << j << " " << format_double(v) << "\n";
  }
  for (int i = 0; i < prog.num_rows(); ++i) {
    for (const auto& [j, v] : rows[i].coeffs) {
      os << "A " << i << " " << j << " " << format_double(v) << "\n";
    }
  }
}

ConicProgram read_program(std::istream& is) {
  int n = 0, m = 0, nblocks = 0;
  if (!(is >> n >> m >> nblocks)) {
    throw std::runtime_error("dump parse: bad header");
  }
  int nf = 0, nn = 0;
  if (!(is >> nf >> nn)) throw std::runtime_error("dump parse: bad sizes line");
  ConicProgram prog;
  if (nf > 0) prog.add_free(nf);
  if (nn > 0) prog.add_nonneg(nn);
  for (int b = 0; b < nblocks; ++b) {
    int size = 0;
    if (!(is >> size)) throw std::runtime_error("dump parse: bad block size");
    prog.add_psd_block(size);
  }
  if (prog.total_dim() != n) throw std::runtime_error("dump parse: N mismatch");
  std::vector<ConicProgram::Row> rows(m);
  std::string tag;
  while (is >> tag) {
    if (tag == "b") {
      int i;
      double v;
      is >> i >> v;
      rows.at(i).rhs = v;
    } else if (tag == "c") {
      int j;
      double v;
      is >> j >> v;
      prog.set_objective(j, v);
    } else if (tag == "A") {
      int i, j;
      double v;
      is >> i >> j >> v;
      rows.at(i).coeffs.emplace_back(j, v);
    } else {
      throw std::runtime_error("dump parse: unknown tag '" + tag + "'");
    }
  }
  for (auto& row : rows) prog.add_row(std::move(row));
  return prog;
}

}  // namespace seqsos
