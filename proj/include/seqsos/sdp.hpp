#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace seqsos {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

std::string to_string(SolveStatus status);

/// Block-structured conic program
///
///   min c'x   s.t.  A x = b,   x in K,
///
/// where K = R^nf x R^nn_+ x S^+_{m1} x ... is the product of a free block,
/// a nonnegative orthant, and PSD blocks. Scalarized variable order is
/// free | nonneg | svec(block 1) | svec(block 2) | ...; PSD blocks are
/// addressed through their lower triangle with sqrt(2)-scaled off-diagonal
/// entries, so that dot products of coordinates equal trace inner products.
class ConicProgram {
 public:
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    double rhs = 0.0;
  };

  /// Appends variables; the layout above requires all free variables to be
  /// declared before nonnegative ones and those before PSD blocks.
  /// Returns the first new scalar index (add_psd_block: the block index).
  int add_free(int count);
  int add_nonneg(int count);
  int add_psd_block(int size);

  /// Scalar coordinate of entry (i, j), i >= j, of a PSD block. Note the
  /// stored coordinate is sqrt(2) * X_ij for i != j.
  int svec_index(int block, int i, int j) const;

  void set_objective(int var, double coeff);
  int add_row(Row row);

  int free_vars() const { return free_vars_; }
  int nonneg_vars() const { return nonneg_vars_; }
  const std::vector<int>& psd_blocks() const { return psd_blocks_; }
  int num_blocks() const { return static_cast<int>(psd_blocks_.size()); }
  int block_dim(int block) const { return psd_blocks_[block]; }
  int block_offset(int block) const { return block_offsets_[block]; }

  /// Total scalar dimension N.
  int total_dim() const { return total_dim_; }
  /// Equality row count M.
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int cone_dim() const { return total_dim_ - free_vars_; }

  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<std::pair<int, double>>& objective() const { return obj_; }

  Eigen::MatrixXd dense_coeffs() const;
  Eigen::VectorXd dense_rhs() const;
  Eigen::VectorXd dense_objective() const;

 private:
  int free_vars_ = 0;
  int nonneg_vars_ = 0;
  std::vector<int> psd_blocks_;
  std::vector<int> block_offsets_;
  int total_dim_ = 0;
  std::vector<std::pair<int, double>> obj_;
  std::vector<Row> rows_;
};

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iters = 200;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Eigen::VectorXd primal;      // x
  Eigen::VectorXd eq_duals;    // y, one multiplier per row
  Eigen::VectorXd dual_slack;  // s in K*, zero on free coordinates
  double obj_primal = 0.0;
  double obj_dual = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double rel_gap = 0.0;
};

/// Dense primal-dual path-following interior-point method with
/// Nesterov-Todd scaling, Mehrotra predictor-corrector, and infeasible
/// start. Deterministic: identical inputs give bitwise-identical results.
ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts = {});

/// Per-solve cost-order estimate N^3 * M.
double cost_order(int total_dim, int num_rows);

/// Sparse text dump (see README for the format) and its reader.
void dump_program(const ConicProgram& prog, std::ostream& os);
ConicProgram read_program(std::istream& is);

/// svec/mat conversions for PSD block coordinates.
Eigen::MatrixXd svec_to_mat(const Eigen::Ref<const Eigen::VectorXd>& u, int m);
Eigen::VectorXd mat_to_svec(const Eigen::Ref<const Eigen::MatrixXd>& X);

}  // namespace seqsos
