#include "seqsos/model.hpp"

#include <cmath>
#include <stdexcept>

namespace seqsos {

LinearPolyMap::LinearPolyMap(MonomialBasis domain,
                             std::vector<Polynomial> images)
    : domain_(std::move(domain)), images_(std::move(images)) {
  if (static_cast<int>(images_.size()) != domain_.size()) {
    throw std::invalid_argument("LinearPolyMap: one image per basis monomial");
  }
  for (const Polynomial& im : images_) {
    max_image_degree_ = std::max(max_image_degree_, im.degree());
  }
}

LinearPolyMap LinearPolyMap::identity(const MonomialBasis& domain) {
  LinearPolyMap map;
  map.domain_ = domain;
  map.identity_ = true;
  map.max_image_degree_ = domain.maxdeg();
  return map;
}

Polynomial LinearPolyMap::apply(const Polynomial& p) const {
  if (identity_) return p;
  Polynomial out(domain_.nvars());
  for (const auto& [m, c] : p.terms()) {
    const int idx = domain_.index_of(m);
    if (idx < 0) {
      throw std::invalid_argument("LinearPolyMap: input outside domain basis");
    }
    out += images_[idx] * c;
  }
  return out;
}

Eigen::MatrixXd multiplication_matrix(const Polynomial& q,
                                      const MonomialBasis& domain,
                                      const MonomialBasis& target) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(target.size(), domain.size());
  for (int col = 0; col < domain.size(); ++col) {
    for (const auto& [m, c] : q.terms()) {
      const int row = target.index_of(m * domain[col]);
      if (row < 0) {
        throw std::invalid_argument(
            "multiplication_matrix: product degree exceeds target basis");
      }
      M(row, col) += c;
    }
  }
  return M;
}

namespace {

// Matrix of delta_v -> coeff * op(delta_v) into the target basis.
Eigen::MatrixXd factor_matrix(const Polynomial& coeff, const TermFactor& f,
                              const MonomialBasis& domain,
                              const MonomialBasis& target) {
  if (!f.op || f.op->is_identity()) {
    return multiplication_matrix(coeff, domain, target);
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(target.size(), domain.size());
  for (int col = 0; col < domain.size(); ++col) {
    const Polynomial image = coeff * f.op->images()[col];
    for (const auto& [m, c] : image.terms()) {
      const int row = target.index_of(m);
      if (row < 0) {
        throw std::invalid_argument(
            "factor_matrix: image degree exceeds target basis");
      }
      M(row, col) += c;
    }
  }
  return M;
}

Polynomial factor_value(const TermFactor& f, const std::vector<Polynomial>& xi) {
  const Polynomial& value = xi.at(f.var);
  return (f.op && !f.op->is_identity()) ? f.op->apply(value) : value;
}

}  // namespace

int NlSosProblem::add_var(std::string name, MonomialBasis space, bool sos) {
  if (var_index(name) >= 0) {
    throw std::invalid_argument("duplicate decision variable '" + name + "'");
  }
  if (sos && space.maxdeg() % 2 != 0) {
    throw std::invalid_argument("SOS-flagged variable '" + name +
                                "' needs an even max degree");
  }
  const int id = num_vars();
  offsets_.push_back(total_dim_);
  total_dim_ += space.size();
  if (sos) sos_vars_.push_back(id);
  vars_.push_back({std::move(name), std::move(space), sos});
  return id;
}

void NlSosProblem::add_constraint(ConstraintExpr expr) {
  if (expr.cone.maxdeg() % 2 != 0) {
    throw std::invalid_argument("constraint cone degree must be even");
  }
  for (const ConstraintTerm& term : expr.terms) {
    int deg = term.coeff.degree();
    for (const TermFactor& f : term.factors) {
      if (f.var < 0 || f.var >= num_vars()) {
        throw std::invalid_argument("constraint references unknown variable");
      }
      const auto& space = vars_[f.var].space;
      if (f.op && !(f.op->domain() == space)) {
        throw std::invalid_argument("factor map domain mismatch");
      }
      deg += f.op ? f.op->max_image_degree() : space.maxdeg();
    }
    if (deg > expr.cone.maxdeg()) {
      throw std::invalid_argument(
          "constraint term degree " + std::to_string(deg) +
          " overflows cone degree " + std::to_string(expr.cone.maxdeg()));
    }
  }
  constraints_.push_back(std::move(expr));
}

void NlSosProblem::set_cost(Eigen::VectorXd f) {
  if (f.size() != total_dim_) {
    throw std::invalid_argument("cost dimension != total primal dimension");
  }
  cost_ = std::move(f);
}

int NlSosProblem::var_index(const std::string& name) const {
  for (int v = 0; v < num_vars(); ++v) {
    if (vars_[v].name == name) return v;
  }
  return -1;
}

Eigen::VectorXd NlSosProblem::pack(const std::vector<Polynomial>& xi) const {
  if (static_cast<int>(xi.size()) != num_vars()) {
    throw std::invalid_argument("pack: one polynomial per decision variable");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(total_dim_);
  for (int v = 0; v < num_vars(); ++v) {
    out.segment(offsets_[v], vars_[v].space.size()) =
        CoeffVector::from_polynomial(xi[v], vars_[v].space).data();
  }
  return out;
}

std::vector<Polynomial> NlSosProblem::unpack(
    const Eigen::VectorXd& coords) const {
  if (coords.size() != total_dim_) {
    throw std::invalid_argument("unpack: coordinate dimension mismatch");
  }
  std::vector<Polynomial> out;
  out.reserve(num_vars());
  for (int v = 0; v < num_vars(); ++v) {
    out.push_back(
        CoeffVector(vars_[v].space,
                    coords.segment(offsets_[v], vars_[v].space.size()))
            .to_polynomial());
  }
  return out;
}

Iterate make_iterate(const NlSosProblem& prob, std::vector<Polynomial> xi) {
  Iterate it;
  it.xi = std::move(xi);
  for (int c = 0; c < prob.num_constraints(); ++c) {
    it.ell.emplace_back(prob.constraint(c).cone);
  }
  for (int v : prob.sos_vars()) {
    it.svar.emplace_back(prob.var(v).space);
  }
  return it;
}

double dual_norm(const Iterate& it) {
  double s = 0.0;
  for (const CoeffVector& l : it.ell) s += l.data().squaredNorm();
  for (const CoeffVector& l : it.svar) s += l.data().squaredNorm();
  return std::sqrt(s);
}

double dual_distance(const Iterate& a, const Iterate& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.ell.size(); ++i) {
    s += (a.ell[i].data() - b.ell[i].data()).squaredNorm();
  }
  for (size_t i = 0; i < a.svar.size(); ++i) {
    s += (a.svar[i].data() - b.svar[i].data()).squaredNorm();
  }
  return std::sqrt(s);
}

std::vector<Polynomial> eval_g(const NlSosProblem& prob,
                               const std::vector<Polynomial>& xi) {
  std::vector<Polynomial> out;
  out.reserve(prob.num_constraints());
  for (int c = 0; c < prob.num_constraints(); ++c) {
    const ConstraintExpr& expr = prob.constraint(c);
    Polynomial g(expr.cone.nvars());
    for (const ConstraintTerm& term : expr.terms) {
      Polynomial prod = term.coeff;
      for (const TermFactor& f : term.factors) prod = prod * factor_value(f, xi);
      g += prod;
    }
    if (g.degree() > expr.cone.maxdeg()) {
      throw std::invalid_argument("eval_g: degree overflow vs target cone");
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<Polynomial> apply_deriv(const NlSosProblem& prob,
                                    const std::vector<Polynomial>& xi0,
                                    const std::vector<Polynomial>& delta) {
  std::vector<Polynomial> out;
  out.reserve(prob.num_constraints());
  for (int c = 0; c < prob.num_constraints(); ++c) {
    const ConstraintExpr& expr = prob.constraint(c);
    Polynomial d(expr.cone.nvars());
    for (const ConstraintTerm& term : expr.terms) {
      for (size_t p = 0; p < term.factors.size(); ++p) {
        Polynomial prod = term.coeff * factor_value(term.factors[p], delta);
        for (size_t q = 0; q < term.factors.size(); ++q) {
          if (q != p) prod = prod * factor_value(term.factors[q], xi0);
        }
        d += prod;
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

Eigen::MatrixXd deriv_matrix(const NlSosProblem& prob, int c,
                             const std::vector<Polynomial>& xi0) {
  const ConstraintExpr& expr = prob.constraint(c);
  Eigen::MatrixXd J =
      Eigen::MatrixXd::Zero(expr.cone.size(), prob.total_dim());
  for (const ConstraintTerm& term : expr.terms) {
    for (size_t p = 0; p < term.factors.size(); ++p) {
      Polynomial fixed = term.coeff;
      for (size_t q = 0; q < term.factors.size(); ++q) {
        if (q != p) fixed = fixed * factor_value(term.factors[q], xi0);
      }
      const TermFactor& f = term.factors[p];
      const MonomialBasis& space = prob.var(f.var).space;
      J.middleCols(prob.var_offset(f.var), space.size()) +=
          factor_matrix(fixed, f, space, expr.cone);
    }
  }
  return J;
}

Eigen::VectorXd apply_adjoint(const NlSosProblem& prob,
                              const std::vector<Polynomial>& xi0,
                              const std::vector<CoeffVector>& ell) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(prob.total_dim());
  for (int c = 0; c < prob.num_constraints(); ++c) {
    w += deriv_matrix(prob, c, xi0).transpose() * ell[c].data();
  }
  return w;
}

double lagrangian(const NlSosProblem& prob, const Iterate& it) {
  double value = prob.cost().dot(prob.pack(it.xi));
  const std::vector<Polynomial> g = eval_g(prob, it.xi);
  for (int c = 0; c < prob.num_constraints(); ++c) {
    value -= it.ell[c].pair(g[c]);
  }
  return value;
}

KktResidual kkt_residual(const NlSosProblem& prob, const Iterate& it,
                         const SolverOptions& opts) {
  KktResidual out;

  Eigen::VectorXd s_packed = Eigen::VectorXd::Zero(prob.total_dim());
  for (size_t k = 0; k < prob.sos_vars().size(); ++k) {
    const int v = prob.sos_vars()[k];
    s_packed.segment(prob.var_offset(v), prob.var(v).space.size()) =
        it.svar[k].data();
  }
  out.stationarity =
      (prob.cost() - apply_adjoint(prob, it.xi, it.ell) - s_packed).norm();

  for (size_t k = 0; k < prob.sos_vars().size(); ++k) {
    const int v = prob.sos_vars()[k];
    out.comp_primal += std::abs(it.svar[k].pair(it.xi[v]));
  }
  const std::vector<Polynomial> g = eval_g(prob, it.xi);
  for (int c = 0; c < prob.num_constraints(); ++c) {
    out.comp_dual += std::abs(it.ell[c].pair(g[c]));
  }

  for (int c = 0; c < prob.num_constraints(); ++c) {
    const SosCheck chk = check_sos(g[c], prob.constraint(c).cone.maxdeg() / 2, opts);
    out.feas_primal = std::max(out.feas_primal, chk.violation());
  }
  for (int v : prob.sos_vars()) {
    const SosCheck chk = check_sos(it.xi[v], prob.var(v).space.maxdeg() / 2, opts);
    out.feas_primal = std::max(out.feas_primal, chk.violation());
  }
  return out;
}

}  // namespace seqsos
