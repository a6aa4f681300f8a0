#pragma once

// End-user computations: outer and inner polynomial superlevel-set (PSS)
// approximations of a compact basic semialgebraic set, SOS bounding
// boxes, and LP-based PSS fitting of point clouds.
//
// All conic assemblies run, by default, in coordinates rescaled to
// [-1, 1]^n: monomial Gram problems condition very poorly on skewed
// boxes, and the rescaling is mathematically transparent (results are
// mapped back and the objective picks up the Jacobian factor).

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pss/certify.hpp"
#include "pss/moments.hpp"
#include "pss/poly.hpp"
#include "pss/rng.hpp"
#include "pss/solver.hpp"

namespace pss {

/// K = {x : g_i(x) >= 0 for all i}, assumed contained in the box.
struct SemialgSet {
  int n = 1;
  std::vector<MultiPoly> generators;
  Box box;

  void validate() const {
    box.validate();
    if (box.dim() != n) throw std::invalid_argument("SemialgSet: box dim mismatch");
    for (const auto& g : generators)
      if (g.dim() != n)
        throw std::invalid_argument("SemialgSet: generator dim mismatch");
  }

  /// Exact membership, zero tolerance; boundary points belong to K.
  bool member(const Eigen::VectorXd& x) const {
    for (const auto& g : generators)
      if (g.eval(x) < 0.0) return false;
    return true;
  }
};

enum class PssKind { Outer, Inner, Fit };

inline const char* to_string(PssKind k) {
  switch (k) {
    case PssKind::Outer: return "outer";
    case PssKind::Inner: return "inner";
    case PssKind::Fit: return "fit";
  }
  return "unknown";
}

enum class RescaleMode { Auto, On, Off };

struct ApproxSettings {
  RescaleMode rescale = RescaleMode::Auto;
  SolverSettings solver;
  double certTol = 1e-6;    // max certificate coefficient mismatch accepted
  int fitGridPerAxis = 50;  // positivity grid for the LP fit
};

struct PssResult {
  MultiPoly p;  // in the original coordinates
  double w = 0.0;
  PssKind kind = PssKind::Outer;
  int degree = 0;
  int order = 0;
  SolveStatus status = SolveStatus::NumericalFailure;
  double gap = 0.0;
  double primalInfeas = 0.0;
  double dualInfeas = 0.0;
  int iterations = 0;
  bool rescaled = false;
  // SOS paths only: certificate Grams (in solve coordinates) per
  // constraint, s_0 first, and the reconstruction residual
  std::vector<std::vector<GramDecomposition>> certificates;
  double certResidual = -1.0;
  bool certified = false;

  bool usable_status() const {
    return status == SolveStatus::Optimal || status == SolveStatus::NearOptimal;
  }
};

namespace detail {

// x = shift + scale .* u maps [-1,1]^n onto the box
struct SolveFrame {
  bool active = false;
  Eigen::VectorXd shift, scale;
  Box box;  // solve-coordinate box

  static SolveFrame make(const Box& B, RescaleMode mode) {
    SolveFrame f;
    const int n = B.dim();
    bool identity = true;
    for (int i = 0; i < n; ++i)
      if (B.a[i] != -1.0 || B.b[i] != 1.0) identity = false;
    f.active = (mode != RescaleMode::Off) && !identity;
    if (f.active) {
      f.shift = 0.5 * (B.a + B.b);
      f.scale = 0.5 * (B.b - B.a);
      f.box = Box{Eigen::VectorXd::Constant(n, -1.0), Eigen::VectorXd::Constant(n, 1.0)};
    } else {
      f.shift = Eigen::VectorXd::Zero(n);
      f.scale = Eigen::VectorXd::Ones(n);
      f.box = B;
    }
    return f;
  }

  double jacobian() const { return active ? scale.prod() : 1.0; }

  MultiPoly to_solve(const MultiPoly& p) const {
    return active ? p.affine_substitute(shift, scale) : p;
  }
  MultiPoly to_original(const MultiPoly& p) const {
    if (!active) return p;
    const int n = static_cast<int>(shift.size());
    Eigen::VectorXd invShift(n), invScale(n);
    for (int i = 0; i < n; ++i) {
      invScale[i] = 1.0 / scale[i];
      invShift[i] = -shift[i] / scale[i];
    }
    return p.affine_substitute(invShift, invScale);
  }
  Eigen::VectorXd point_to_solve(const Eigen::VectorXd& x) const {
    if (!active) return x;
    return ((x - shift).array() / scale.array()).matrix();
  }
};

inline std::vector<MultiPoly> box_quadratics(const Box& B) {
  std::vector<MultiPoly> out;
  for (int j = 0; j < B.dim(); ++j) {
    MultiPoly lo = MultiPoly::variable(B.dim(), j) - MultiPoly::constant(B.dim(), B.a[j]);
    MultiPoly hi = MultiPoly::constant(B.dim(), B.b[j]) - MultiPoly::variable(B.dim(), j);
    out.push_back(lo * hi);
  }
  return out;
}

inline int default_order(int d) { return (d + 1) / 2; }

// scaling a generator by a positive constant leaves the set unchanged
// but keeps the multiplier blocks well conditioned
inline MultiPoly normalized(const MultiPoly& g) {
  const double m = g.max_abs_coeff();
  return m > 0.0 ? g.scaled(1.0 / m) : g;
}

inline PssResult finish_sos_result(const AssembledProblem& asmb,
                                   const ConicSolution& sol,
                                   const SolveFrame& frame, PssKind kind, int d,
                                   int r, double certTol) {
  PssResult res;
  res.kind = kind;
  res.degree = d;
  res.order = r;
  res.status = sol.status;
  res.gap = sol.gap;
  res.primalInfeas = sol.primalInfeas;
  res.dualInfeas = sol.dualInfeas;
  res.iterations = sol.iterations;
  res.rescaled = frame.active;
  res.w = sol.primalObj;
  if (sol.primal.size() > 0) {
    MultiPoly pu = asmb.constraints.front().target.instantiate(
        sol.primal.head(asmb.numFree));
    res.p = frame.to_original(pu);
    for (std::size_t ci = 0; ci < asmb.constraints.size(); ++ci)
      res.certificates.push_back(
          extract_certificate(asmb, sol, static_cast<int>(ci)));
    res.certResidual = certificate_residual(asmb, sol);
    res.certified = sol.usable() && res.certResidual <= certTol;
  }
  return res;
}

}  // namespace detail

/// Minimum-L1-norm polynomial p of degree d with p >= 0 on B and p >= 1
/// on K, both SOS-certified at relaxation order r (default ceil(d/2)).
/// U(p) = {x in B : p(x) >= 1} is an outer approximation of K.
inline PssResult outer_pss(const SemialgSet& K, int d, int r = -1,
                           const ApproxSettings& settings = {}) {
  K.validate();
  if (d < 0) throw std::invalid_argument("outer_pss: degree must be >= 0");
  if (r < 0) r = detail::default_order(d);

  const auto frame = detail::SolveFrame::make(K.box, settings.rescale);
  std::vector<MultiPoly> gens;
  for (const auto& g : K.generators)
    gens.push_back(detail::normalized(frame.to_solve(g)));
  const auto boxQ = detail::box_quadratics(frame.box);

  auto cB = sos_constraint(LinearPolyExpr::coefficient_vector(K.n, d), boxQ, r, "B");
  // with no generators the set is the box itself and p - 1 is certified
  // over the box quadratics
  auto cK = sos_constraint(LinearPolyExpr::coefficient_vector(K.n, d, -1.0),
                           gens.empty() ? boxQ : gens, r, "K");
  Eigen::VectorXd obj = frame.jacobian() * objective_vector(frame.box, K.n, d);
  auto asmb = assemble(K.n, obj, {cB, cK});
  ConicSolution sol = solve_conic(asmb.problem, settings.solver);
  return detail::finish_sos_result(asmb, sol, frame, PssKind::Outer, d, r,
                                   settings.certTol);
}

/// Outer PSS of the complement of K in B; the sublevel set
/// V(p) = {x in B : p(x) <= 1} is an inner approximation of K. The
/// complement is covered by the sets K_j = {x in B : g_j(x) <= 0},
/// certified with generator -g_j plus the box quadratics.
inline PssResult inner_pss(const SemialgSet& K, int d, int r = -1,
                           const ApproxSettings& settings = {}) {
  K.validate();
  if (d < 0) throw std::invalid_argument("inner_pss: degree must be >= 0");
  if (r < 0) r = detail::default_order(d);

  const auto frame = detail::SolveFrame::make(K.box, settings.rescale);
  const auto boxQ = detail::box_quadratics(frame.box);

  std::vector<PositivityConstraint> cons;
  cons.push_back(
      sos_constraint(LinearPolyExpr::coefficient_vector(K.n, d), boxQ, r, "B"));
  for (std::size_t j = 0; j < K.generators.size(); ++j) {
    std::vector<MultiPoly> gj = boxQ;
    gj.insert(gj.begin(),
              detail::normalized(frame.to_solve(K.generators[j])).scaled(-1.0));
    cons.push_back(sos_constraint(
        LinearPolyExpr::coefficient_vector(K.n, d, -1.0), gj, r,
        "K" + std::to_string(j + 1)));
  }
  Eigen::VectorXd obj = frame.jacobian() * objective_vector(frame.box, K.n, d);
  auto asmb = assemble(K.n, obj, cons);
  ConicSolution sol = solve_conic(asmb.problem, settings.solver);
  return detail::finish_sos_result(asmb, sol, frame, PssKind::Inner, d, r,
                                   settings.certTol);
}

/// Per-coordinate SOS bounds: for each j the returned interval
/// [a_j, b_j] satisfies a_j <= min_K x_j and b_j >= max_K x_j (the
/// relaxation bounds from outside). Throws when a coordinate relaxation
/// is unbounded, which indicates the set may be unbounded.
inline Box bounding_box(const std::vector<MultiPoly>& generators, int n, int r,
                        const SolverSettings& solver = {}) {
  if (generators.empty())
    throw std::invalid_argument("bounding_box: need at least one generator");
  for (const auto& g : generators)
    if (g.dim() != n)
      throw std::invalid_argument("bounding_box: generator dim mismatch");

  Eigen::VectorXd lo(n), hi(n);
  for (int j = 0; j < n; ++j) {
    for (int sign = 0; sign < 2; ++sign) {
      // maximize y subject to sigma*x_j - y SOS-certified on K
      const double sigma = sign == 0 ? 1.0 : -1.0;
      LinearPolyExpr target;
      target.dim = n;
      target.constant = MultiPoly::variable(n, j, sigma);
      target.varTerms.emplace_back(0, MultiPoly::constant(n, -1.0));
      auto c = sos_constraint(std::move(target), generators, r, "bbox");
      Eigen::VectorXd obj = Eigen::VectorXd::Constant(1, -1.0);
      auto asmb = assemble(n, obj, {std::move(c)});
      ConicSolution sol = solve_conic(asmb.problem, solver);
      // no certifiable linear bound exists: either the relaxation
      // degenerates (unbounded y) or no feasible certificate exists at
      // all (infeasible); both indicate the set may be unbounded
      if (sol.status == SolveStatus::Unbounded ||
          sol.status == SolveStatus::Infeasible)
        throw std::runtime_error("bounding_box: coordinate " +
                                 std::to_string(j + 1) +
                                 ": set may be unbounded");
      if (!sol.usable())
        throw std::runtime_error("bounding_box: coordinate " +
                                 std::to_string(j + 1) +
                                 ": solver failed (" + to_string(sol.status) + ")");
      const double y = sol.primal[0];
      if (sign == 0)
        lo[j] = y;
      else
        hi[j] = -y;
    }
    if (!(lo[j] < hi[j]))
      throw std::runtime_error("bounding_box: degenerate interval on coordinate " +
                               std::to_string(j + 1));
  }
  return Box{lo, hi};
}

/// LP fit: minimum-L1 polynomial of degree d with p >= 1 at every input
/// point and p >= 0 on a regular positivity grid over B. The superlevel
/// set contains the points exactly; positivity is only grid-approximate,
/// so fit results carry no certificate.
inline PssResult fit_points(const std::vector<Eigen::VectorXd>& points,
                            const Box& B, int d,
                            const ApproxSettings& settings = {}) {
  B.validate();
  if (points.empty()) throw std::invalid_argument("fit_points: no points");
  if (d < 0) throw std::invalid_argument("fit_points: degree must be >= 0");
  const int grid = settings.fitGridPerAxis;
  if (grid < 2) throw std::invalid_argument("fit_points: grid must be >= 2");
  const int n = B.dim();
  for (const auto& x : points) {
    if (x.size() != n) throw std::invalid_argument("fit_points: point dim mismatch");
    if (!B.contains(x)) throw std::invalid_argument("fit_points: point outside box");
  }

  const auto frame = detail::SolveFrame::make(B, settings.rescale);
  const auto basis = monomial_basis(n, d);
  const int nv = static_cast<int>(basis.size());

  auto rowOf = [&](const Eigen::VectorXd& u, Eigen::MatrixXd& G, int row) {
    for (int k = 0; k < nv; ++k) G(row, k) = basis[k].eval(u);
  };

  std::int64_t gridRows = 1;
  for (int i = 0; i < n; ++i) gridRows *= grid;
  const int m = static_cast<int>(points.size()) + static_cast<int>(gridRows);
  Eigen::MatrixXd G(m, nv);
  Eigen::VectorXd h(m);
  int row = 0;
  for (const auto& x : points) {
    rowOf(frame.point_to_solve(x), G, row);
    h[row++] = 1.0;
  }
  std::vector<int> idx(n, 0);
  Eigen::VectorXd u(n);
  for (std::int64_t g = 0; g < gridRows; ++g) {
    for (int i = 0; i < n; ++i)
      u[i] = frame.box.a[i] +
             (frame.box.b[i] - frame.box.a[i]) * idx[i] / (grid - 1);
    rowOf(u, G, row);
    h[row++] = 0.0;
    for (int i = 0; i < n; ++i) {
      if (++idx[i] < grid) break;
      idx[i] = 0;
    }
  }

  Eigen::VectorXd c = frame.jacobian() * objective_vector(frame.box, n, d);
  ConicSolution sol = solve_lp(c, G, h, settings.solver);

  PssResult res;
  res.kind = PssKind::Fit;
  res.degree = d;
  res.order = 0;
  res.status = sol.status;
  res.gap = sol.gap;
  res.primalInfeas = sol.primalInfeas;
  res.dualInfeas = sol.dualInfeas;
  res.iterations = sol.iterations;
  res.rescaled = frame.active;
  res.w = sol.primalObj;
  if (sol.primal.size() == nv) {
    MultiPoly pu(n);
    for (int k = 0; k < nv; ++k) pu.add_term(basis[k], sol.primal[k]);
    res.p = frame.to_original(pu);
  }
  return res;
}

/// Grid and Monte-Carlo verification of a PSS result.
struct ContainmentReport {
  int gridPerAxis = 0;
  // outer / fit: minimum of p over grid points of K, must be >= 1 - 1e-6,
  // and over the whole box grid, must be >= -1e-6
  double minOnKGrid = 0.0;
  double minOnBGrid = 0.0;
  // inner: worst generator violation max_i(-g_i) over grid points of the
  // sublevel set V(p), must be <= 1e-6
  double maxInnerViolation = 0.0;
  // Monte-Carlo volume estimates with one-sigma errors
  double volK = 0.0, volKSigma = 0.0;
  double volU = 0.0, volUSigma = 0.0;  // superlevel set {p >= 1}
  double volV = 0.0, volVSigma = 0.0;  // sublevel set {p <= 1}
  bool pass = false;
};

inline int default_grid_per_axis(int n) { return n <= 2 ? 400 : 60; }

inline ContainmentReport containment_check(const PssResult& result,
                                           const SemialgSet& K,
                                           int gridPerAxis = 0,
                                           std::int64_t mcSamples = 1000000,
                                           std::uint64_t mcSeed = 20240817) {
  K.validate();
  if (result.p.dim() != K.n)
    throw std::invalid_argument("containment_check: dimension mismatch");
  ContainmentReport rep;
  const int n = K.n;
  const int g = gridPerAxis > 0 ? gridPerAxis : default_grid_per_axis(n);
  rep.gridPerAxis = g;

  double minK = std::numeric_limits<double>::infinity();
  double minB = std::numeric_limits<double>::infinity();
  double maxViol = 0.0;
  std::vector<int> idx(n, 0);
  Eigen::VectorXd x(n);
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= g;
  for (std::int64_t k = 0; k < total; ++k) {
    for (int i = 0; i < n; ++i)
      x[i] = K.box.a[i] + (K.box.b[i] - K.box.a[i]) * idx[i] / (g - 1);
    const double v = result.p.eval(x);
    minB = std::min(minB, v);
    if (K.member(x)) minK = std::min(minK, v);
    // strict margin: the solved polynomial carries ~1e-8 uniform error
    // and the exact optimum touches 1 on the complement, so sublevel
    // membership is only meaningful clear of the level set
    if (result.kind == PssKind::Inner && v <= 1.0 - 1e-6) {
      for (const auto& gen : K.generators)
        maxViol = std::max(maxViol, -gen.eval(x));
    }
    for (int i = 0; i < n; ++i) {
      if (++idx[i] < g) break;
      idx[i] = 0;
    }
  }
  rep.minOnKGrid = minK;
  rep.minOnBGrid = minB;
  rep.maxInnerViolation = maxViol;

  // Monte-Carlo volumes with a fixed internal seed for reproducibility
  SplitRng rng(mcSeed);
  std::int64_t inK = 0, inU = 0, inV = 0;
  for (std::int64_t k = 0; k < mcSamples; ++k) {
    for (int i = 0; i < n; ++i) x[i] = rng.next_in(K.box.a[i], K.box.b[i]);
    const double v = result.p.eval(x);
    if (K.member(x)) ++inK;
    if (v >= 1.0) ++inU;
    if (v <= 1.0) ++inV;
  }
  const double volB = K.box.volume();
  auto est = [&](std::int64_t cnt, double& vol, double& sigma) {
    const double phat = static_cast<double>(cnt) / mcSamples;
    vol = volB * phat;
    sigma = volB * std::sqrt(phat * (1.0 - phat) / mcSamples);
  };
  est(inK, rep.volK, rep.volKSigma);
  est(inU, rep.volU, rep.volUSigma);
  est(inV, rep.volV, rep.volVSigma);

  if (result.kind == PssKind::Inner)
    rep.pass = rep.maxInnerViolation <= 1e-6;
  else
    rep.pass = rep.minOnKGrid >= 1.0 - 1e-6 && rep.minOnBGrid >= -1e-6;
  return rep;
}

}  // namespace pss
