#pragma once

// Closed-form Lebesgue moments over an axis-aligned box and the L1
// objective vector used by the conic programs.

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pss/poly.hpp"

namespace pss {

/// Axis-aligned hyperrectangle [a, b] with nonempty interior.
struct Box {
  Eigen::VectorXd a;
  Eigen::VectorXd b;

  Box() = default;
  Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : a(std::move(lo)), b(std::move(hi)) {
    validate();
  }

  int dim() const { return static_cast<int>(a.size()); }
  double volume() const { return (b - a).prod(); }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < a[i] - tol || x[i] > b[i] + tol) return false;
    return true;
  }

  void validate() const {
    if (a.size() != b.size()) throw std::invalid_argument("Box: a/b size mismatch");
    if (a.size() == 0) throw std::invalid_argument("Box: empty");
    for (int i = 0; i < dim(); ++i)
      if (!(a[i] < b[i])) throw std::invalid_argument("Box: need a_i < b_i");
  }
};

/// Integral of x^alpha over the box: prod_i (b_i^{a_i+1} - a_i^{a_i+1})/(a_i+1).
inline double box_moment(const Box& B, const Monomial& alpha) {
  if (alpha.dim() != B.dim())
    throw std::invalid_argument("box_moment: dimension mismatch");
  double m = 1.0;
  for (int i = 0; i < B.dim(); ++i) {
    const int k = alpha.exps[i];
    m *= (std::pow(B.b[i], k + 1) - std::pow(B.a[i], k + 1)) / (k + 1);
  }
  return m;
}

/// Signed integral of p over B (the L1 norm when p >= 0 on B).
inline double l1_norm(const MultiPoly& p, const Box& B) {
  if (p.dim() != B.dim()) throw std::invalid_argument("l1_norm: dimension mismatch");
  double s = 0.0;
  for (const auto& [m, c] : p.terms()) s += c * box_moment(B, m);
  return s;
}

/// Vector y with y_alpha = box_moment(B, alpha) over monomial_basis(n, d),
/// so that l1_norm(p, B) = <coeffs(p), y>.
inline Eigen::VectorXd objective_vector(const Box& B, int n, int d) {
  const auto basis = monomial_basis(n, d);
  Eigen::VectorXd y(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = box_moment(B, basis[i]);
  return y;
}

}  // namespace pss
