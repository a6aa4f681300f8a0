#pragma once

// Exactly uniform sampling over a semialgebraic set by Von Neumann
// rejection from a polynomial dominating density, with the conditional
// density method for drawing from a polynomial density over a box: the
// i-th coordinate is generated by inverting the univariate CDF obtained
// by substituting the already-drawn prefix and integrating out the
// remaining coordinates.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pss/approx.hpp"
#include "pss/moments.hpp"
#include "pss/poly.hpp"
#include "pss/rng.hpp"

namespace pss {

/// Nonnegative polynomial density (up to normalization by mass) on a box.
struct PolyDensity {
  MultiPoly p;
  Box box;
  double mass = 0.0;

  static PolyDensity make(MultiPoly density, Box B) {
    PolyDensity pd;
    if (density.dim() != B.dim())
      throw std::invalid_argument("PolyDensity: dimension mismatch");
    pd.mass = l1_norm(density, B);
    if (!(pd.mass > 0.0))
      throw std::invalid_argument("PolyDensity: mass must be positive");
    pd.p = std::move(density);
    pd.box = std::move(B);
    return pd;
  }
};

/// Build a density from a PSS result. Only SOS-certified polynomials are
/// accepted: grid-checked positivity (the LP fit path) does not guarantee
/// p >= 0 everywhere on B, which the conditional method requires.
inline PolyDensity make_poly_density(const PssResult& result, const Box& B) {
  if (result.kind == PssKind::Fit)
    throw std::invalid_argument(
        "make_poly_density: LP-fit results are refused (no positivity "
        "certificate)");
  if (!result.certified)
    throw std::invalid_argument(
        "make_poly_density: result carries no valid positivity certificate");
  return PolyDensity::make(result.p, B);
}

/// Univariate polynomial F with F'(t) equal to p with coordinates before
/// i substituted at prefix values and coordinates after i integrated over
/// their box intervals:
///   F(t) = sum_j gamma_j t^(alpha_{j,i}+1),
///   gamma_j = c_j / (alpha_{j,i}+1)
///             * prod_{l<i} prefix_l^(alpha_{j,l})
///             * prod_{l>i} (b_l^(alpha_{j,l}+1) - a_l^(alpha_{j,l}+1)) / (alpha_{j,l}+1).
/// F is nondecreasing on [a_i, b_i] when p >= 0; the zero polynomial is
/// returned when every gamma vanishes (degenerate fiber, resample).
inline MultiPoly marginal_cdf(const MultiPoly& p, const Box& B, int i,
                              const Eigen::VectorXd& prefix) {
  const int n = B.dim();
  if (p.dim() != n) throw std::invalid_argument("marginal_cdf: dimension mismatch");
  if (i < 0 || i >= n) throw std::invalid_argument("marginal_cdf: bad coordinate");
  if (prefix.size() != i) throw std::invalid_argument("marginal_cdf: bad prefix length");

  MultiPoly F(1);
  for (const auto& [m, c] : p.terms()) {
    double gamma = c / (m.exps[i] + 1);
    for (int l = 0; l < i; ++l) gamma *= std::pow(prefix[l], m.exps[l]);
    for (int l = i + 1; l < n; ++l) {
      const int k = m.exps[l];
      gamma *= (std::pow(B.b[l], k + 1) - std::pow(B.a[l], k + 1)) / (k + 1);
    }
    Monomial t(1);
    t.exps[0] = m.exps[i] + 1;
    F.add_term(t, gamma);
  }
  return F;
}

/// Leftmost t in [a, b] with F(t) = w, for nondecreasing F, by bisection
/// on the predicate F(t) >= w (plateaus resolve to their left endpoint).
inline double invert_cdf(const MultiPoly& F, double w, double a, double b) {
  if (F.dim() != 1) throw std::invalid_argument("invert_cdf: univariate F expected");
  if (!(a < b)) throw std::invalid_argument("invert_cdf: empty interval");
  auto eval = [&](double t) {
    return F.eval(Eigen::VectorXd::Constant(1, t));
  };
  const double Fa = eval(a), Fb = eval(b);
  const double range = Fb - Fa;
  const double slack = 1e-9 * (std::abs(range) + 1.0);
  if (w < Fa - slack || w > Fb + slack)
    throw std::invalid_argument("invert_cdf: target outside CDF range");
  if (w <= Fa) return a;
  double lo = a, hi = b;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (eval(mid) >= w)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// One draw from p/mass over the box by the conditional density method.
/// Degenerate fibers (zero conditional mass after a prefix) trigger a
/// full resample, at most 1000 times.
inline Eigen::VectorXd draw_poly_density(const PolyDensity& pd, SplitRng& rng) {
  const int n = pd.box.dim();
  Eigen::VectorXd x(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      MultiPoly F = marginal_cdf(pd.p, pd.box, i, x.head(i));
      const double Fa = F.eval(Eigen::VectorXd::Constant(1, pd.box.a[i]));
      const double Fb = F.eval(Eigen::VectorXd::Constant(1, pd.box.b[i]));
      if (!(Fb - Fa > 1e-14 * (1.0 + pd.mass))) {
        ok = false;
        break;
      }
      const double w = Fa + (Fb - Fa) * rng.next_double();
      x[i] = invert_cdf(F, w, pd.box.a[i], pd.box.b[i]);
    }
    if (ok) return x;
  }
  throw std::runtime_error(
      "draw_poly_density: persistent degenerate fiber (density vanishes on "
      "the sampled prefix)");
}

struct SampleBatch {
  std::vector<Eigen::VectorXd> samples;
  std::int64_t proposals = 0;
  std::int64_t accepted = 0;
  std::int64_t inKRejections = 0;  // proposals inside K rejected by the u-test
  double empiricalRate = 0.0;
};

/// N i.i.d. uniform samples on K by rejection: draw xi ~ p/mass, reject
/// if xi is outside K, otherwise accept with probability 1/p(xi). Exact
/// uniformity requires p >= 1 on K, the outer-PSS contract. Each proposal
/// uses its own RNG stream keyed by (seed, proposalIndex), so the batch
/// is reproducible and order-independent.
inline SampleBatch uniform_sample(const SemialgSet& K, const PolyDensity& pd,
                                  std::int64_t N, std::uint64_t seed) {
  K.validate();
  if (pd.box.dim() != K.n)
    throw std::invalid_argument("uniform_sample: dimension mismatch");
  if (N < 0) throw std::invalid_argument("uniform_sample: N must be >= 0");
  SampleBatch batch;
  batch.samples.reserve(static_cast<std::size_t>(N));
  for (std::int64_t t = 0; batch.accepted < N; ++t) {
    SplitRng rng(seed, static_cast<std::uint64_t>(t));
    ++batch.proposals;
    if (batch.proposals > 100000 &&
        batch.accepted < 1e-4 * static_cast<double>(batch.proposals))
      throw std::runtime_error(
          "uniform_sample: acceptance rate below 1e-4 after 1e5 proposals "
          "(dominating polynomial too loose)");
    Eigen::VectorXd xi = draw_poly_density(pd, rng);
    if (!K.member(xi)) continue;
    const double u = rng.next_double();
    if (u * pd.p.eval(xi) <= 1.0) {
      ++batch.accepted;
      batch.samples.push_back(std::move(xi));
    } else {
      ++batch.inKRejections;
    }
  }
  batch.empiricalRate = batch.proposals == 0
                            ? 0.0
                            : static_cast<double>(batch.accepted) /
                                  static_cast<double>(batch.proposals);
  return batch;
}

/// Theoretical acceptance rate vol(K) / mass; volK comes from an oracle
/// (analytic value or Monte-Carlo estimate).
inline double acceptance_rate(double volK, const PolyDensity& pd) {
  return volK / pd.mass;
}

}  // namespace pss
