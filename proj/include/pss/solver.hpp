#pragma once

// Conic solver backend: a dense primal-dual predictor-corrector interior
// point method for problems with free variables, a nonnegative cone and
// PSD blocks (nonnegative scalars are handled as 1x1 PSD blocks). A
// separate path solves inequality-form LPs through normal equations,
// which is much faster when the number of inequality rows dwarfs the
// number of decision variables (the point-cloud fit).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pss/conic.hpp"

namespace pss {

enum class SolveStatus {
  Optimal,
  NearOptimal,
  Infeasible,
  Unbounded,
  NumericalFailure,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::NearOptimal: return "near-optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

struct SolverSettings {
  double feasTol = 1e-8;
  double gapTol = 1e-8;
  int maxIter = 200;
  // tiny trace term added to the PSD-block objective; when the optimal
  // face is degenerate (objective on free variables only) it selects the
  // minimum-trace point and keeps the primal iterate bounded
  double traceReg = 1e-9;
  bool verbose = false;
};

struct ConicSolution {
  Eigen::VectorXd primal;  // flat, ConicProblem layout
  Eigen::VectorXd dual;    // equality multipliers y
  SolveStatus status = SolveStatus::NumericalFailure;
  double primalObj = 0.0;
  double dualObj = 0.0;
  double gap = 0.0;            // relative duality gap
  double primalInfeas = 0.0;   // relative
  double dualInfeas = 0.0;     // relative
  int iterations = 0;
  std::string message;

  bool usable() const {
    return status == SolveStatus::Optimal || status == SolveStatus::NearOptimal;
  }
};

namespace detail {

struct BlockEntry {
  int i, j;
  double v;
};

// per-block, rows that touch the block with their symmetric-matrix entries
struct BlockRows {
  std::vector<int> rowIdx;
  std::vector<std::vector<BlockEntry>> entries;
};

inline Eigen::MatrixXd sym(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

class BlockConicIpm {
 public:
  BlockConicIpm(const ConicProblem& p, const SolverSettings& st) : st_(st) {
    p.validate();
    m_ = p.rows();
    f_ = p.cones.numFree;
    b_ = p.b;
    // block table: nonneg scalars first as 1x1 blocks, then PSD blocks
    for (int i = 0; i < p.cones.numNonneg; ++i) sizes_.push_back(1);
    for (int s : p.cones.psdSizes) sizes_.push_back(s);
    nb_ = static_cast<int>(sizes_.size());
    K_ = 0;
    for (int s : sizes_) K_ += s;
    // flat index -> (block, i, j)
    const int nv = p.cones.numVars();
    blockOf_.assign(nv, -1);
    iOf_.assign(nv, 0);
    jOf_.assign(nv, 0);
    for (int i = 0; i < p.cones.numNonneg; ++i) {
      blockOf_[f_ + i] = i;
    }
    for (std::size_t kb = 0; kb < p.cones.psdSizes.size(); ++kb) {
      const int s = p.cones.psdSizes[kb];
      int idx = p.cones.psdOffset(static_cast<int>(kb));
      for (int i = 0; i < s; ++i)
        for (int j = i; j < s; ++j, ++idx) {
          blockOf_[idx] = p.cones.numNonneg + static_cast<int>(kb);
          iOf_[idx] = i;
          jOf_[idx] = j;
        }
    }
    // objective split
    cf_ = p.c.head(f_);
    C_.resize(nb_);
    for (int k = 0; k < nb_; ++k) C_[k] = Eigen::MatrixXd::Zero(sizes_[k], sizes_[k]);
    for (int idx = f_; idx < nv; ++idx) {
      if (p.c[idx] == 0.0) continue;
      const int k = blockOf_[idx];
      C_[k](iOf_[idx], jOf_[idx]) = p.c[idx];
      C_[k](jOf_[idx], iOf_[idx]) = p.c[idx];
    }
    if (st_.traceReg > 0.0)
      for (int k = 0; k < nb_; ++k)
        C_[k] += st_.traceReg * Eigen::MatrixXd::Identity(sizes_[k], sizes_[k]);
    // constraint split
    Af_ = Eigen::MatrixXd::Zero(m_, f_);
    blockRows_.resize(nb_);
    std::vector<std::vector<std::vector<BlockEntry>>> tmp(
        nb_, std::vector<std::vector<BlockEntry>>(m_));
    for (const auto& t : p.A) {
      if (t.col < f_) {
        Af_(t.row, t.col) += t.val;
      } else {
        const int k = blockOf_[t.col];
        tmp[k][t.row].push_back({iOf_[t.col], jOf_[t.col], t.val});
      }
    }
    for (int k = 0; k < nb_; ++k) {
      for (int r = 0; r < m_; ++r) {
        if (tmp[k][r].empty()) continue;
        blockRows_[k].rowIdx.push_back(r);
        blockRows_[k].entries.push_back(std::move(tmp[k][r]));
      }
    }
    bnorm_ = 1.0 + b_.norm();
    double cn = cf_.norm();
    for (const auto& Ck : C_) cn = std::max(cn, Ck.norm());
    cnorm_ = 1.0 + cn;
  }

  ConicSolution solve() {
    ConicSolution sol;
    // starting point
    double scale = std::max({10.0, b_.lpNorm<Eigen::Infinity>(), cnorm_});
    std::vector<Eigen::MatrixXd> X(nb_), S(nb_);
    for (int k = 0; k < nb_; ++k) {
      X[k] = scale * Eigen::MatrixXd::Identity(sizes_[k], sizes_[k]);
      S[k] = scale * Eigen::MatrixXd::Identity(sizes_[k], sizes_[k]);
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    Eigen::VectorXd xf = Eigen::VectorXd::Zero(f_);

    double bestErr = std::numeric_limits<double>::infinity();
    ConicSolution best;

    for (int iter = 0; iter < st_.maxIter; ++iter) {
      // residuals
      Eigen::VectorXd Ax = applyA(X);
      Eigen::VectorXd rp = b_ - Af_ * xf - Ax;
      // once the iterate is close to feasible, keep it exactly on the
      // affine set so rounding drift cannot stall convergence
      if (rp.norm() <= 1e-2 * bnorm_) {
        const double before = rp.norm();
        projectPrimal(X, xf);
        Ax = applyA(X);
        rp = b_ - Af_ * xf - Ax;
        if (st_.verbose)
          std::printf("      project |rp| %.2e -> %.2e\n", before, rp.norm());
      }
      Eigen::VectorXd rdf = cf_ - Af_.transpose() * y;
      std::vector<Eigen::MatrixXd> Rd(nb_);
      double rdNorm2 = rdf.squaredNorm();
      for (int k = 0; k < nb_; ++k) {
        Rd[k] = C_[k] - S[k] - applyAT(k, y);
        rdNorm2 += Rd[k].squaredNorm();
      }
      double mu = 0.0;
      for (int k = 0; k < nb_; ++k) mu += (X[k].array() * S[k].array()).sum();
      mu /= std::max(1, K_);

      double pobj = cf_.dot(xf);
      for (int k = 0; k < nb_; ++k) pobj += (C_[k].array() * X[k].array()).sum();
      double dobj = b_.dot(y);
      double relp = rp.norm() / bnorm_;
      double reld = std::sqrt(rdNorm2) / cnorm_;
      double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

      if (st_.verbose) {
        std::printf("it %3d  pobj % .8e dobj % .8e  relp %.2e reld %.2e gap %.2e mu %.2e\n",
                    iter, pobj, dobj, relp, reld, relgap, mu);
      }

      double err = std::max({relp, reld, relgap});
      if (err < bestErr) {
        bestErr = err;
        fillSolution(best, X, S, xf, y, pobj, dobj, relp, reld, relgap, iter);
      }

      if (relp <= st_.feasTol && reld <= st_.feasTol && relgap <= st_.gapTol) {
        fillSolution(sol, X, S, xf, y, pobj, dobj, relp, reld, relgap, iter);
        sol.status = SolveStatus::Optimal;
        return sol;
      }
      // divergence heuristics: an unbounded dual certifies primal
      // infeasibility and vice versa
      double ynorm = y.norm();
      if (dobj > 1e10 * scale && reld <= 1e-6 && ynorm > 1e8) {
        sol = best;
        sol.status = SolveStatus::Infeasible;
        sol.message = "dual objective diverging; primal likely infeasible";
        return sol;
      }
      if (pobj < -1e10 * scale && relp <= 1e-6) {
        sol = best;
        sol.status = SolveStatus::Unbounded;
        sol.message = "primal objective diverging; problem likely unbounded";
        return sol;
      }

      // factorizations of X and S
      std::vector<Eigen::LLT<Eigen::MatrixXd>> Xllt(nb_), Sllt(nb_);
      std::vector<Eigen::MatrixXd> Sinv(nb_);
      bool factorOk = true;
      for (int k = 0; k < nb_; ++k) {
        Xllt[k].compute(X[k]);
        Sllt[k].compute(S[k]);
        if (Xllt[k].info() != Eigen::Success || Sllt[k].info() != Eigen::Success) {
          factorOk = false;
          break;
        }
        Sinv[k] = Sllt[k].solve(Eigen::MatrixXd::Identity(sizes_[k], sizes_[k]));
      }
      if (!factorOk) {
        sol = best;
        sol.status = bestErr < 1e-5 ? SolveStatus::NearOptimal : SolveStatus::NumericalFailure;
        sol.message = "iterate lost positive definiteness";
        return sol;
      }

      // KKT matrix [[M, Af],[Af^T, 0]] with Schur block
      Eigen::MatrixXd Kkt = Eigen::MatrixXd::Zero(m_ + f_, m_ + f_);
      buildSchur(X, Sinv, Kkt);
      Kkt.topRightCorner(m_, f_) = Af_;
      Kkt.bottomLeftCorner(f_, m_) = Af_.transpose();
      // light regularization keeps the LU stable on rank-marginal systems
      for (int i = 0; i < m_; ++i) Kkt(i, i) += 1e-13 * (1.0 + Kkt(i, i));
      for (int i = 0; i < f_; ++i) Kkt(m_ + i, m_ + i) -= 1e-13;
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(Kkt);

      // shared piece A(sym(X Rd Sinv))
      std::vector<Eigen::MatrixXd> XRdSinv(nb_);
      for (int k = 0; k < nb_; ++k) XRdSinv[k] = sym(X[k] * Rd[k] * Sinv[k]);
      Eigen::VectorXd aXRdSinv = applyA(XRdSinv);

      auto direction = [&](double sigmamu, const std::vector<Eigen::MatrixXd>* corr,
                           std::vector<Eigen::MatrixXd>& dX,
                           std::vector<Eigen::MatrixXd>& dS, Eigen::VectorXd& dy,
                           Eigen::VectorXd& dxf) {
        // G = sigmamu*Sinv - X - corr
        std::vector<Eigen::MatrixXd> G(nb_);
        for (int k = 0; k < nb_; ++k) {
          G[k] = sigmamu * Sinv[k] - X[k];
          if (corr) G[k] -= (*corr)[k];
        }
        Eigen::VectorXd rhs(m_ + f_);
        rhs.head(m_) = rp - applyA(G) + aXRdSinv;
        rhs.tail(f_) = rdf;
        Eigen::VectorXd d = lu.solve(rhs);
        // iterative refinement: the Schur complement is increasingly
        // ill-conditioned as mu shrinks and a raw solve stalls the
        // primal residual around sqrt(eps)
        for (int ref = 0; ref < 2; ++ref) d += lu.solve(rhs - Kkt * d);
        dy = d.head(m_);
        dxf = d.tail(f_);
        dX.resize(nb_);
        dS.resize(nb_);
        for (int k = 0; k < nb_; ++k) {
          dS[k] = Rd[k] - applyAT(k, dy);
          dX[k] = G[k] - sym(X[k] * dS[k] * Sinv[k]);
        }
      };

      // predictor
      std::vector<Eigen::MatrixXd> dXa, dSa;
      Eigen::VectorXd dya, dxfa;
      direction(0.0, nullptr, dXa, dSa, dya, dxfa);
      double apA = maxStep(X, dXa, Xllt);
      double adA = maxStep(S, dSa, Sllt);
      double muAff = 0.0;
      for (int k = 0; k < nb_; ++k)
        muAff += ((X[k] + std::min(1.0, apA) * dXa[k]).array() *
                  (S[k] + std::min(1.0, adA) * dSa[k]).array())
                     .sum();
      muAff = std::max(muAff / std::max(1, K_), 0.0);
      double sigma = std::clamp(std::pow(muAff / std::max(mu, 1e-300), 3.0), 1e-10, 1.0);

      // corrector
      std::vector<Eigen::MatrixXd> corr(nb_);
      for (int k = 0; k < nb_; ++k) corr[k] = sym(dXa[k] * dSa[k] * Sinv[k]);
      std::vector<Eigen::MatrixXd> dX, dS;
      Eigen::VectorXd dy, dxf;
      direction(sigma * mu, &corr, dX, dS, dy, dxf);

      const double tau = iter < 4 ? 0.95 : 0.98;
      double ap = std::min(1.0, tau * maxStep(X, dX, Xllt));
      double ad = std::min(1.0, tau * maxStep(S, dS, Sllt));
      if (!(ap > 1e-12) || !(ad > 1e-12)) {
        sol = best;
        sol.status = bestErr < 1e-5 ? SolveStatus::NearOptimal : SolveStatus::NumericalFailure;
        sol.message = "step length collapsed";
        return sol;
      }
      if (st_.verbose) {
        double dxn = 0.0;
        for (int k = 0; k < nb_; ++k) dxn += dX[k].squaredNorm();
        std::printf("      sigma %.2e ap %.2e ad %.2e |dy| %.2e |dX| %.2e |dxf| %.2e\n",
                    sigma, ap, ad, dy.norm(), std::sqrt(dxn), dxf.norm());
      }
      for (int k = 0; k < nb_; ++k) {
        X[k] = sym(X[k] + ap * dX[k]);
        S[k] = sym(S[k] + ad * dS[k]);
      }
      xf += ap * dxf;
      y += ad * dy;
    }

    sol = best;
    sol.status = bestErr <= 1e-5 ? SolveStatus::NearOptimal : SolveStatus::NumericalFailure;
    if (sol.status == SolveStatus::NearOptimal)
      sol.message = "max iterations; loose tolerance met";
    else
      sol.message = "max iterations without convergence";
    return sol;
  }

 private:
  Eigen::VectorXd applyA(const std::vector<Eigen::MatrixXd>& X) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
    for (int k = 0; k < nb_; ++k) {
      const auto& br = blockRows_[k];
      for (std::size_t r = 0; r < br.rowIdx.size(); ++r) {
        double s = 0.0;
        for (const auto& e : br.entries[r])
          s += e.v * (e.i == e.j ? X[k](e.i, e.i) : 2.0 * X[k](e.i, e.j));
        out[br.rowIdx[r]] += s;
      }
    }
    return out;
  }

  Eigen::MatrixXd applyAT(int k, const Eigen::VectorXd& y) const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(sizes_[k], sizes_[k]);
    const auto& br = blockRows_[k];
    for (std::size_t r = 0; r < br.rowIdx.size(); ++r) {
      const double yr = y[br.rowIdx[r]];
      if (yr == 0.0) continue;
      for (const auto& e : br.entries[r]) {
        M(e.i, e.j) += yr * e.v;
        if (e.i != e.j) M(e.j, e.i) += yr * e.v;
      }
    }
    return M;
  }

  // Shift (X, xf) back onto A(X) + Af xf = b with the least correction in
  // the X-weighted metric (dX = X A^T(lambda) X): the interior iterate
  // otherwise drifts off the affine set when the optimal Gram face is
  // degenerate and rounding error in dX accumulates. The X-metric keeps
  // the correction small in directions where X is nearly singular, so
  // positive definiteness survives even close to the boundary.
  void projectPrimal(std::vector<Eigen::MatrixXd>& X, Eigen::VectorXd& xf) const {
    Eigen::VectorXd rp = b_ - Af_ * xf - applyA(X);
    if (rp.norm() <= 1e-15 * bnorm_) return;
    // blend a small multiple of the identity into the metric: a pure
    // X-metric cannot move eigendirections where X is (numerically)
    // zero, and part of the drift may need exactly those
    std::vector<Eigen::MatrixXd> Xt(nb_);
    for (int k = 0; k < nb_; ++k) {
      const double delta = 1e-8 * (1.0 + X[k].diagonal().maxCoeff());
      Xt[k] = X[k] + delta * Eigen::MatrixXd::Identity(sizes_[k], sizes_[k]);
    }
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m_, m_);
    buildSchur(Xt, Xt, G);  // G_rq = tr(A_r Xt A_q Xt)
    G += Af_ * Af_.transpose();
    for (int i = 0; i < m_; ++i) G(i, i) += 1e-14 * (1.0 + G(i, i));
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) return;
    Eigen::VectorXd lam = llt.solve(rp);
    lam += llt.solve(rp - G * lam);
    std::vector<Eigen::MatrixXd> dX(nb_);
    for (int k = 0; k < nb_; ++k)
      dX[k] = sym(Xt[k] * applyAT(k, lam) * Xt[k]);
    Eigen::VectorXd dxf = Af_.transpose() * lam;
    double t = 1.0;
    for (int attempt = 0; attempt < 6; ++attempt, t *= 0.5) {
      bool psd = true;
      for (int k = 0; k < nb_ && psd; ++k) {
        Eigen::LLT<Eigen::MatrixXd> chk(sym(X[k] + t * dX[k]));
        psd = chk.info() == Eigen::Success;
      }
      if (psd) {
        for (int k = 0; k < nb_; ++k) X[k] = sym(X[k] + t * dX[k]);
        xf += t * dxf;
        return;
      }
    }
  }

  // M_ij = sum_k tr(A_i Sinv_k A_j X_k), written into the top-left of Kkt
  void buildSchur(const std::vector<Eigen::MatrixXd>& X,
                  const std::vector<Eigen::MatrixXd>& Sinv,
                  Eigen::MatrixXd& Kkt) const {
    for (int k = 0; k < nb_; ++k) {
      const auto& br = blockRows_[k];
      const int nr = static_cast<int>(br.rowIdx.size());
      if (nr == 0) continue;
      const int s = sizes_[k];
      // T_r = Sinv A_r X for each participating row
      std::vector<Eigen::MatrixXd> T(nr);
      for (int r = 0; r < nr; ++r) {
        Eigen::MatrixXd Ar = Eigen::MatrixXd::Zero(s, s);
        for (const auto& e : br.entries[r]) {
          Ar(e.i, e.j) = e.v;
          if (e.i != e.j) Ar(e.j, e.i) = e.v;
        }
        T[r] = Sinv[k] * Ar * X[k];
      }
      for (int r = 0; r < nr; ++r) {
        const int ri = br.rowIdx[r];
        for (int q = r; q < nr; ++q) {
          double v = 0.0;
          for (const auto& e : br.entries[q]) {
            v += e.v * (e.i == e.j ? T[r](e.i, e.i)
                                   : T[r](e.i, e.j) + T[r](e.j, e.i));
          }
          const int qi = br.rowIdx[q];
          Kkt(ri, qi) += v;
          if (qi != ri) Kkt(qi, ri) += v;
        }
      }
    }
  }

  // largest alpha with X + alpha*D psd (through L^{-1} D L^{-T})
  double maxStep(const std::vector<Eigen::MatrixXd>& X,
                 const std::vector<Eigen::MatrixXd>& D,
                 const std::vector<Eigen::LLT<Eigen::MatrixXd>>& llt) const {
    double amax = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nb_; ++k) {
      const auto& L = llt[k].matrixL();
      Eigen::MatrixXd W = L.solve(D[k]);
      W = L.solve(W.transpose().eval());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym(W),
                                                        Eigen::EigenvaluesOnly);
      const double lmin = es.eigenvalues().minCoeff();
      if (lmin < 0.0) amax = std::min(amax, -1.0 / lmin);
    }
    return amax;
  }

  void fillSolution(ConicSolution& sol, const std::vector<Eigen::MatrixXd>& X,
                    const std::vector<Eigen::MatrixXd>& S,
                    const Eigen::VectorXd& xf, const Eigen::VectorXd& y,
                    double pobj, double dobj, double relp, double reld,
                    double relgap, int iter) const {
    (void)S;
    const int nv = f_ + packedTotal();
    sol.primal.resize(nv);
    sol.primal.head(f_) = xf;
    int idx = f_;
    for (int k = 0; k < nb_; ++k) {
      const int s = sizes_[k];
      for (int i = 0; i < s; ++i)
        for (int j = i; j < s; ++j) sol.primal[idx++] = X[k](i, j);
    }
    sol.dual = y;
    sol.primalObj = pobj;
    sol.dualObj = dobj;
    sol.primalInfeas = relp;
    sol.dualInfeas = reld;
    sol.gap = relgap;
    sol.iterations = iter;
  }

  int packedTotal() const {
    int t = 0;
    for (int s : sizes_) t += s * (s + 1) / 2;
    return t;
  }

  SolverSettings st_;
  int m_ = 0, f_ = 0, nb_ = 0, K_ = 0;
  std::vector<int> sizes_;
  Eigen::VectorXd b_, cf_;
  std::vector<Eigen::MatrixXd> C_;
  Eigen::MatrixXd Af_;
  std::vector<BlockRows> blockRows_;
  std::vector<int> blockOf_, iOf_, jOf_;
  double bnorm_ = 1.0, cnorm_ = 1.0;
};

}  // namespace detail

/// Solve a standard-form conic problem. Infeasible/unbounded are reported
/// through the status, never thrown.
inline ConicSolution solve_conic(const ConicProblem& p,
                                 const SolverSettings& st = {}) {
  detail::BlockConicIpm ipm(p, st);
  return ipm.solve();
}

/// Inequality-form LP: min c^T x subject to G x >= h, x free.
/// Solved by a primal-dual method on the normal equations, so the cost per
/// iteration scales with dim(x)^3 rather than rows^3.
inline ConicSolution solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& G,
                              const Eigen::VectorXd& h,
                              const SolverSettings& st = {}) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(G.rows());
  if (G.cols() != n || h.size() != m)
    throw std::invalid_argument("solve_lp: dimension mismatch");

  ConicSolution sol;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(m);
  const double bnorm = 1.0 + h.norm();
  const double cnorm = 1.0 + c.norm();

  double bestErr = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < st.maxIter; ++iter) {
    Eigen::VectorXd rp = G * x - s - h;           // want 0
    Eigen::VectorXd rd = c - G.transpose() * z;   // want 0
    double mu = s.dot(z) / m;
    double pobj = c.dot(x);
    double dobj = h.dot(z);
    double relp = rp.norm() / bnorm;
    double reld = rd.norm() / cnorm;
    double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    double err = std::max({relp, reld, relgap});
    if (err < bestErr) {
      bestErr = err;
      sol.primal = x;
      sol.dual = z;
      sol.primalObj = pobj;
      sol.dualObj = dobj;
      sol.primalInfeas = relp;
      sol.dualInfeas = reld;
      sol.gap = relgap;
      sol.iterations = iter;
    }
    if (relp <= st.feasTol && reld <= st.feasTol && relgap <= st.gapTol) {
      sol.status = SolveStatus::Optimal;
      return sol;
    }
    // Farkas-style ray certificates from diverging iterates
    const double znorm = z.norm();
    if (znorm > 1e8) {
      Eigen::VectorXd ray = z / znorm;
      if ((G.transpose() * ray).norm() < 1e-6 && h.dot(ray) > 1e-8) {
        sol.status = SolveStatus::Infeasible;
        sol.message = "dual ray certifies primal infeasibility";
        return sol;
      }
    }
    const double xnorm = x.norm();
    if (xnorm > 1e8) {
      Eigen::VectorXd ray = x / xnorm;
      if (c.dot(ray) < -1e-8 && (G * ray).minCoeff() > -1e-6) {
        sol.status = SolveStatus::Unbounded;
        sol.message = "primal ray certifies unboundedness";
        return sol;
      }
    }

    Eigen::VectorXd w = z.array() / s.array();
    Eigen::MatrixXd H = G.transpose() * w.asDiagonal() * G;
    for (int i = 0; i < n; ++i) H(i, i) += 1e-12 * (1.0 + H(i, i));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);

    auto solveDir = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dx,
                        Eigen::VectorXd& ds, Eigen::VectorXd& dz) {
      // z.ds + s.dz = rc ; G dx - ds = -rp ; G^T dz = rd
      Eigen::VectorXd t = (rc.array() / s.array()).matrix();
      dx = ldlt.solve(G.transpose() * (t - (w.array() * rp.array()).matrix()).eval() - rd);
      dz = t - (w.array() * (G * dx + rp).array()).matrix();
      ds = ((rc.array() - s.array() * dz.array()) / z.array()).matrix();
    };

    // predictor
    Eigen::VectorXd rcAff = (-(s.array() * z.array())).matrix();
    Eigen::VectorXd dxa, dsa, dza;
    solveDir(rcAff, dxa, dsa, dza);
    auto stepTo = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      double a = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
      return a;
    };
    double apA = std::min(1.0, stepTo(s, dsa));
    double adA = std::min(1.0, stepTo(z, dza));
    double muAff = (s + apA * dsa).dot(z + adA * dza) / m;
    double sigma = std::clamp(std::pow(muAff / std::max(mu, 1e-300), 3.0), 1e-10, 1.0);

    Eigen::VectorXd rc =
        (sigma * mu - (s.array() * z.array()) - (dsa.array() * dza.array())).matrix();
    Eigen::VectorXd dx, ds, dz;
    solveDir(rc, dx, ds, dz);
    const double tau = 0.995;
    double ap = std::min(1.0, tau * stepTo(s, ds));
    double ad = std::min(1.0, tau * stepTo(z, dz));
    if (!(ap > 1e-13) || !(ad > 1e-13)) break;
    x += ap * dx;
    s += ap * ds;
    z += ad * dz;
  }
  sol.status = bestErr <= 1e-5 ? SolveStatus::NearOptimal : SolveStatus::NumericalFailure;
  return sol;
}

/// Extract one PSD block of a conic solution as a Gram matrix.
inline Eigen::MatrixXd extract_psd_block(const ConicProblem& p,
                                         const ConicSolution& sol, int block) {
  const int s = p.cones.psdSizes[block];
  Eigen::MatrixXd M(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) {
      const double v = sol.primal[p.cones.psdIndex(block, i, j)];
      M(i, j) = v;
      M(j, i) = v;
    }
  return M;
}

}  // namespace pss
