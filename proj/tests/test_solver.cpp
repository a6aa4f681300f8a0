#include <doctest.h>

#include <random>

#include "pss/solver.hpp"

using namespace pss;

namespace {

// packed application of one equality row to a full symmetric matrix,
// matching the off-diagonal convention v * (X_ij + X_ji)
double packed_row_apply(const std::vector<ConicTriplet>& A, int row,
                        const ConeLayout& L, int block,
                        const Eigen::MatrixXd& X) {
  double s = 0.0;
  const int sz = L.psdSizes[block];
  for (const auto& t : A) {
    if (t.row != row) continue;
    for (int i = 0; i < sz; ++i)
      for (int j = i; j < sz; ++j)
        if (t.col == L.psdIndex(block, i, j))
          s += t.val * (i == j ? X(i, i) : 2.0 * X(i, j));
  }
  return s;
}

}  // namespace

TEST_CASE("conic LP: min x subject to x - s = 1, s >= 0") {
  ConicProblem p;
  p.cones.numFree = 1;
  p.cones.numNonneg = 1;
  p.c = Eigen::VectorXd::Zero(2);
  p.c[0] = 1.0;
  p.b = Eigen::VectorXd::Constant(1, 1.0);
  p.A = {{0, 0, 1.0}, {0, 1, -1.0}};

  ConicSolution sol = solve_conic(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.primalObj == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.dualObj == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("SDP: min trace(P) subject to P psd, P11 = 1") {
  ConicProblem p;
  p.cones.psdSizes = {2};
  p.c = Eigen::VectorXd::Zero(p.cones.numVars());
  p.c[p.cones.psdIndex(0, 0, 0)] = 1.0;
  p.c[p.cones.psdIndex(0, 1, 1)] = 1.0;
  p.b = Eigen::VectorXd::Constant(1, 1.0);
  p.A = {{0, p.cones.psdIndex(0, 0, 0), 1.0}};

  ConicSolution sol = solve_conic(p);
  REQUIRE(sol.usable());
  CHECK(sol.primalObj == doctest::Approx(1.0).epsilon(1e-6));
  Eigen::MatrixXd P = extract_psd_block(p, sol, 0);
  CHECK(P(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(P(1, 1) == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("SDP: maximal off-diagonal of a correlation matrix") {
  // min -(X_01 + X_10) with unit diagonal; optimum X_01 = 1, objective -2
  ConicProblem p;
  p.cones.psdSizes = {2};
  p.c = Eigen::VectorXd::Zero(p.cones.numVars());
  p.c[p.cones.psdIndex(0, 0, 1)] = -1.0;
  p.b = Eigen::VectorXd::Ones(2);
  p.A = {{0, p.cones.psdIndex(0, 0, 0), 1.0}, {1, p.cones.psdIndex(0, 1, 1), 1.0}};

  ConicSolution sol = solve_conic(p);
  REQUIRE(sol.usable());
  CHECK(sol.primalObj == doctest::Approx(-2.0).epsilon(1e-6));
  Eigen::MatrixXd X = extract_psd_block(p, sol, 0);
  CHECK(X(0, 1) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("infeasible conic problem is flagged, not thrown") {
  // s1 + s2 = -1 with s >= 0
  ConicProblem p;
  p.cones.numNonneg = 2;
  p.c = Eigen::VectorXd::Zero(2);
  p.b = Eigen::VectorXd::Constant(1, -1.0);
  p.A = {{0, 0, 1.0}, {0, 1, 1.0}};
  ConicSolution sol = solve_conic(p);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded conic problem is flagged, not thrown") {
  // min x with x = -s, s >= 0
  ConicProblem p;
  p.cones.numFree = 1;
  p.cones.numNonneg = 1;
  p.c = Eigen::VectorXd::Zero(2);
  p.c[0] = 1.0;
  p.b = Eigen::VectorXd::Zero(1);
  p.A = {{0, 0, 1.0}, {0, 1, 1.0}};
  ConicSolution sol = solve_conic(p);
  CHECK(sol.status == SolveStatus::Unbounded);
}

TEST_CASE("random feasible SDPs close the duality gap") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    const int s = 2 + static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 3);
    ConicProblem p;
    p.cones.psdSizes = {s};
    const int nv = p.cones.numVars();

    // strictly feasible primal X0 and dual (y0, S0)
    Eigen::MatrixXd R(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) R(i, j) = nd(rng);
    Eigen::MatrixXd X0 = R * R.transpose() + Eigen::MatrixXd::Identity(s, s);
    Eigen::MatrixXd R2(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) R2(i, j) = nd(rng);
    Eigen::MatrixXd S0 = R2 * R2.transpose() + Eigen::MatrixXd::Identity(s, s);
    Eigen::VectorXd y0(m);
    for (int r = 0; r < m; ++r) y0[r] = nd(rng);

    std::vector<Eigen::MatrixXd> Arows(m);
    for (int r = 0; r < m; ++r) {
      Eigen::MatrixXd M(s, s);
      for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) M(i, j) = nd(rng);
      Arows[r] = 0.5 * (M + M.transpose());
      for (int i = 0; i < s; ++i)
        for (int j = i; j < s; ++j)
          p.A.push_back({r, p.cones.psdIndex(0, i, j), Arows[r](i, j)});
    }
    Eigen::MatrixXd C = S0;
    for (int r = 0; r < m; ++r) C += y0[r] * Arows[r];
    p.c = Eigen::VectorXd::Zero(nv);
    for (int i = 0; i < s; ++i)
      for (int j = i; j < s; ++j) p.c[p.cones.psdIndex(0, i, j)] = C(i, j);
    p.b = Eigen::VectorXd(m);
    for (int r = 0; r < m; ++r)
      p.b[r] = packed_row_apply(p.A, r, p.cones, 0, X0);

    ConicSolution sol = solve_conic(p);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.gap <= 1e-7);
    CHECK(sol.primalInfeas <= 1e-7);
    CHECK(sol.dualInfeas <= 1e-7);
    // returned X satisfies the equalities and stays (numerically) psd
    Eigen::MatrixXd X = extract_psd_block(p, sol, 0);
    for (int r = 0; r < m; ++r)
      CHECK(packed_row_apply(p.A, r, p.cones, 0, X) ==
            doctest::Approx(p.b[r]).epsilon(1e-6));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-7 * (1.0 + X.norm()));
  }
}

TEST_CASE("inequality-form LP path") {
  SUBCASE("min x subject to x >= 1") {
    Eigen::VectorXd c = Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd G = Eigen::MatrixXd::Ones(1, 1);
    Eigen::VectorXd h = Eigen::VectorXd::Ones(1);
    ConicSolution sol = solve_lp(c, G, h);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.primal[0] == doctest::Approx(1.0).epsilon(1e-7));
  }
  SUBCASE("box-constrained maximization") {
    // min -x1 - x2 over 0 <= x <= 1, optimum -2 at (1, 1)
    Eigen::VectorXd c(2);
    c << -1, -1;
    Eigen::MatrixXd G(4, 2);
    G << 1, 0, 0, 1, -1, 0, 0, -1;
    Eigen::VectorXd h(4);
    h << 0, 0, -1, -1;
    ConicSolution sol = solve_lp(c, G, h);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.primalObj == doctest::Approx(-2.0).epsilon(1e-7));
    CHECK(sol.primal[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.primal[1] == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("infeasible rows are flagged") {
    Eigen::VectorXd c = Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd G(2, 1);
    G << 1, -1;
    Eigen::VectorXd h(2);
    h << 1, 0;  // x >= 1 and x <= 0
    ConicSolution sol = solve_lp(c, G, h);
    CHECK(sol.status == SolveStatus::Infeasible);
  }
  SUBCASE("unbounded objective is flagged") {
    Eigen::VectorXd c(1);
    c << -1;
    Eigen::MatrixXd G = Eigen::MatrixXd::Ones(1, 1);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(1);
    ConicSolution sol = solve_lp(c, G, h);
    CHECK(sol.status == SolveStatus::Unbounded);
  }
  SUBCASE("random LPs agree with the conic path") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 2);
      const int m = 2 * n + 2;
      Eigen::MatrixXd G(m, n);
      Eigen::VectorXd h(m), c(n), x0(n);
      for (int i = 0; i < n; ++i) {
        c[i] = nd(rng);
        x0[i] = nd(rng);
      }
      for (int r = 0; r < m; ++r) {
        for (int i = 0; i < n; ++i) G(r, i) = nd(rng);
        h[r] = G.row(r).dot(x0) - std::abs(nd(rng)) - 0.1;  // strictly feasible
      }
      // bound the feasible set: sum of +-x_i >= -10
      for (int i = 0; i < n; ++i) {
        G.conservativeResize(G.rows() + 2, n);
        h.conservativeResize(h.size() + 2);
        G.row(G.rows() - 2).setZero();
        G(G.rows() - 2, i) = 1.0;
        h[h.size() - 2] = -10.0;
        G.row(G.rows() - 1).setZero();
        G(G.rows() - 1, i) = -1.0;
        h[h.size() - 1] = -10.0;
      }
      ConicSolution viaLp = solve_lp(c, G, h);
      REQUIRE(viaLp.usable());

      // same LP through the conic path: x = xp free, slack s >= 0
      ConicProblem p;
      p.cones.numFree = n;
      p.cones.numNonneg = static_cast<int>(G.rows());
      p.c = Eigen::VectorXd::Zero(p.cones.numVars());
      p.c.head(n) = c;
      p.b = h;
      for (int r = 0; r < G.rows(); ++r) {
        for (int i = 0; i < n; ++i)
          if (G(r, i) != 0.0) p.A.push_back({r, i, G(r, i)});
        p.A.push_back({r, n + r, -1.0});
      }
      ConicSolution viaConic = solve_conic(p);
      REQUIRE(viaConic.usable());
      CHECK(viaLp.primalObj == doctest::Approx(viaConic.primalObj).epsilon(1e-5));
    }
  }
}
