#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pss/json_io.hpp"

using namespace pss;

#ifndef PSS_FIXTURE_DIR
#define PSS_FIXTURE_DIR "fixtures"
#endif

namespace {
const std::string kFixtures = PSS_FIXTURE_DIR;
}

TEST_CASE("polynomial JSON round trip") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> cd(-5.0, 5.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    MultiPoly p(n);
    for (const auto& m : monomial_basis(n, 4))
      if (rng() % 3 == 0) p.add_term(m, cd(rng));
    Json j = poly_to_json(p);
    MultiPoly q = poly_from_json(j);
    CHECK(p == q);
    // deterministic dump
    CHECK(poly_to_json(q).dump() == j.dump());
  }
}

TEST_CASE("polynomial JSON validation") {
  CHECK_THROWS_AS(poly_from_json(Json::parse(R"({"terms":[]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      poly_from_json(Json::parse(R"({"dim":2,"terms":[{"exps":[1],"coeff":1}]})")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      poly_from_json(Json::parse(R"({"dim":1,"terms":[{"exps":[-1],"coeff":1}]})")),
      std::invalid_argument);
}

TEST_CASE("bundled set fixtures parse and validate") {
  SUBCASE("1-D benchmark") {
    SemialgSet K = set_from_json(Json::parse(read_file(kFixtures + "/oneD.json")));
    CHECK(K.n == 1);
    REQUIRE(K.generators.size() == 2);
    // feasible part of the box is [1 + sqrt(0.5), 3]
    CHECK(K.member(Eigen::VectorXd::Constant(1, 2.0)));
    CHECK_FALSE(K.member(Eigen::VectorXd::Constant(1, 1.6)));
    CHECK_FALSE(K.member(Eigen::VectorXd::Constant(1, 3.5)));
  }
  SUBCASE("planar stabilizability region") {
    SemialgSet K =
        set_from_json(Json::parse(read_file(kFixtures + "/example6_1.json")));
    CHECK(K.n == 2);
    CHECK(K.generators.size() == 4);
    CHECK(K.member(Eigen::Vector2d(0.0, 0.0)));
    CHECK_FALSE(K.member(Eigen::Vector2d(0.55, 0.9)));
  }
  SUBCASE("disk") {
    SemialgSet K = set_from_json(Json::parse(read_file(kFixtures + "/disk.json")));
    CHECK(K.member(Eigen::Vector2d(0.6, 0.6)));
    CHECK_FALSE(K.member(Eigen::Vector2d(0.8, 0.8)));
  }
  SUBCASE("PID gain region matches a direct stability check") {
    SemialgSet K = set_from_json(Json::parse(read_file(kFixtures + "/pid.json")));
    CHECK(K.n == 3);
    CHECK(K.generators.size() == 9);
    // x = 0 maps to gains kI = -25, kP = -15, kD = -10, which place all
    // closed-loop roots in the left half plane; the corner region near
    // x = (0.9, 0.9, 0.9) does not (both checked against a direct
    // root computation of the closed-loop polynomial)
    CHECK(K.member(Eigen::Vector3d(0, 0, 0)));
    CHECK_FALSE(K.member(Eigen::Vector3d(0.9, 0.9, 0.9)));
  }
}

TEST_CASE("result JSON round trip") {
  PssResult r;
  r.kind = PssKind::Inner;
  r.degree = 6;
  r.order = 3;
  r.w = 1.25;
  r.p = MultiPoly::constant(2, 1.0) + MultiPoly::variable(2, 0, -0.5);
  r.status = SolveStatus::NearOptimal;
  r.gap = 1e-9;
  r.iterations = 17;
  r.rescaled = true;
  r.certResidual = 3e-8;
  r.certified = true;
  PssResult q = result_from_json(result_to_json(r));
  CHECK(q.kind == r.kind);
  CHECK(q.degree == r.degree);
  CHECK(q.order == r.order);
  CHECK(q.w == r.w);
  CHECK(q.p == r.p);
  CHECK(q.status == r.status);
  CHECK(q.iterations == r.iterations);
  CHECK(q.rescaled == r.rescaled);
  CHECK(q.certResidual == r.certResidual);
  CHECK(q.certified == r.certified);
}

TEST_CASE("eval grid CSV") {
  SUBCASE("constant on a 2x2 grid") {
    Box B{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
    std::ostringstream os;
    write_eval_grid(os, MultiPoly::constant(2, 1.0), B, 2);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "x1,x2,p,indicator");
    int rows = 0;
    while (std::getline(is, line)) {
      ++rows;
      CHECK(line.substr(line.size() - 4) == ",1,1");  // p = 1, indicator 1
    }
    CHECK(rows == 4);
  }
  SUBCASE("indicator transitions bracket the feasible interval") {
    // degree-8 outer result on the 1-D benchmark: the indicator region
    // must cover [1 + sqrt(0.5), 3] and transition within one grid step
    SemialgSet K = set_from_json(Json::parse(read_file(kFixtures + "/oneD.json")));
    PssResult res = outer_pss(K, 8);
    REQUIRE(res.certified);
    const int perAxis = 1000;
    std::ostringstream os;
    write_eval_grid(os, res.p, K.box, perAxis);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);  // header
    double firstOn = 1e300, lastOn = -1e300;
    while (std::getline(is, line)) {
      const auto c1 = line.find(','), c2 = line.rfind(',');
      const double x = std::stod(line.substr(0, c1));
      const int ind = std::stoi(line.substr(c2 + 1));
      if (ind == 1) {
        firstOn = std::min(firstOn, x);
        lastOn = std::max(lastOn, x);
      }
    }
    const double step = (K.box.b[0] - K.box.a[0]) / (perAxis - 1);
    CHECK(firstOn <= 1.0 + std::sqrt(0.5) + step);
    CHECK(lastOn >= 3.0 - step);
  }
}

TEST_CASE("points CSV reader") {
  SUBCASE("bundled Gaussian-mixture cloud") {
    std::istringstream is(read_file(kFixtures + "/gaussian-points.csv"));
    auto pts = read_points_csv(is);
    REQUIRE(pts.size() == 100);
    for (const auto& x : pts) {
      REQUIRE(x.size() == 2);
      CHECK(std::abs(x[0]) <= 1.0);
      CHECK(std::abs(x[1]) <= 1.0);
    }
  }
  SUBCASE("ragged rows are rejected") {
    std::istringstream is("x1,x2\n1,2\n3\n");
    CHECK_THROWS_AS(read_points_csv(is), std::invalid_argument);
  }
}

TEST_CASE("samples CSV writer") {
  SampleBatch b;
  b.samples = {Eigen::Vector2d(0.5, -0.25), Eigen::Vector2d(1, 2)};
  std::ostringstream os;
  write_samples_csv(os, b, 2);
  CHECK(os.str() == "x1,x2\n0.5,-0.25\n1,2\n");
}

TEST_CASE("input hash is stable") {
  CHECK(fnv1a("") == 14695981039346656037ULL);
  CHECK(fnv1a("a") == fnv1a("a"));
  CHECK(fnv1a("a") != fnv1a("b"));
}
