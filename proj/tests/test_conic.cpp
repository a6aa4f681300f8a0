#include <doctest.h>

#include <sstream>

#include "pss/conic.hpp"

using namespace pss;

TEST_CASE("cone layout indexing") {
  ConeLayout L;
  L.numFree = 2;
  L.numNonneg = 3;
  L.psdSizes = {3, 2};
  CHECK(L.numVars() == 2 + 3 + 6 + 3);
  CHECK(L.psdOffset(0) == 5);
  CHECK(L.psdOffset(1) == 11);
  // packed upper triangle, row-major
  CHECK(L.psdIndex(0, 0, 0) == 5);
  CHECK(L.psdIndex(0, 0, 2) == 7);
  CHECK(L.psdIndex(0, 1, 1) == 8);
  CHECK(L.psdIndex(0, 2, 2) == 10);
  CHECK(L.psdIndex(0, 2, 1) == L.psdIndex(0, 1, 2));  // symmetric access
  CHECK(L.psdIndex(1, 1, 1) == 13);
  CHECK_THROWS_AS(L.psdIndex(1, 0, 2), std::out_of_range);
}

TEST_CASE("validate rejects out-of-range triplets") {
  ConicProblem p;
  p.cones.numFree = 1;
  p.c = Eigen::VectorXd::Zero(1);
  p.b = Eigen::VectorXd::Zero(1);
  p.A.push_back({0, 0, 1.0});
  CHECK_NOTHROW(p.validate());
  p.A.push_back({1, 0, 1.0});
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.A.back() = {0, 5, 1.0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.c = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("text round trip is lossless and deterministic") {
  ConicProblem p;
  p.cones.numFree = 1;
  p.cones.numNonneg = 2;
  p.cones.psdSizes = {2};
  p.c = Eigen::VectorXd::Zero(p.cones.numVars());
  p.c[0] = -1.0;
  p.c[4] = 0.1234567890123456789;  // exercises %.17g fidelity
  p.b = Eigen::VectorXd::Zero(2);
  p.b[1] = 3.5;
  p.A = {{0, 0, 1.0}, {0, 3, -2.0}, {1, 4, 1e-17}, {1, 5, 7.0}};

  const std::string text = conic_problem_to_string(p);
  std::istringstream in(text);
  ConicProblem q = read_conic_problem(in);

  CHECK(q.cones.numFree == p.cones.numFree);
  CHECK(q.cones.numNonneg == p.cones.numNonneg);
  CHECK(q.cones.psdSizes == p.cones.psdSizes);
  CHECK((q.c - p.c).norm() == 0.0);
  CHECK((q.b - p.b).norm() == 0.0);
  REQUIRE(q.A.size() == p.A.size());
  for (std::size_t k = 0; k < p.A.size(); ++k) {
    CHECK(q.A[k].row == p.A[k].row);
    CHECK(q.A[k].col == p.A[k].col);
    CHECK(q.A[k].val == p.A[k].val);
  }
  // byte-identical re-export
  CHECK(conic_problem_to_string(q) == text);
}

TEST_CASE("reader rejects malformed input") {
  std::istringstream bad1("not-a-header 1\n");
  CHECK_THROWS_AS(read_conic_problem(bad1), std::invalid_argument);
  std::istringstream bad2("pss-conic 2\n");
  CHECK_THROWS_AS(read_conic_problem(bad2), std::invalid_argument);
  std::istringstream bad3("pss-conic 1\nrows 1 vars 1\ncones 1 0 0\nc 1\n0 1.0\nA 3\n0 0 1\n");
  CHECK_THROWS_AS(read_conic_problem(bad3), std::invalid_argument);
}
