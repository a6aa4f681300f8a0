#pragma once

// Standard-form conic problem with free variables, a nonnegative cone and
// PSD blocks, plus a sparse text serialization so external solvers can be
// used for cross-checking.
//
// Variable layout (flat index space):
//   [0, numFree)                          free scalars
//   [numFree, numFree+numNonneg)          nonnegative scalars
//   then, per PSD block of size s, the packed upper triangle in row-major
//   order: (0,0),(0,1),...,(0,s-1),(1,1),...  An entry (i,j) with i<j
//   represents the pair of symmetric matrix positions; a coefficient v in
//   the A matrix on a packed off-diagonal index means v * (X_ij + X_ji).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pss {

struct ConeLayout {
  int numFree = 0;
  int numNonneg = 0;
  std::vector<int> psdSizes;

  static int packedSize(int s) { return s * (s + 1) / 2; }

  int psdOffset(int block) const {
    int off = numFree + numNonneg;
    for (int k = 0; k < block; ++k) off += packedSize(psdSizes[k]);
    return off;
  }

  /// Flat index of PSD block entry (i, j); order inside (i, j) irrelevant.
  int psdIndex(int block, int i, int j) const {
    const int s = psdSizes[block];
    if (i > j) std::swap(i, j);
    if (j >= s) throw std::out_of_range("psdIndex out of range");
    // row-major packed upper triangle
    return psdOffset(block) + i * s - i * (i - 1) / 2 + (j - i);
  }

  int numVars() const {
    int n = numFree + numNonneg;
    for (int s : psdSizes) n += packedSize(s);
    return n;
  }
};

struct ConicTriplet {
  int row;
  int col;
  double val;
};

struct ConicProblem {
  Eigen::VectorXd c;                 // length numVars, minimize c^T x
  std::vector<ConicTriplet> A;       // equality rows A x = b
  Eigen::VectorXd b;
  ConeLayout cones;

  int rows() const { return static_cast<int>(b.size()); }

  void validate() const {
    if (c.size() != cones.numVars())
      throw std::invalid_argument("ConicProblem: objective length mismatch");
    for (const auto& t : A) {
      if (t.row < 0 || t.row >= rows() || t.col < 0 || t.col >= cones.numVars())
        throw std::invalid_argument("ConicProblem: triplet out of range");
    }
  }
};

/// Deterministic sparse text export. Format (one record per line):
///   pss-conic 1
///   rows R vars N
///   cones F L K s_1 ... s_K
///   c <nnz> then lines "idx val"
///   A <nnz> then lines "row col val"
///   b <nnz> then lines "idx val"
inline void write_conic_problem(const ConicProblem& p, std::ostream& os) {
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  os << "pss-conic 1\n";
  os << "rows " << p.rows() << " vars " << p.cones.numVars() << "\n";
  os << "cones " << p.cones.numFree << " " << p.cones.numNonneg << " "
     << p.cones.psdSizes.size();
  for (int s : p.cones.psdSizes) os << " " << s;
  os << "\n";
  int cn = 0;
  for (Eigen::Index i = 0; i < p.c.size(); ++i)
    if (p.c[i] != 0.0) ++cn;
  os << "c " << cn << "\n";
  for (Eigen::Index i = 0; i < p.c.size(); ++i)
    if (p.c[i] != 0.0) os << i << " " << fmt(p.c[i]) << "\n";
  os << "A " << p.A.size() << "\n";
  for (const auto& t : p.A)
    os << t.row << " " << t.col << " " << fmt(t.val) << "\n";
  int bn = 0;
  for (Eigen::Index i = 0; i < p.b.size(); ++i)
    if (p.b[i] != 0.0) ++bn;
  os << "b " << bn << "\n";
  for (Eigen::Index i = 0; i < p.b.size(); ++i)
    if (p.b[i] != 0.0) os << i << " " << fmt(p.b[i]) << "\n";
}

inline ConicProblem read_conic_problem(std::istream& is) {
  std::string tag;
  int version = 0;
  is >> tag >> version;
  if (tag != "pss-conic" || version != 1)
    throw std::invalid_argument("read_conic_problem: bad header");
  ConicProblem p;
  int rows = 0, vars = 0;
  is >> tag >> rows >> tag >> vars;
  std::size_t npsd = 0;
  is >> tag >> p.cones.numFree >> p.cones.numNonneg >> npsd;
  p.cones.psdSizes.resize(npsd);
  for (auto& s : p.cones.psdSizes) is >> s;
  if (p.cones.numVars() != vars)
    throw std::invalid_argument("read_conic_problem: cone/vars mismatch");
  p.c = Eigen::VectorXd::Zero(vars);
  p.b = Eigen::VectorXd::Zero(rows);
  int nnz = 0;
  is >> tag >> nnz;
  for (int k = 0; k < nnz; ++k) {
    int i;
    double v;
    is >> i >> v;
    p.c[i] = v;
  }
  is >> tag >> nnz;
  p.A.reserve(nnz);
  for (int k = 0; k < nnz; ++k) {
    ConicTriplet t;
    is >> t.row >> t.col >> t.val;
    p.A.push_back(t);
  }
  is >> tag >> nnz;
  for (int k = 0; k < nnz; ++k) {
    int i;
    double v;
    is >> i >> v;
    p.b[i] = v;
  }
  if (!is) throw std::invalid_argument("read_conic_problem: truncated input");
  p.validate();
  return p;
}

inline std::string conic_problem_to_string(const ConicProblem& p) {
  std::ostringstream ss;
  write_conic_problem(p, ss);
  return ss.str();
}

}  // namespace pss
