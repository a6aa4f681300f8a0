#pragma once

// Putinar-style SOS positivity certificates lowered to a standard-form
// conic problem. Each positivity constraint
//
//   target(x) = s_0(x) + sum_i s_i(x) g_i(x),   all s_i SOS
//
// becomes one PSD block per multiplier plus coefficient-matching equality
// rows over the monomial basis of degree <= 2r. The target is an affine
// expression in the free decision variables (e.g. the coefficients of p).

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pss/conic.hpp"
#include "pss/moments.hpp"
#include "pss/poly.hpp"
#include "pss/solver.hpp"

namespace pss {

/// Polynomial-valued affine expression in the free decision variables:
///   expr(x) = constant(x) + sum_k value(var_k) * multiplier_k(x).
struct LinearPolyExpr {
  int dim = 1;
  std::vector<std::pair<int, MultiPoly>> varTerms;  // (free index, multiplier)
  MultiPoly constant;

  static LinearPolyExpr constant_expr(MultiPoly c) {
    LinearPolyExpr e;
    e.dim = c.dim();
    e.constant = std::move(c);
    return e;
  }

  /// The generic target "p" with one free variable per basis monomial.
  static LinearPolyExpr coefficient_vector(int n, int d, double constantShift = 0.0) {
    LinearPolyExpr e;
    e.dim = n;
    e.constant = MultiPoly::constant(n, constantShift);
    const auto basis = monomial_basis(n, d);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      MultiPoly mono(n);
      mono.add_term(basis[k], 1.0);
      e.varTerms.emplace_back(static_cast<int>(k), std::move(mono));
    }
    return e;
  }

  int max_degree() const {
    int d = constant.degree();
    for (const auto& [idx, m] : varTerms) d = std::max(d, m.degree());
    return d;
  }

  MultiPoly instantiate(const Eigen::VectorXd& freeValues) const {
    MultiPoly p = constant;
    for (const auto& [idx, m] : varTerms) p = p + m.scaled(freeValues[idx]);
    return p;
  }
};

inline int half_degree_ceil(const MultiPoly& g) { return (g.degree() + 1) / 2; }

/// One SOS positivity constraint at relaxation order r. The multiplier
/// for generator g_i has basis degree r - ceil(deg g_i / 2); s_0 has
/// basis degree r.
struct PositivityConstraint {
  LinearPolyExpr target;
  std::vector<MultiPoly> generators;
  int order = 0;
  std::string tag;  // "B" or "K", for diagnostics
};

/// Build and validate the constraint; throws when r is below the minimum
/// required by the target degree or any generator.
inline PositivityConstraint sos_constraint(LinearPolyExpr target,
                                           std::vector<MultiPoly> generators,
                                           int r, std::string tag) {
  PositivityConstraint c;
  c.order = r;
  c.tag = std::move(tag);
  if (2 * r < target.max_degree()) {
    std::ostringstream ss;
    ss << "relaxation order below minimum: 2r=" << 2 * r
       << " < deg(target)=" << target.max_degree() << " in constraint " << c.tag;
    throw std::invalid_argument(ss.str());
  }
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto& g = generators[i];
    if (g.dim() != target.dim)
      throw std::invalid_argument("sos_constraint: generator dim mismatch");
    if (g.degree() == 0)
      throw std::invalid_argument(
          "sos_constraint: constant generator g_" + std::to_string(i + 1) +
          " rejected (adds no information)");
    const int ri = half_degree_ceil(g);
    if (r < ri) {
      std::ostringstream ss;
      ss << "relaxation order below minimum for generator g_" << (i + 1)
         << " (deg " << g.degree() << ", needs r >= " << ri << ", got r=" << r
         << ") in constraint " << c.tag;
      throw std::invalid_argument(ss.str());
    }
  }
  c.target = std::move(target);
  c.generators = std::move(generators);
  return c;
}

/// Metadata for one PSD block of the assembled problem.
struct CertBlockInfo {
  int constraint = 0;   // index into the constraint list
  int multiplier = 0;   // 0 = s_0, i >= 1 = multiplier of generators[i-1]
  MultiPoly generator;  // the polynomial the multiplier is paired with
  int basisDegree = 0;
  int size = 0;
};

struct AssembledProblem {
  ConicProblem problem;
  int dim = 0;
  int numFree = 0;
  std::vector<PositivityConstraint> constraints;
  std::vector<CertBlockInfo> blocks;
  std::vector<int> rowOffset;  // first equality row of each constraint
  std::vector<int> rowCount;   // rows per constraint (= C(n+2r, n))
};

/// Lower the constraints into one self-contained conic problem. The
/// variable and row layout is deterministic: free variables first (in the
/// caller's order), then the PSD blocks in constraint order with s_0
/// before the generator multipliers; equality rows run over
/// monomial_basis(n, 2r) in graded-lex order, constraint by constraint.
inline AssembledProblem assemble(int n, const Eigen::VectorXd& objectiveOnFree,
                                 std::vector<PositivityConstraint> constraints) {
  AssembledProblem asmb;
  asmb.dim = n;
  asmb.numFree = static_cast<int>(objectiveOnFree.size());
  asmb.constraints = std::move(constraints);

  ConeLayout cones;
  cones.numFree = asmb.numFree;

  // block table
  for (std::size_t ci = 0; ci < asmb.constraints.size(); ++ci) {
    const auto& pc = asmb.constraints[ci];
    if (pc.target.dim != n)
      throw std::invalid_argument("assemble: constraint dimension mismatch");
    auto push = [&](int mult, const MultiPoly& gen, int bd) {
      CertBlockInfo bi;
      bi.constraint = static_cast<int>(ci);
      bi.multiplier = mult;
      bi.generator = gen;
      bi.basisDegree = bd;
      bi.size = static_cast<int>(binomial(n + bd, n));
      asmb.blocks.push_back(bi);
      cones.psdSizes.push_back(bi.size);
    };
    push(0, MultiPoly::constant(n, 1.0), pc.order);
    for (std::size_t gi = 0; gi < pc.generators.size(); ++gi)
      push(static_cast<int>(gi) + 1, pc.generators[gi],
           pc.order - half_degree_ceil(pc.generators[gi]));
  }

  ConicProblem& cp = asmb.problem;
  cp.cones = cones;
  cp.c = Eigen::VectorXd::Zero(cones.numVars());
  cp.c.head(asmb.numFree) = objectiveOnFree;

  // equality rows per constraint
  int rowBase = 0;
  int blockIdx = 0;
  std::vector<double> bvals;
  for (std::size_t ci = 0; ci < asmb.constraints.size(); ++ci) {
    const auto& pc = asmb.constraints[ci];
    const auto rowBasis = monomial_basis(n, 2 * pc.order);
    std::map<Monomial, int, GradedLexLess> rowOf;
    for (std::size_t k = 0; k < rowBasis.size(); ++k)
      rowOf[rowBasis[k]] = rowBase + static_cast<int>(k);
    asmb.rowOffset.push_back(rowBase);
    asmb.rowCount.push_back(static_cast<int>(rowBasis.size()));

    // + target side: free-variable multipliers and the constant
    for (const auto& [var, mult] : pc.target.varTerms)
      for (const auto& [m, coef] : mult.terms())
        cp.A.push_back({rowOf.at(m), var, coef});
    bvals.resize(rowBase + rowBasis.size(), 0.0);
    for (const auto& [m, coef] : pc.target.constant.terms())
      bvals[rowOf.at(m)] = -coef;

    // - certificate side: one PSD block per multiplier
    const int nBlocks = 1 + static_cast<int>(pc.generators.size());
    for (int bl = 0; bl < nBlocks; ++bl, ++blockIdx) {
      const auto& bi = asmb.blocks[blockIdx];
      const auto basis = monomial_basis(n, bi.basisDegree);
      for (int i = 0; i < bi.size; ++i)
        for (int j = i; j < bi.size; ++j) {
          const Monomial prod = basis[i] * basis[j];
          const int col = cp.cones.psdIndex(blockIdx, i, j);
          for (const auto& [gm, gc] : bi.generator.terms()) {
            const Monomial tot = prod * gm;
            cp.A.push_back({rowOf.at(tot), col, -gc});
          }
        }
    }
    rowBase += static_cast<int>(rowBasis.size());
  }
  // b sign convention: rows read  target - certificate = 0, i.e.
  //   sum_var A p_var - expansion = -constant_alpha
  cp.b = Eigen::Map<Eigen::VectorXd>(bvals.data(), static_cast<Eigen::Index>(bvals.size()));
  cp.validate();
  return asmb;
}

/// Gram matrices of one constraint extracted from a solution.
inline std::vector<GramDecomposition> extract_certificate(
    const AssembledProblem& asmb, const ConicSolution& sol, int constraint) {
  std::vector<GramDecomposition> out;
  for (std::size_t bi = 0; bi < asmb.blocks.size(); ++bi) {
    if (asmb.blocks[bi].constraint != constraint) continue;
    GramDecomposition g;
    g.basisDegree = asmb.blocks[bi].basisDegree;
    g.gram = extract_psd_block(asmb.problem, sol, static_cast<int>(bi));
    out.push_back(std::move(g));
  }
  return out;
}

/// Max over constraints of the max-abs coefficient mismatch between the
/// target and the certificate reconstructed from the returned Grams.
inline double certificate_residual(const AssembledProblem& asmb,
                                   const ConicSolution& sol) {
  double worst = 0.0;
  const Eigen::VectorXd freeVals = sol.primal.head(asmb.numFree);
  int blockIdx = 0;
  for (std::size_t ci = 0; ci < asmb.constraints.size(); ++ci) {
    const auto& pc = asmb.constraints[ci];
    MultiPoly lhs = pc.target.instantiate(freeVals);
    MultiPoly rhs(asmb.dim);
    const int nBlocks = 1 + static_cast<int>(pc.generators.size());
    for (int bl = 0; bl < nBlocks; ++bl, ++blockIdx) {
      GramDecomposition g;
      g.basisDegree = asmb.blocks[blockIdx].basisDegree;
      g.gram = extract_psd_block(asmb.problem, sol, blockIdx);
      rhs = rhs + expand_gram(g, asmb.dim) * asmb.blocks[blockIdx].generator;
    }
    worst = std::max(worst, lhs.coeff_distance(rhs));
  }
  return worst;
}

}  // namespace pss
