#pragma once

// Sparse multivariate polynomials in the graded-lexicographic monomial
// basis, plus Gram-matrix expansion. This is the algebraic substrate for
// the certificate assembly and the sampler.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pss {

/// Multi-index of exponents; length equals the ambient dimension.
struct Monomial {
  std::vector<int> exps;

  Monomial() = default;
  Monomial(std::initializer_list<int> e) : exps(e) {}
  explicit Monomial(std::vector<int> e) : exps(std::move(e)) {}
  explicit Monomial(int n) : exps(n, 0) {}

  int dim() const { return static_cast<int>(exps.size()); }
  int degree() const { return std::accumulate(exps.begin(), exps.end(), 0); }

  double eval(const Eigen::VectorXd& x) const {
    double v = 1.0;
    for (int i = 0; i < dim(); ++i) {
      if (exps[i] != 0) v *= std::pow(x[i], exps[i]);
    }
    return v;
  }

  Monomial operator*(const Monomial& o) const {
    if (dim() != o.dim()) throw std::invalid_argument("monomial dim mismatch");
    Monomial r(*this);
    for (int i = 0; i < dim(); ++i) r.exps[i] += o.exps[i];
    return r;
  }

  bool operator==(const Monomial& o) const { return exps == o.exps; }
};

/// Graded-lexicographic order: by total degree first, then lexicographic
/// with x1 ranked before x2 etc., so that basis(2,1) = [1, x1, x2].
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    // within a degree, a precedes b when a's exponent vector is
    // lexicographically larger (x1^k first)
    return a.exps > b.exps;
  }
};

inline bool graded_lex_less(const Monomial& a, const Monomial& b) {
  return GradedLexLess{}(a, b);
}

/// All monomials in n variables of total degree <= k, graded-lex order.
/// Length is C(n+k, n).
inline std::vector<Monomial> monomial_basis(int n, int k) {
  if (n < 1) throw std::invalid_argument("monomial_basis: n must be >= 1");
  if (k < 0) throw std::invalid_argument("monomial_basis: k must be >= 0");
  std::vector<Monomial> out;
  std::vector<int> cur(n, 0);
  // enumerate exponents of exact degree deg, first variable descending
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n - 1) {
      cur[pos] = remaining;
      out.emplace_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[pos] = e;
      self(self, pos + 1, remaining - e);
    }
  };
  for (int deg = 0; deg <= k; ++deg) rec(rec, 0, deg);
  return out;
}

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Sparse multivariate polynomial with canonical term map (no stored
/// zeros, no duplicate monomials). Immutable value semantics: arithmetic
/// returns new objects.
class MultiPoly {
 public:
  using TermMap = std::map<Monomial, double, GradedLexLess>;

  MultiPoly() : dim_(1) {}
  explicit MultiPoly(int dim) : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("MultiPoly: dim must be >= 1");
  }

  static MultiPoly constant(int dim, double c) {
    MultiPoly p(dim);
    p.add_term(Monomial(dim), c);
    return p;
  }
  static MultiPoly variable(int dim, int i, double coeff = 1.0) {
    MultiPoly p(dim);
    Monomial m(dim);
    m.exps[i] = 1;
    p.add_term(m, coeff);
    return p;
  }

  int dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// degree of the zero polynomial is 0 by convention
  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  double coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
  }

  void add_term(const Monomial& m, double c) {
    if (m.dim() != dim_) throw std::invalid_argument("term dim mismatch");
    double& slot = terms_[m];
    slot += c;
    if (std::abs(slot) < kDropTol) terms_.erase(m);
  }

  double eval(const Eigen::VectorXd& x) const {
    if (x.size() != dim_) throw std::invalid_argument("eval: dimension mismatch");
    double s = 0.0;
    for (const auto& [m, c] : terms_) s += c * m.eval(x);
    return s;
  }

  MultiPoly operator+(const MultiPoly& o) const {
    check_dim(o);
    MultiPoly r(*this);
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
  }
  MultiPoly operator-(const MultiPoly& o) const { return *this + o.scaled(-1.0); }

  MultiPoly scaled(double c) const {
    MultiPoly r(dim_);
    if (c == 0.0) return r;
    for (const auto& [m, v] : terms_) r.add_term(m, v * c);
    return r;
  }

  MultiPoly operator*(const MultiPoly& o) const {
    check_dim(o);
    MultiPoly r(dim_);
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }

  /// Substitute x_i = shift[i] + scale[i] * u_i, returning the polynomial
  /// in the u coordinates. Used for box rescaling.
  MultiPoly affine_substitute(const Eigen::VectorXd& shift,
                              const Eigen::VectorXd& scale) const {
    if (shift.size() != dim_ || scale.size() != dim_)
      throw std::invalid_argument("affine_substitute: dimension mismatch");
    MultiPoly acc = *this;
    for (int v = 0; v < dim_; ++v) {
      MultiPoly next(dim_);
      for (const auto& [m, c] : acc.terms_) {
        int e = m.exps[v];
        // (shift + scale*u)^e expanded by the binomial theorem
        for (int j = 0; j <= e; ++j) {
          Monomial mm = m;
          mm.exps[v] = j;
          double coef = c * static_cast<double>(binomial(e, j)) *
                        std::pow(shift[v], e - j) * std::pow(scale[v], j);
          next.add_term(mm, coef);
        }
      }
      acc = std::move(next);
    }
    return acc;
  }

  bool operator==(const MultiPoly& o) const {
    return dim_ == o.dim_ && terms_ == o.terms_;
  }

  /// Max absolute coefficient difference against another polynomial.
  double coeff_distance(const MultiPoly& o) const {
    check_dim(o);
    double d = 0.0;
    for (const auto& [m, c] : terms_) d = std::max(d, std::abs(c - o.coeff(m)));
    for (const auto& [m, c] : o.terms_)
      d = std::max(d, std::abs(c - coeff(m)));
    return d;
  }

  double max_abs_coeff() const {
    double d = 0.0;
    for (const auto& [m, c] : terms_) d = std::max(d, std::abs(c));
    return d;
  }

 private:
  void check_dim(const MultiPoly& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("polynomial dim mismatch");
  }

  // only coefficients that underflow to numerical zero are dropped
  static constexpr double kDropTol = 1e-300;

  int dim_;
  TermMap terms_;
};

/// Symmetric Gram matrix over the monomial basis of degree <= basisDegree.
struct GramDecomposition {
  int basisDegree = 0;
  Eigen::MatrixXd gram;
};

/// The polynomial pi^T P pi where pi = monomial_basis(n, g.basisDegree).
inline MultiPoly expand_gram(const GramDecomposition& g, int n) {
  const auto basis = monomial_basis(n, g.basisDegree);
  const auto N = static_cast<Eigen::Index>(basis.size());
  if (g.gram.rows() != N || g.gram.cols() != N)
    throw std::invalid_argument("expand_gram: gram size does not match basis");
  MultiPoly p(n);
  for (Eigen::Index i = 0; i < N; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
      p.add_term(basis[i] * basis[j], g.gram(i, j));
  return p;
}

}  // namespace pss
