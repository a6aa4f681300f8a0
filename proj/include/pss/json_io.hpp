#pragma once

// JSON and CSV serialization for set descriptions, results, samples and
// grids, plus the run manifest. Field order is fixed (ordered_json) and
// polynomial terms are emitted in graded-lex order, so identical inputs
// produce byte-identical outputs.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pss/approx.hpp"
#include "pss/moments.hpp"
#include "pss/poly.hpp"
#include "pss/sampler.hpp"

namespace pss {

using Json = nlohmann::ordered_json;

inline Json poly_to_json(const MultiPoly& p) {
  Json j;
  j["dim"] = p.dim();
  j["terms"] = Json::array();
  for (const auto& [m, c] : p.terms()) {
    Json t;
    t["exps"] = m.exps;
    t["coeff"] = c;
    j["terms"].push_back(std::move(t));
  }
  return j;
}

inline MultiPoly poly_from_json(const Json& j) {
  if (!j.contains("dim") || !j.contains("terms"))
    throw std::invalid_argument("polynomial JSON: need dim and terms");
  const int n = j.at("dim").get<int>();
  MultiPoly p(n);
  for (const auto& t : j.at("terms")) {
    std::vector<int> exps = t.at("exps").get<std::vector<int>>();
    if (static_cast<int>(exps.size()) != n)
      throw std::invalid_argument("polynomial JSON: exps length mismatch");
    for (int e : exps)
      if (e < 0) throw std::invalid_argument("polynomial JSON: negative exponent");
    p.add_term(Monomial(std::move(exps)), t.at("coeff").get<double>());
  }
  return p;
}

inline Json box_to_json(const Box& B) {
  Json j;
  j["a"] = std::vector<double>(B.a.data(), B.a.data() + B.a.size());
  j["b"] = std::vector<double>(B.b.data(), B.b.data() + B.b.size());
  return j;
}

inline Box box_from_json(const Json& j) {
  auto a = j.at("a").get<std::vector<double>>();
  auto b = j.at("b").get<std::vector<double>>();
  return Box{Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())),
             Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()))};
}

inline Json set_to_json(const SemialgSet& K) {
  Json j;
  j["dim"] = K.n;
  j["generators"] = Json::array();
  for (const auto& g : K.generators) j["generators"].push_back(poly_to_json(g));
  j["box"] = box_to_json(K.box);
  return j;
}

inline SemialgSet set_from_json(const Json& j) {
  SemialgSet K;
  K.n = j.at("dim").get<int>();
  if (j.contains("generators"))
    for (const auto& g : j.at("generators")) K.generators.push_back(poly_from_json(g));
  K.box = box_from_json(j.at("box"));
  K.validate();
  return K;
}

inline Json result_to_json(const PssResult& r) {
  Json j;
  j["kind"] = to_string(r.kind);
  j["degree"] = r.degree;
  j["order"] = r.order;
  j["w"] = r.w;
  j["polynomial"] = poly_to_json(r.p);
  j["status"] = to_string(r.status);
  j["gap"] = r.gap;
  j["primalInfeas"] = r.primalInfeas;
  j["dualInfeas"] = r.dualInfeas;
  j["iterations"] = r.iterations;
  j["rescaled"] = r.rescaled;
  j["certResidual"] = r.certResidual;
  j["certified"] = r.certified;
  return j;
}

inline PssResult result_from_json(const Json& j) {
  PssResult r;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "outer")
    r.kind = PssKind::Outer;
  else if (kind == "inner")
    r.kind = PssKind::Inner;
  else if (kind == "fit")
    r.kind = PssKind::Fit;
  else
    throw std::invalid_argument("result JSON: unknown kind " + kind);
  r.degree = j.at("degree").get<int>();
  r.order = j.at("order").get<int>();
  r.w = j.at("w").get<double>();
  r.p = poly_from_json(j.at("polynomial"));
  const std::string st = j.at("status").get<std::string>();
  if (st == "optimal")
    r.status = SolveStatus::Optimal;
  else if (st == "near-optimal")
    r.status = SolveStatus::NearOptimal;
  else if (st == "infeasible")
    r.status = SolveStatus::Infeasible;
  else if (st == "unbounded")
    r.status = SolveStatus::Unbounded;
  else
    r.status = SolveStatus::NumericalFailure;
  r.gap = j.value("gap", 0.0);
  r.primalInfeas = j.value("primalInfeas", 0.0);
  r.dualInfeas = j.value("dualInfeas", 0.0);
  r.iterations = j.value("iterations", 0);
  r.rescaled = j.value("rescaled", false);
  r.certResidual = j.value("certResidual", -1.0);
  r.certified = j.value("certified", false);
  return r;
}

inline Json report_to_json(const ContainmentReport& rep, PssKind kind) {
  Json j;
  j["gridPerAxis"] = rep.gridPerAxis;
  if (kind == PssKind::Inner)
    j["maxInnerViolation"] = rep.maxInnerViolation;
  else {
    j["minOnKGrid"] = rep.minOnKGrid;
    j["minOnBGrid"] = rep.minOnBGrid;
  }
  j["volK"] = rep.volK;
  j["volKSigma"] = rep.volKSigma;
  j["volU"] = rep.volU;
  j["volUSigma"] = rep.volUSigma;
  j["volV"] = rep.volV;
  j["volVSigma"] = rep.volVSigma;
  j["pass"] = rep.pass;
  return j;
}

/// CSV writer: one row per grid point in row-major order (the last
/// coordinate varies fastest), columns x_1..x_n, p, indicator 1{p >= 1}.
inline void write_eval_grid(std::ostream& os, const MultiPoly& p, const Box& B,
                            int perAxis) {
  if (perAxis < 2) throw std::invalid_argument("eval grid: resolution must be >= 2");
  const int n = B.dim();
  for (int i = 0; i < n; ++i) os << "x" << (i + 1) << ",";
  os << "p,indicator\n";
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::vector<int> idx(n, 0);
  Eigen::VectorXd x(n);
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= perAxis;
  for (std::int64_t k = 0; k < total; ++k) {
    for (int i = 0; i < n; ++i)
      x[i] = B.a[i] + (B.b[i] - B.a[i]) * idx[i] / (perAxis - 1);
    const double v = p.eval(x);
    for (int i = 0; i < n; ++i) os << fmt(x[i]) << ",";
    os << fmt(v) << "," << (v >= 1.0 ? 1 : 0) << "\n";
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < perAxis) break;
      idx[i] = 0;
    }
  }
}

inline void write_samples_csv(std::ostream& os, const SampleBatch& batch, int n) {
  for (int i = 0; i < n; ++i) os << "x" << (i + 1) << (i + 1 < n ? "," : "\n");
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const auto& x : batch.samples) {
    for (int i = 0; i < n; ++i) os << fmt(x[i]) << (i + 1 < n ? "," : "\n");
  }
}

inline std::vector<Eigen::VectorXd> read_points_csv(std::istream& is) {
  std::vector<Eigen::VectorXd> pts;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (!line.empty() && (line[0] == 'x' || line[0] == '#')) continue;  // header
    }
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (!pts.empty() && pts.front().size() != static_cast<Eigen::Index>(vals.size()))
      throw std::invalid_argument("points CSV: ragged rows");
    pts.emplace_back(Eigen::Map<Eigen::VectorXd>(vals.data(),
                                                 static_cast<Eigen::Index>(vals.size())));
  }
  return pts;
}

inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write file: " + path);
  f << content;
}

}  // namespace pss
