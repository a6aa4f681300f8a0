// psskit: polynomial superlevel-set approximation toolkit front end.
//
// Tasks operate on a semialgebraic set description (JSON) and write
// their artifacts plus a manifest into the output directory. Outputs are
// deterministic for a fixed spec and seed; only the manifest carries
// timestamps and timings.

#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "pss/approx.hpp"
#include "pss/json_io.hpp"
#include "pss/sampler.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCheck = 4;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CheckError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string task;
  std::string setPath;
  std::string pointsPath;
  std::string resultPath;
  std::string outDir = ".";
  int degree = -1;
  int order = -1;
  int grid = 0;
  std::int64_t samples = 10000;
  std::uint64_t seed = 0;
  double solverTol = 1e-8;
  std::string rescale = "auto";
};

class Timings {
 public:
  void record(const std::string& name, double seconds) { t_[name] = seconds; }
  pss::Json to_json() const {
    pss::Json j;
    for (const auto& [k, v] : t_) j[k] = v;
    return j;
  }

 private:
  std::map<std::string, double> t_;
};

template <typename F>
auto timed(Timings& t, const std::string& name, F&& f) {
  const auto start = std::chrono::steady_clock::now();
  auto result = f();
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  t.record(name, dt.count());
  return result;
}

pss::ApproxSettings make_settings(const Options& opt) {
  pss::ApproxSettings s;
  s.solver.feasTol = opt.solverTol;
  s.solver.gapTol = opt.solverTol;
  if (opt.rescale == "on")
    s.rescale = pss::RescaleMode::On;
  else if (opt.rescale == "off")
    s.rescale = pss::RescaleMode::Off;
  else if (opt.rescale == "auto")
    s.rescale = pss::RescaleMode::Auto;
  else
    throw InputError("--rescale must be auto, on, or off");
  if (opt.grid > 0) s.fitGridPerAxis = opt.grid;
  return s;
}

pss::Json load_json(const std::string& path) {
  try {
    return pss::Json::parse(pss::read_file(path));
  } catch (const std::exception& e) {
    throw InputError(std::string("failed to parse ") + path + ": " + e.what());
  }
}

pss::SemialgSet load_set(const std::string& path, std::string& rawOut) {
  if (path.empty()) throw InputError("a set description file is required");
  try {
    rawOut = pss::read_file(path);
    return pss::set_from_json(pss::Json::parse(rawOut));
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(std::string("invalid set description ") + path + ": " + e.what());
  }
}

void require_usable(const pss::PssResult& res) {
  if (!res.usable_status())
    throw SolverError(std::string("solver did not converge: status ") +
                      pss::to_string(res.status));
}

void write_manifest(const Options& opt, const std::string& inputBytes,
                    const Timings& timings) {
  pss::Json m;
  m["tool"] = "psskit";
  m["version"] = "0.1.0";
  m["task"] = opt.task;
  {
    std::ostringstream hex;
    hex << std::hex << pss::fnv1a(inputBytes);
    m["inputsHash"] = hex.str();
  }
  m["seed"] = opt.seed;
  pss::Json settings;
  settings["degree"] = opt.degree;
  settings["order"] = opt.order;
  settings["grid"] = opt.grid;
  settings["samples"] = opt.samples;
  settings["solverTol"] = opt.solverTol;
  settings["rescale"] = opt.rescale;
  m["settings"] = settings;
  m["timings"] = timings.to_json();
  m["timestamp"] = static_cast<std::int64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
  pss::write_file(opt.outDir + "/manifest.json", m.dump(2) + "\n");
}

int grid_for(const Options& opt, int n) {
  return opt.grid > 0 ? opt.grid : pss::default_grid_per_axis(n);
}

void run_pss(const Options& opt, pss::PssKind kind) {
  if (opt.degree < 0) throw InputError("--degree is required for this task");
  std::string raw;
  pss::SemialgSet K = load_set(opt.setPath, raw);
  const auto settings = make_settings(opt);
  Timings timings;

  pss::PssResult res = timed(timings, "solve", [&] {
    return kind == pss::PssKind::Outer
               ? pss::outer_pss(K, opt.degree, opt.order, settings)
               : pss::inner_pss(K, opt.degree, opt.order, settings);
  });
  pss::write_file(opt.outDir + "/result.json",
                  pss::result_to_json(res).dump(2) + "\n");
  require_usable(res);

  pss::ContainmentReport rep = timed(timings, "containment", [&] {
    return pss::containment_check(res, K, grid_for(opt, K.n));
  });
  pss::write_file(opt.outDir + "/report.json",
                  pss::report_to_json(rep, kind).dump(2) + "\n");

  if (K.n <= 3) {
    std::ostringstream grid;
    pss::write_eval_grid(grid, res.p, K.box, grid_for(opt, K.n));
    pss::write_file(opt.outDir + "/grid.csv", grid.str());
  }
  write_manifest(opt, raw, timings);
  if (!rep.pass) throw CheckError("containment report failed");
  if (!res.certified)
    throw CheckError("solution is not certified (residual " +
                     std::to_string(res.certResidual) + ")");
}

void run_bbox(const Options& opt) {
  std::string raw;
  pss::SemialgSet K = load_set(opt.setPath, raw);
  if (K.generators.empty())
    throw InputError("bbox task needs at least one generator");
  int r = opt.order;
  if (r < 0) {
    r = 1;
    for (const auto& g : K.generators)
      r = std::max(r, pss::half_degree_ceil(g));
  }
  pss::SolverSettings solver;
  solver.feasTol = opt.solverTol;
  solver.gapTol = opt.solverTol;
  Timings timings;
  pss::Box B = [&] {
    try {
      return timed(timings, "bbox",
                   [&] { return pss::bounding_box(K.generators, K.n, r, solver); });
    } catch (const std::runtime_error& e) {
      throw SolverError(e.what());
    }
  }();
  pss::Json out;
  out["order"] = r;
  out["box"] = pss::box_to_json(B);
  pss::write_file(opt.outDir + "/box.json", out.dump(2) + "\n");
  write_manifest(opt, raw, timings);
}

void run_fit(const Options& opt) {
  if (opt.degree < 0) throw InputError("--degree is required for this task");
  if (opt.pointsPath.empty()) throw InputError("--points is required for fit");
  std::string raw;
  pss::SemialgSet K = load_set(opt.setPath, raw);
  std::string pointsRaw = pss::read_file(opt.pointsPath);
  std::istringstream pin(pointsRaw);
  std::vector<Eigen::VectorXd> pts;
  try {
    pts = pss::read_points_csv(pin);
  } catch (const std::exception& e) {
    throw InputError(std::string("invalid points file: ") + e.what());
  }
  auto settings = make_settings(opt);
  Timings timings;
  pss::PssResult res = [&] {
    try {
      return timed(timings, "fit",
                   [&] { return pss::fit_points(pts, K.box, opt.degree, settings); });
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }();
  pss::write_file(opt.outDir + "/result.json",
                  pss::result_to_json(res).dump(2) + "\n");
  write_manifest(opt, raw + pointsRaw, timings);
  require_usable(res);
  for (const auto& x : pts)
    if (res.p.eval(x) < 1.0 - 1e-6)
      throw CheckError("fitted polynomial misses an input point");
}

void run_sample(const Options& opt) {
  if (opt.degree < 0) throw InputError("--degree is required for this task");
  std::string raw;
  pss::SemialgSet K = load_set(opt.setPath, raw);
  const auto settings = make_settings(opt);
  Timings timings;
  pss::PssResult res = timed(timings, "solve", [&] {
    return pss::outer_pss(K, opt.degree, opt.order, settings);
  });
  pss::write_file(opt.outDir + "/result.json",
                  pss::result_to_json(res).dump(2) + "\n");
  require_usable(res);
  if (!res.certified) throw SolverError("outer polynomial is not certified");

  pss::PolyDensity pd = pss::make_poly_density(res, K.box);
  pss::SampleBatch batch = timed(timings, "sample", [&] {
    try {
      return pss::uniform_sample(K, pd, opt.samples, opt.seed);
    } catch (const std::runtime_error& e) {
      throw SolverError(e.what());
    }
  });

  std::ostringstream csv;
  pss::write_samples_csv(csv, batch, K.n);
  pss::write_file(opt.outDir + "/samples.csv", csv.str());

  // gamma estimate against a Monte-Carlo volume of K
  pss::ContainmentReport rep = timed(timings, "volume", [&] {
    return pss::containment_check(res, K, 2);
  });
  pss::Json report;
  report["seed"] = opt.seed;
  report["requested"] = opt.samples;
  report["accepted"] = batch.accepted;
  report["proposals"] = batch.proposals;
  report["inKRejections"] = batch.inKRejections;
  report["empiricalRate"] = batch.empiricalRate;
  report["gammaEstimate"] = pss::acceptance_rate(rep.volK, pd);
  report["volKEstimate"] = rep.volK;
  report["mass"] = pd.mass;
  pss::write_file(opt.outDir + "/sample-report.json", report.dump(2) + "\n");
  write_manifest(opt, raw, timings);
}

void run_eval_grid(const Options& opt) {
  if (opt.resultPath.empty()) throw InputError("--result is required for eval-grid");
  std::string raw;
  pss::SemialgSet K = load_set(opt.setPath, raw);
  pss::PssResult res = [&] {
    try {
      return pss::result_from_json(load_json(opt.resultPath));
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw InputError(std::string("invalid result file: ") + e.what());
    }
  }();
  const int g = grid_for(opt, K.n);
  if (g < 2) throw InputError("--grid must be >= 2");
  Timings timings;
  std::ostringstream grid;
  pss::write_eval_grid(grid, res.p, K.box, g);
  pss::write_file(opt.outDir + "/grid.csv", grid.str());
  write_manifest(opt, raw, timings);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psskit: L1-minimal polynomial superlevel-set approximation, "
               "bounding boxes, point-cloud fitting, and uniform sampling over "
               "semialgebraic sets"};
  Options opt;
  app.add_option("--task", opt.task,
                 "one of: bbox, outer, inner, fit, sample, eval-grid")
      ->required();
  app.add_option("set", opt.setPath, "semialgebraic set description (JSON)");
  app.add_option("--points", opt.pointsPath, "points CSV for the fit task");
  app.add_option("--result", opt.resultPath, "result JSON for eval-grid");
  app.add_option("--out", opt.outDir, "output directory (default: current)");
  app.add_option("--degree", opt.degree, "polynomial degree d");
  app.add_option("--order", opt.order, "relaxation order r (default ceil(d/2))");
  app.add_option("--grid", opt.grid, "grid points per axis");
  app.add_option("--samples", opt.samples, "number of samples to accept");
  app.add_option("--seed", opt.seed, "RNG seed");
  app.add_option("--solver-tol", opt.solverTol, "solver tolerance");
  app.add_option("--rescale", opt.rescale, "rescale to [-1,1]^n: auto|on|off");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  if (const char* threads = std::getenv("PSSKIT_THREADS")) {
    const int cap = std::atoi(threads);
    if (cap > 0) Eigen::setNbThreads(cap);
  }

  try {
    std::error_code ec;
    std::filesystem::create_directories(opt.outDir, ec);
    if (ec) throw InputError("cannot create output directory " + opt.outDir);

    if (opt.task == "outer")
      run_pss(opt, pss::PssKind::Outer);
    else if (opt.task == "inner")
      run_pss(opt, pss::PssKind::Inner);
    else if (opt.task == "bbox")
      run_bbox(opt);
    else if (opt.task == "fit")
      run_fit(opt);
    else if (opt.task == "sample")
      run_sample(opt);
    else if (opt.task == "eval-grid")
      run_eval_grid(opt);
    else
      throw InputError("unknown task: " + opt.task);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const CheckError& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return kExitCheck;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
