// Command-line front end: locate and classify relaxation cycle candidates
// of predator-prey models, export fast-orbit scans and trajectories, and
// run the quantitative acceptance checks.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "relaxosc/criteria.hpp"
#include "relaxosc/fast_orbit.hpp"
#include "relaxosc/full_sim.hpp"
#include "relaxosc/model.hpp"
#include "relaxosc/model_io.hpp"
#include "relaxosc/util.hpp"
#include "relaxosc/verify.hpp"
#include "relaxosc/version.hpp"

namespace {

using namespace relaxosc;

// Exit codes: 0 success, 1 usage/config error (or failed verification),
// 2 unsupported isocline shape, 3 numerical failure.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUnsupported = 2;
constexpr int kExitNumerical = 3;

struct ModelArgs {
  RawModelConfig flags;
  std::string configPath;

  ModelSpec resolve() const {
    RawModelConfig merged = flags;
    if (!configPath.empty()) {
      std::ifstream in(configPath);
      if (!in) throw ConfigError("cannot open config file: " + configPath);
      std::stringstream buf;
      buf << in.rdbuf();
      RawModelConfig fromFile = parse_model_config_text(buf.str());
      merged = merge_model_config(fromFile, flags);
    }
    return make_model(merged);
  }
};

void add_model_flags(CLI::App* cmd, ModelArgs& args) {
  cmd->add_option("--config", args.configPath,
                  "model config file (key = value lines)");
  cmd->add_option("--family", args.flags.family,
                  "response family: holling2, holling4, holling4g, ivlev, log");
  cmd->add_option("--r", args.flags.r, "prey growth rate");
  cmd->add_option("--k", args.flags.k, "prey carrying capacity");
  cmd->add_option("--c", args.flags.c, "conversion efficiency");
  cmd->add_option("--m", args.flags.m, "response scale");
  cmd->add_option("--a", args.flags.a, "response shape parameter");
  cmd->add_option("--b", args.flags.b,
                  "second shape parameter (holling4g only)");
}

void write_output(const std::string& content, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(outPath);
  if (!out) throw ConfigError("cannot open output file: " + outPath);
  out << content;
}

std::string model_comment(const ModelSpec& spec) {
  std::ostringstream o;
  o << "family=" << family_token(spec.family) << " r=" << fmt17(spec.r)
    << " k=" << fmt17(spec.K) << " c=" << fmt17(spec.c);
  if (spec.family != ResponseFamily::Custom) {
    o << " m=" << fmt17(spec.m) << " a=" << fmt17(spec.a);
    if (spec.family == ResponseFamily::GeneralizedHollingIV)
      o << " b=" << fmt17(spec.b);
  }
  return o.str();
}

nlohmann::json tool_header() {
  return {{"name", kToolName}, {"version", kVersion}};
}

nlohmann::json model_json(const ModelSpec& spec) {
  nlohmann::json m;
  m["family"] = family_token(spec.family);
  m["r"] = spec.r;
  m["k"] = spec.K;
  m["c"] = spec.c;
  if (spec.family != ResponseFamily::Custom) {
    m["m"] = spec.m;
    m["a"] = spec.a;
    if (spec.family == ResponseFamily::GeneralizedHollingIV) m["b"] = spec.b;
  }
  return m;
}

// ---------------------------------------------------------------------------

int cmd_analyze(const ModelArgs& margs, int gridN, double tol,
                const std::string& outPath) {
  ModelSpec spec = margs.resolve();
  AnalysisReport report = predict_dynamics(spec, gridN, tol);

  nlohmann::json j;
  j["tool"] = tool_header();
  j["report"] = nlohmann::json::parse(report_json(report));
  write_output(j.dump(2) + "\n", outPath);

  return report.shape.humpClass == HumpClass::Unsupported ? kExitUnsupported
                                                          : kExitOk;
}

int cmd_chi_scan(const ModelArgs& margs, int gridN, double tol,
                 const std::string& outPath) {
  ModelSpec spec = margs.resolve();
  ChiScanResult scan = scan_chi_roots(spec, gridN, tol);

  std::ostringstream out;
  out << "# " << kToolName << " " << kVersion << "\n";
  out << "# command=chi-scan grid-n=" << gridN << " tol=" << fmt17(tol)
      << "\n";
  out << "# " << model_comment(spec) << "\n";
  for (const auto& r : scan.roots)
    out << "# root x0=" << fmt17(r.x0) << " lambda=" << fmt17(r.lambda)
        << " crossing=" << r.crossingSign << "\n";
  for (const auto& n : scan.notes) out << "# note " << n << "\n";
  out << "x0,chi,lambda\n";
  for (const auto& s : scan.samples)
    out << fmt17(s.x0) << "," << fmt17(s.chi) << "," << fmt17(s.lambda)
        << "\n";
  write_output(out.str(), outPath);
  return kExitOk;
}

int cmd_simulate(const ModelArgs& margs, double eps, double x0, double y0,
                 double tEnd, double tol, std::optional<double> sectionX,
                 const std::string& outPath) {
  ModelSpec spec = margs.resolve();
  SimOptions opt;
  opt.tol = tol;
  opt.sectionX = sectionX;
  Trajectory traj = simulate(spec, eps, x0, y0, tEnd, opt);

  std::ostringstream out;
  out << "# " << kToolName << " " << kVersion << "\n";
  out << "# command=simulate epsilon=" << fmt17(eps) << " x0=" << fmt17(x0)
      << " y0=" << fmt17(y0) << " t-end=" << fmt17(tEnd)
      << " tol=" << fmt17(tol) << "\n";
  out << "# " << model_comment(spec) << "\n";
  for (const auto& n : traj.notes) out << "# note " << n << "\n";
  for (const auto& h : traj.sectionHits)
    out << "# section-crossing t=" << fmt17(h.t) << " x=" << fmt17(std::exp(h.u))
        << " y=" << fmt17(h.y) << " direction=" << h.direction << "\n";
  out << "t,x,y\n";
  for (const auto& s : traj.samples)
    out << fmt17(s.t) << "," << fmt17(std::exp(s.u)) << "," << fmt17(s.y)
        << "\n";
  write_output(out.str(), outPath);
  return traj.completed ? kExitOk : kExitNumerical;
}

int cmd_cycles(const ModelArgs& margs, double eps, int gridN, double tol,
               const std::string& outPath) {
  ModelSpec spec = margs.resolve();
  AnalysisReport report = predict_dynamics(spec, gridN, tol);
  if (report.shape.humpClass == HumpClass::Unsupported) {
    std::cerr << "cycles: isocline shape is outside the supported classes\n";
    return kExitUnsupported;
  }

  std::vector<CycleSeed> seeds;
  for (const auto& r : report.scan.roots) seeds.push_back({r.x0, r.lambda});
  std::vector<MeasuredCycle> cycles = find_cycles(spec, eps, seeds);

  nlohmann::json j;
  j["tool"] = tool_header();
  j["model"] = model_json(spec);
  j["epsilon"] = eps;
  j["verdict"] = to_string(report.classification.verdict);
  auto arr = nlohmann::json::array();
  for (const auto& c : cycles) {
    nlohmann::json e;
    e["seedX0"] = c.seed.x0;
    e["seedLambda"] = c.seed.lambda;
    e["found"] = c.found;
    if (c.found) {
      e["xMax"] = c.xMax;
      e["period"] = c.period;
      e["muTotal"] = c.muTotal;
      e["stable"] = c.stable;
    }
    if (!c.note.empty()) e["note"] = c.note;
    arr.push_back(std::move(e));
  }
  j["cycles"] = std::move(arr);
  write_output(j.dump(2) + "\n", outPath);
  return kExitOk;
}

int cmd_threshold_k4(double tol, const std::string& outPath) {
  double ks = holling4_kappa_star(tol);
  nlohmann::json j;
  j["tool"] = tool_header();
  j["kappaStar"] = ks;
  j["q4"] = holling4_q(4.0);
  j["tol"] = tol;
  write_output(j.dump(2) + "\n", outPath);
  return kExitOk;
}

int cmd_sweep(const ModelArgs& margs, const std::string& param, double from,
              double to, int steps, int gridN, double tol,
              const std::string& outPath) {
  if (steps < 2) throw ConfigError("sweep: --steps must be at least 2");
  if (!(from > 0.0) || !(to > 0.0))
    throw ConfigError("sweep: parameter range must be positive");

  std::ostringstream out;
  out << "# " << kToolName << " " << kVersion << "\n";
  out << "# command=sweep param=" << param << " from=" << fmt17(from)
      << " to=" << fmt17(to) << " steps=" << steps << " grid-n=" << gridN
      << " tol=" << fmt17(tol) << "\n";
  out << "value,verdict,rootCount,roots\n";

  for (int i = 0; i < steps; ++i) {
    double value = from + (to - from) * static_cast<double>(i) / (steps - 1);
    RawModelConfig point = margs.flags;
    std::optional<double>* slot = nullptr;
    if (param == "r") slot = &point.r;
    else if (param == "k") slot = &point.k;
    else if (param == "c") slot = &point.c;
    else if (param == "m") slot = &point.m;
    else if (param == "a") slot = &point.a;
    else if (param == "b") slot = &point.b;
    else throw ConfigError("sweep: unknown --param '" + param + "'");
    *slot = value;

    ModelArgs pargs;
    pargs.flags = point;
    pargs.configPath = margs.configPath;
    ModelSpec spec = pargs.resolve();

    IsoclineShape shape = classify_isocline(spec);
    if (shape.humpClass == HumpClass::Unsupported) {
      out << fmt17(value) << ",unsupported,0,\n";
      continue;
    }
    ChiScanResult scan = scan_chi_roots(spec, gridN, tol);
    RootClassification cls = classify_roots(spec, scan);
    out << fmt17(value) << "," << to_string(cls.verdict) << ","
        << scan.roots.size() << ",";
    for (std::size_t k = 0; k < scan.roots.size(); ++k) {
      if (k) out << ";";
      out << fmt17(scan.roots[k].x0) << ":" << fmt17(scan.roots[k].lambda);
    }
    out << "\n";
  }
  write_output(out.str(), outPath);
  return kExitOk;
}

int cmd_verify(const std::string& filter, bool inject,
               const std::string& outPath) {
  verify::AcceptanceOptions opt;
  opt.filter = filter;
  opt.injectFailure = inject;
  std::vector<verify::CheckResult> results = verify::run_acceptance(opt);

  std::ostringstream out;
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " — " << r.details
        << "\n";
    if (!r.passed) ++failed;
  }
  out << results.size() - failed << " passed, " << failed << " failed\n";
  write_output(out.str(), outPath);
  return failed == 0 && !results.empty() ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relaxation oscillations of predator-prey systems with a "
               "small predator death rate"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.require_subcommand(1);

  // analyze
  ModelArgs analyzeModel;
  int analyzeGrid = 400;
  double analyzeTol = 1e-10;
  std::string analyzeOut;
  auto* analyze = app.add_subcommand(
      "analyze", "classify the isocline and locate cycle candidates");
  add_model_flags(analyze, analyzeModel);
  analyze->add_option("--grid-n", analyzeGrid, "anchors in the scan grid");
  analyze->add_option("--tol", analyzeTol, "orbit tolerance for the scan");
  analyze->add_option("--out", analyzeOut, "output file (default: stdout)");

  // chi-scan
  ModelArgs scanModel;
  int scanGrid = 400;
  double scanTol = 1e-10;
  std::string scanOut;
  auto* chiScan = app.add_subcommand(
      "chi-scan", "tabulate the balance and stability characteristics");
  add_model_flags(chiScan, scanModel);
  chiScan->add_option("--grid-n", scanGrid, "anchors in the scan grid");
  chiScan->add_option("--tol", scanTol, "orbit tolerance for the scan");
  chiScan->add_option("--out", scanOut, "output file (default: stdout)");

  // simulate
  ModelArgs simModel;
  double simEps = 0.0, simX0 = 0.0, simY0 = 0.0, simTEnd = 0.0,
         simTol = 1e-9;
  std::optional<double> simSection;
  std::string simOut;
  auto* sim = app.add_subcommand("simulate",
                                 "integrate the full system and export t,x,y");
  add_model_flags(sim, simModel);
  sim->add_option("--epsilon", simEps, "predator death rate")->required();
  sim->add_option("--x0", simX0, "initial prey density")->required();
  sim->add_option("--y0", simY0, "initial predator density")->required();
  sim->add_option("--t-end", simTEnd, "integration horizon")->required();
  sim->add_option("--tol", simTol, "integration tolerance");
  sim->add_option("--section-x", simSection,
                  "record crossings of the line x = value");
  sim->add_option("--out", simOut, "output file (default: stdout)");

  // cycles
  ModelArgs cycModel;
  double cycEps = 0.0, cycTol = 1e-10;
  int cycGrid = 400;
  std::string cycOut;
  auto* cyc = app.add_subcommand(
      "cycles", "hunt actual cycles near the predicted anchors");
  add_model_flags(cyc, cycModel);
  cyc->add_option("--epsilon", cycEps, "predator death rate")->required();
  cyc->add_option("--grid-n", cycGrid, "anchors in the seed scan");
  cyc->add_option("--tol", cycTol, "orbit tolerance for the seed scan");
  cyc->add_option("--out", cycOut, "output file (default: stdout)");

  // threshold-k4
  double thrTol = 1e-10;
  std::string thrOut;
  auto* thr = app.add_subcommand(
      "threshold-k4",
      "shape threshold kappa* of the type IV cycle-pair birth");
  thr->add_option("--tol", thrTol, "bisection tolerance");
  thr->add_option("--out", thrOut, "output file (default: stdout)");

  // sweep
  ModelArgs sweepModel;
  std::string sweepParam;
  double sweepFrom = 0.0, sweepTo = 0.0, sweepTol = 1e-8;
  int sweepSteps = 0, sweepGrid = 200;
  std::string sweepOut;
  auto* sweep = app.add_subcommand(
      "sweep", "scan roots and verdicts across one model parameter");
  add_model_flags(sweep, sweepModel);
  sweep->add_option("--param", sweepParam, "parameter to vary: r,k,c,m,a,b")
      ->required();
  sweep->add_option("--from", sweepFrom, "first value")->required();
  sweep->add_option("--to", sweepTo, "last value")->required();
  sweep->add_option("--steps", sweepSteps, "number of values")->required();
  sweep->add_option("--grid-n", sweepGrid, "anchors per scan");
  sweep->add_option("--tol", sweepTol, "orbit tolerance per scan");
  sweep->add_option("--out", sweepOut, "output file (default: stdout)");

  // verify
  std::string verFilter, verOut;
  bool verInject = false;
  auto* ver = app.add_subcommand(
      "verify", "run the quantitative acceptance checks");
  ver->add_option("--filter", verFilter, "run only checks whose id contains this");
  ver->add_flag("--inject-failure", verInject)->group("");  // harness self-test
  ver->add_option("--out", verOut, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Collapse CLI11's per-error exit codes onto the usage exit code;
    // --help and --version still leave with success.
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analyze->parsed())
      return cmd_analyze(analyzeModel, analyzeGrid, analyzeTol, analyzeOut);
    if (chiScan->parsed())
      return cmd_chi_scan(scanModel, scanGrid, scanTol, scanOut);
    if (sim->parsed())
      return cmd_simulate(simModel, simEps, simX0, simY0, simTEnd, simTol,
                          simSection, simOut);
    if (cyc->parsed())
      return cmd_cycles(cycModel, cycEps, cycGrid, cycTol, cycOut);
    if (thr->parsed()) return cmd_threshold_k4(thrTol, thrOut);
    if (sweep->parsed())
      return cmd_sweep(sweepModel, sweepParam, sweepFrom, sweepTo, sweepSteps,
                       sweepGrid, sweepTol, sweepOut);
    if (ver->parsed()) return cmd_verify(verFilter, verInject, verOut);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
