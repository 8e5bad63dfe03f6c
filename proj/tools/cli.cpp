#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "vfgrad/library.hpp"
#include "vfgrad/serialization.hpp"

namespace vfgrad::cli {
namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Flags that take no value; everything else in a config file maps to "--key value".
const std::set<std::string> kSwitches = {"use-oracle", "no-timestamp", "json"};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

Vector parse_vector(const std::string& s) {
  if (s.empty()) throw UsageError("empty vector");
  const auto parts = split(s, ',');
  Vector v(static_cast<int>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<int>(i)) = parse_double(parts[i]);
  return v;
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& e : v) out += (out.empty() ? "" : ",") + config_value(e);
    return out;
  }
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os << std::setprecision(17) << v.get<double>();
    return os.str();
  }
  if (v.is_object()) return v.dump();
  throw UsageError("unsupported config value " + v.dump());
}

// Applies --config: keys of the JSON object replace the same flags given on
// the command line.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) {
    return a == "--config" || a.rfind("--config=", 0) == 0;
  });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (std::next(it) == args.end()) throw UsageError("--config needs a path");
    path = *std::next(it);
    args.erase(it, std::next(it, 2));
  } else {
    path = it->substr(9);
    args.erase(it);
  }
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");

  for (const auto& [key, val] : cfg.items()) {
    const std::string flag = "--" + key;
    const bool is_switch = kSwitches.contains(key);
    for (std::size_t i = 0; i < args.size();) {
      if (args[i] == flag) {
        const std::size_t n = (!is_switch && i + 1 < args.size()) ? 2 : 1;
        args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i + n));
      } else if (args[i].rfind(flag + "=", 0) == 0) {
        args.erase(args.begin() + static_cast<long>(i));
      } else {
        ++i;
      }
    }
    if (is_switch) {
      if (!val.is_boolean()) throw UsageError("config key '" + key + "' must be true or false");
      if (val.get<bool>()) args.push_back(flag);
    } else {
      args.push_back(flag);
      args.push_back(config_value(val));
    }
  }
  return args;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Common {
  std::string problem;
  std::string params = "{}";
  int q = 0;
  bool use_oracle = false;
  std::uint64_t seed = 0;
  double solver_tol = 1e-9;
  int starts = 3;
  std::string output;
  std::string format = "json";
  bool no_timestamp = false;

  void add_to(CLI::App* cmd, bool with_format) {
    cmd->set_help_flag("--help", "Print this help message and exit");  // -h is the FD step
    cmd->add_option("problem", problem, "Registered problem name")->required();
    cmd->add_option("--params", params, "Problem parameters as a JSON object");
    cmd->add_option("--q", q, "Parameter dimension (shorthand for params.q)");
    cmd->add_flag("--use-oracle", use_oracle, "Use the closed-form KKT oracle when available");
    cmd->add_option("--seed", seed, "Seed for multi-start and random parameters");
    cmd->add_option("--solver-tol", solver_tol, "KKT residual tolerance of the solver");
    cmd->add_option("--starts", starts, "Solver multi-start count");
    cmd->add_option("--output", output, "Write results to this file instead of stdout");
    cmd->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp field from JSON");
    if (with_format) {
      cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    }
  }

  json params_json() const {
    json p;
    try {
      p = json::parse(params);
    } catch (const json::exception& e) {
      throw UsageError(std::string("--params: ") + e.what());
    }
    if (!p.is_object()) throw UsageError("--params must be a JSON object");
    if (q > 0) p["q"] = q;
    return p;
  }

  ParametricProblem load() const { return library(problem, params_json()); }

  SolveOptions solve_options() const {
    SolveOptions o;
    o.tol = solver_tol;
    o.seed = seed;
    o.starts = starts;
    o.use_oracle = use_oracle;
    o.validate();
    return o;
  }

  Vector parameter(const std::string& text, int dim, const char* flag) const {
    if (text.empty()) throw UsageError(std::string(flag) + " is required");
    if (text == "rand") {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      Vector v(dim);
      for (int i = 0; i < dim; ++i) v(i) = unif(rng);
      return v;
    }
    Vector v = parse_vector(text);
    if (v.size() != dim) {
      throw UsageError(std::string(flag) + " has " + std::to_string(v.size()) +
                       " entries, problem expects q = " + std::to_string(dim));
    }
    return v;
  }

  json envelope(const std::string& command) const {
    json j = {{"command", command}, {"problem", problem}, {"params", params_json()},
              {"seed", seed}, {"use_oracle", use_oracle}};
    if (!no_timestamp) j["timestamp"] = utc_timestamp();
    return j;
  }
};

// Curve syntax: "line:A;B" or "spline:K1;K2;...", points as comma lists.
// With q = 1 the points may be written as one comma list: "line:-1,1".
CurveSpec parse_curve(const std::string& text, int q) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--curve must look like line:A;B or spline:K1;K2;...");
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  std::vector<Vector> points;
  if (body.find(';') == std::string::npos && q == 1) {
    const Vector flat = parse_vector(body);
    for (int i = 0; i < flat.size(); ++i) points.push_back(Vector::Constant(1, flat(i)));
  } else {
    for (const std::string& part : split(body, ';')) points.push_back(parse_vector(part));
  }
  for (const Vector& pnt : points) {
    if (pnt.size() != q) throw UsageError("--curve points must have q = " + std::to_string(q) + " entries");
  }
  try {
    if (kind == "line") {
      if (points.size() != 2) throw UsageError("a line curve needs exactly two points");
      return CurveSpec::line(points[0], points[1]);
    }
    if (kind == "spline") return CurveSpec::cubic_spline(points);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unknown curve kind '" + kind + "' (line|spline)");
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

void emit(const Common& c, std::ostream& out, const json& j) {
  Sink sink(c.output, out);
  sink.stream() << j.dump(2) << '\n';
}

void require_json(const Common& c, const char* command) {
  if (c.format != "json") throw UsageError(std::string(command) + " only supports --format json");
}

int cmd_list(bool as_json, std::ostream& out) {
  const auto entries = library_entries();
  if (as_json) {
    json arr = json::array();
    for (const LibraryEntry& e : entries) {
      arr.push_back({{"name", e.name}, {"description", e.description}, {"n", e.n}, {"q", e.q},
                     {"m", e.m}, {"cone", e.cone}, {"known_value", e.known_value},
                     {"nlp", e.is_nlp}});
    }
    out << arr.dump(2) << '\n';
    return kOk;
  }
  for (const LibraryEntry& e : entries) {
    out << e.name << " n=" << e.n << " q=" << e.q << " m=" << e.m << " cone=" << e.cone
        << " known_f=" << (e.known_value ? "yes" : "no") << "  " << e.description << '\n';
  }
  return kOk;
}

int cmd_solve(const Common& c, const std::string& theta_text, std::ostream& out) {
  require_json(c, "solve");
  const ParametricProblem p = c.load();
  const Vector theta = c.parameter(theta_text, p.q, "--theta");
  const SolveReport report = solve_primal_dual_report(p, theta, c.solve_options());
  json j = c.envelope("solve");
  j["result"] = to_json(report);
  emit(c, out, j);
  return report.point.status == SolveStatus::kFailed ? kSolverFailure : kOk;
}

int cmd_grad(const Common& c, const std::string& theta_text, std::ostream& out) {
  require_json(c, "grad");
  const ParametricProblem p = c.load();
  const Vector theta = c.parameter(theta_text, p.q, "--theta");
  const AdjointGradient g = adjoint_gradient(p, theta, c.solve_options());
  json j = c.envelope("grad");
  j["result"] = to_json(g);
  j["result"]["kkt_residual"] = to_json(kkt_residual(p, g.source));
  emit(c, out, j);
  return g.certified ? kOk : kCheckFailed;
}

struct ChainFlags {
  std::string curve;
  int n = 201;
  double h = 1e-5;
  double tol = 1e-4;
  std::optional<double> threshold;
};

int cmd_chainrule(const Common& c, const ChainFlags& f, std::ostream& out) {
  const ParametricProblem p = c.load();
  if (f.curve.empty()) throw UsageError("--curve is required");
  const CurveSpec curve = parse_curve(f.curve, p.q);
  ChainRuleOptions opts;
  opts.n_grid = f.n;
  opts.h = f.h;
  opts.tol = f.tol;
  opts.threshold = f.threshold;
  opts.solve = c.solve_options();
  if (opts.n_grid < 3) throw UsageError("--n must be >= 3");
  const ChainRuleReport report = chain_rule_check(p, curve, opts);
  if (c.format == "csv") {
    Sink sink(c.output, out);
    write_chain_rule_csv(sink.stream(), report);
  } else {
    json j = c.envelope("verify chainrule");
    j["result"] = to_json(report);
    emit(c, out, j);
  }
  return report.ok() ? kOk : kCheckFailed;
}

struct DiniFlags {
  std::string theta;
  std::string dir;
  std::string h_list = "1e-2,1e-3,1e-4";
  double tol = 1e-3;
};

int cmd_dini(const Common& c, const DiniFlags& f, std::ostream& out) {
  require_json(c, "verify dini");
  const ParametricProblem p = c.load();
  const Vector theta = c.parameter(f.theta, p.q, "--theta");
  const Vector d = c.parameter(f.dir, p.q, "--dir");
  DiniOptions opts;
  opts.solve = c.solve_options();
  opts.tol = f.tol;
  opts.h_list.clear();
  for (const std::string& h : split(f.h_list, ',')) opts.h_list.push_back(parse_double(h));
  std::vector<PrimalDualPoint> points;
  if (p.known_kkt_points) points = p.known_kkt_points(theta);
  if (points.empty()) {
    const SolveReport report = solve_primal_dual_report(p, theta, opts.solve);
    if (report.point.status == SolveStatus::kFailed) {
      throw SolverFailure("solver failed at theta", report);
    }
    points.push_back(report.point);
  }
  const DiniReport report = dini_sandwich_check(p, theta, d, points, opts);
  json j = c.envelope("verify dini");
  j["result"] = to_json(report);
  j["result"]["kkt_points"] = points.size();
  emit(c, out, j);
  return report.ok ? kOk : kCheckFailed;
}

struct DescendFlags {
  std::string theta0;
  int iters = 500;
  double s = 1.0;
  double alpha0 = 1.0;
  std::string schedule = "harmonic";
  double grad_tol = 1e-8;
};

int cmd_descend(const Common& c, const DescendFlags& f, std::ostream& out) {
  const ParametricProblem p = c.load();
  DescentOptions opts;
  opts.s = f.s;
  opts.alpha0 = f.alpha0;
  opts.schedule = parse_schedule(f.schedule);
  opts.max_iter = f.iters;
  opts.grad_tol = f.grad_tol;
  opts.solve = c.solve_options();
  const Vector theta0 = c.parameter(f.theta0, p.q, "--theta0");
  const DescentTrace trace = small_step_descent(p, theta0, opts);
  if (c.format == "csv") {
    Sink sink(c.output, out);
    write_descent_csv(sink.stream(), trace);
  } else {
    json j = c.envelope("descend");
    j["result"] = to_json(trace);
    emit(c, out, j);
  }
  return trace.stop_reason == StopReason::kSolverFailure ? kSolverFailure : kOk;
}

int cmd_cost(const Common& c, const std::string& theta_text, double h, std::ostream& out) {
  require_json(c, "cost");
  const ParametricProblem p = c.load();
  const Vector theta = c.parameter(theta_text, p.q, "--theta0");
  const CostReport report = cost_report(p, theta, c.solve_options(), h);
  json j = c.envelope("cost");
  j["theta"] = to_json(theta);
  j["result"] = to_json(report, !c.no_timestamp);
  emit(c, out, j);
  return report.cheaper ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adjoint-state gradients of parametric value functions"};
  app.name("vfgrad");
  app.require_subcommand(1);

  bool list_json = false;
  auto* list = app.add_subcommand("list", "List built-in problems");
  list->add_flag("--json", list_json, "Print a JSON array");

  Common common;
  std::string theta;
  auto* solve = app.add_subcommand("solve", "Solve the KKT system at theta");
  common.add_to(solve, true);
  solve->add_option("--theta", theta, "Parameter as a comma list, or 'rand'");

  auto* grad = app.add_subcommand("grad", "Adjoint-state gradient at theta");
  common.add_to(grad, true);
  grad->add_option("--theta", theta, "Parameter as a comma list, or 'rand'");

  auto* verify = app.add_subcommand("verify", "Empirical conservativity checks");
  verify->require_subcommand(1);
  ChainFlags chain;
  auto* chainrule = verify->add_subcommand("chainrule", "Chain rule along a curve");
  common.add_to(chainrule, true);
  chainrule->add_option("--curve", chain.curve, "line:A;B or spline:K1;K2;...");
  chainrule->add_option("--n", chain.n, "Grid size");
  chainrule->add_option("--h", chain.h, "Central-difference step");
  chainrule->add_option("--tol", chain.tol, "Pointwise relative tolerance");
  chainrule->add_option("--threshold", chain.threshold, "Required pass fraction (default 1-3/n)");

  DiniFlags dini;
  auto* dini_cmd = verify->add_subcommand("dini", "Difference quotients against <u, d>");
  common.add_to(dini_cmd, true);
  dini_cmd->add_option("--theta", dini.theta, "Parameter as a comma list, or 'rand'");
  dini_cmd->add_option("--dir", dini.dir, "Direction as a comma list, or 'rand'");
  dini_cmd->add_option("--h-list", dini.h_list, "Comma list of steps");
  dini_cmd->add_option("--tol", dini.tol, "Sandwich tolerance");

  DescendFlags descend;
  auto* descend_cmd = app.add_subcommand("descend", "Small-step descent on f");
  common.add_to(descend_cmd, true);
  descend_cmd->add_option("--theta0", descend.theta0, "Start as a comma list, or 'rand'");
  descend_cmd->add_option("--iters", descend.iters, "Maximum number of steps");
  descend_cmd->add_option("--s", descend.s, "Step constant");
  descend_cmd->add_option("--alpha0", descend.alpha0, "Schedule scale");
  descend_cmd->add_option("--schedule", descend.schedule, "harmonic | sqrt");
  descend_cmd->add_option("--grad-tol", descend.grad_tol, "Stop once ||u|| is below this");

  double cost_h = 1e-5;
  auto* cost = app.add_subcommand("cost", "Solver calls of ASM vs finite differences");
  common.add_to(cost, true);
  cost->add_option("--theta0,--theta", theta, "Parameter as a comma list, or 'rand'");
  cost->add_option("--h", cost_h, "Finite-difference step");

  try {
    std::vector<std::string> args = apply_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (list->parsed()) return cmd_list(list_json, out);
    if (common.q < 0) throw UsageError("--q must be positive");
    if (solve->parsed()) return cmd_solve(common, theta, out);
    if (grad->parsed()) return cmd_grad(common, theta, out);
    if (chainrule->parsed()) return cmd_chainrule(common, chain, out);
    if (dini_cmd->parsed()) return cmd_dini(common, dini, out);
    if (descend_cmd->parsed()) return cmd_descend(common, descend, out);
    if (cost->parsed()) return cmd_cost(common, theta, cost_h, out);
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const UncertifiedPoint& e) {
    err << "certification failure: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  err << "error: no command given\n";
  return kUsage;
}

}  // namespace vfgrad::cli
