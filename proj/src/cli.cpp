#include "plap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "plap/bifurcation.hpp"
#include "plap/errors.hpp"
#include "plap/profile.hpp"
#include "plap/solver.hpp"

namespace plap::cli {

using nlohmann::json;

namespace {

constexpr int kMaxN = 64;

std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

double get_number(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(std::string("missing \"") + key + "\"");
  if (!it->is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
  return it->get<double>();
}

int get_count(const json& obj, const char* key, int fallback, int min) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < min ||
      it->get<long long>() > std::numeric_limits<int>::max()) {
    throw ConfigError(std::string("\"") + key + "\" must be an integer >= " + std::to_string(min));
  }
  return it->get<int>();
}

NonlinearityParams parse_nonlinearity(const json& nl) {
  if (!nl.is_object()) throw ConfigError("\"nonlinearity\" must be an object");
  const auto kind = nl.value("kind", std::string{});
  if (kind == "power_asym") {
    PowerAsymParams pa;
    pa.b_plus = get_number(nl, "b_plus");
    pa.b_minus = get_number(nl, "b_minus");
    pa.r_exp = get_number(nl, "r_exp");
    if (!(pa.b_plus > 0 && pa.b_minus > 0)) throw ConfigError("b_plus and b_minus must be positive");
    return pa;
  }
  if (kind == "polynomial") {
    const auto it = nl.find("coeffs");
    if (it == nl.end() || !it->is_array() || it->empty()) {
      throw ConfigError("polynomial needs a non-empty \"coeffs\" array");
    }
    PolynomialParams pp;
    for (const auto& c : *it) {
      if (!c.is_number()) throw ConfigError("coeffs must be numbers");
      pp.coeffs.push_back(c.get<double>());
    }
    return pp;
  }
  throw ConfigError("nonlinearity kind must be \"power_asym\" or \"polynomial\"");
}

struct Options {
  std::string command;
  std::string config_path;
  std::string out_path;
  std::string format;
  int n = 8;
  int jmax = 4;
  std::string id;
  std::string cores;
};

std::vector<double> parse_cores(const std::string& text) {
  std::vector<double> v;
  if (text.empty()) return v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("--cores: cannot parse \"" + item + "\"");
    }
    if (used != item.size()) throw ConfigError("--cores: cannot parse \"" + item + "\"");
    v.push_back(x);
  }
  return v;
}

class Runner {
 public:
  Runner(Options opt, RunConfig cfg, std::ostream& out) : opt_(std::move(opt)), cfg_(std::move(cfg)), out_(out) {}

  int dispatch() {
    const auto& c = opt_.command;
    if (c == "validate") return validate();
    if (c == "diagram") return diagram();
    if (c == "structure") return structure_cmd();
    if (c == "solve") return solve();
    if (c == "profile") return profile_cmd();
    if (c == "verify") return verify_cmd();
    return regularity();
  }

 private:
  numerics::QuadratureOptions quad() const {
    numerics::QuadratureOptions q;
    q.rel_tol = cfg_.numerics.quad_tol;
    return q;
  }

  SolverOptions solver_opts() const {
    SolverOptions s;
    s.scan_points = cfg_.numerics.scan_points;
    return s;
  }

  Nonlinearity nonlinearity() const { return build_nonlinearity(cfg_.q, cfg_.nonlinearity); }

  Problem problem() const {
    if (!cfg_.lambda) throw ConfigError("command \"" + opt_.command + "\" needs \"lambda\"");
    return Problem(cfg_.p, nonlinearity(), *cfg_.lambda, quad());
  }

  bool csv() const { return opt_.format == "csv"; }

  void emit(const std::string& text) {
    if (opt_.out_path.empty()) {
      out_ << text;
      return;
    }
    write_file(opt_.out_path, text);
  }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open " + path + " for writing");
    f << text;
    if (!f) throw ConfigError("write to " + path + " failed");
  }

  void emit(const json& j) { emit(j.dump(2) + "\n"); }

  void require_json(const char* what) const {
    if (csv()) throw ConfigError(std::string(what) + " has no CSV form");
  }

  // The descriptor an id refers to, re-derived from the config.
  SolutionDescriptor lookup(const Problem& pr) const {
    if (opt_.id.empty()) throw ConfigError("--id is required");
    const auto cls = class_from_id(opt_.id);
    if (!cls) throw ConfigError("malformed descriptor id " + opt_.id);
    for (const auto& d : solve_class(pr, *cls, solver_opts())) {
      if (d.id() == opt_.id) return d;
    }
    throw ConfigError("unknown descriptor id " + opt_.id);
  }

  int validate() {
    require_json("validate");
    json j;
    HypothesisReport rep;
    try {
      rep = validate_hypotheses(Nonlinearity::unchecked(cfg_.q, cfg_.nonlinearity));
    } catch (const NoZeroFound& e) {
      j["pass"] = false;
      j["diagnostic"] = e.what();
      emit(j);
      return kHypothesis;
    }
    j["pass"] = rep.pass();
    j["zeros_ok"] = rep.zeros_ok;
    j["monotone_plus"] = rep.monotone_plus;
    j["monotone_minus"] = rep.monotone_minus;
    j["g_vanishes_at_zero"] = rep.g_vanishes_at_zero;
    j["limit_plus_negative"] = rep.limit_plus_negative;
    j["limit_minus_negative"] = rep.limit_minus_negative;
    j["limit_plus"] = num(rep.limit_plus);
    j["limit_minus"] = num(rep.limit_minus);
    j["g_near_zero_plus"] = num(rep.g_near_zero_plus);
    j["g_near_zero_minus"] = num(rep.g_near_zero_minus);
    j["violation_at"] = rep.violation_at ? num(*rep.violation_at) : json(nullptr);
    j["diagnostic"] = rep.diagnostic;
    emit(j);
    return rep.pass() ? kOk : kHypothesis;
  }

  int diagram() {
    if (opt_.n < 1 || opt_.n > kMaxN) throw ConfigError("--n must be in 1.." + std::to_string(kMaxN));
    const auto nl = nonlinearity();
    const auto tb = bifurcation_table(nl, cfg_.p, opt_.n, quad());
    const bool classical = !tb.lambda_classical.empty();
    const bool star = !tb.lambda_star_plus.empty();
    auto at = [](const std::vector<double>& v, int k) { return k < static_cast<int>(v.size()) ? v[k] : 0.0; };

    if (!csv()) {
      json j;
      j["p"] = cfg_.p;
      j["q"] = cfg_.q;
      j["regime"] = to_string(regime(cfg_.q, cfg_.p));
      j["z_hat"] = tb.levels.z_hat;
      j["s_hat"] = tb.levels.s_hat;
      json rows = json::array();
      for (int k = 0; k < tb.n; ++k) {
        json r;
        r["n"] = k + 1;
        r["lambda_tilde_plus"] = num(tb.lambda_tilde_plus[k]);
        r["lambda_tilde_minus"] = num(tb.lambda_tilde_minus[k]);
        r["lambda_star_plus"] = star ? num(tb.lambda_star_plus[k]) : json(nullptr);
        r["lambda_star_minus"] = star ? num(tb.lambda_star_minus[k]) : json(nullptr);
        if (classical) r["lambda_classical"] = num(tb.lambda_classical[k]);
        rows.push_back(r);
      }
      j["rows"] = rows;
      if (tb.minimizers) {
        const auto& m = *tb.minimizers;
        j["minimizers"] = {{"a_star", m.a_star}, {"b_star", m.b_star}, {"I_star", m.I_star},
                           {"J_star", m.J_star}, {"I_e", m.I_e},       {"I_o_plus", m.I_o_plus},
                           {"I_o_minus", m.I_o_minus}};
      }
      emit(j);
      return kOk;
    }

    std::string s = "n,lambda_tilde_plus,lambda_tilde_minus,lambda_star_plus,lambda_star_minus";
    if (classical) s += ",lambda_classical";
    s += "\n";
    for (int k = 0; k < tb.n; ++k) {
      s += std::to_string(k + 1) + "," + fmt17(tb.lambda_tilde_plus[k]) + "," + fmt17(tb.lambda_tilde_minus[k]) + ",";
      if (star) s += fmt17(at(tb.lambda_star_plus, k)) + "," + fmt17(at(tb.lambda_star_minus, k));
      else s += ",";
      if (classical) s += "," + fmt17(tb.lambda_classical[k]);
      s += "\n";
    }
    emit(s);
    return kOk;
  }

  int structure_cmd() {
    require_json("structure");
    if (opt_.n < 1 || opt_.n > kMaxN) throw ConfigError("--n must be in 1.." + std::to_string(kMaxN));
    const auto rep = structure(problem(), opt_.n);
    json j;
    j["lambda"] = rep.lambda;
    j["regime"] = to_string(rep.regime);
    json cls = json::array();
    for (const auto& c : rep.classes) {
      cls.push_back({{"class", c.cls.label()},
                     {"j", c.cls.j},
                     {"sign", c.cls.sign},
                     {"tag", to_string(c.tag)},
                     {"regular_count", c.regular_count},
                     {"flat_core", c.flat_core},
                     {"continuum_dim", c.continuum_dim}});
    }
    j["classes"] = cls;
    emit(j);
    return kOk;
  }

  static json descriptor_json(const SolutionDescriptor& d) {
    json j;
    j["id"] = d.id();
    j["class"] = d.cls.label();
    j["j"] = d.cls.j;
    j["sign"] = d.cls.sign;
    j["kind"] = to_string(d.kind);
    j["r"] = d.r;
    j["tau"] = num(d.tau);
    j["energy"] = d.level.energy;
    j["gap_plus"] = d.level.gap_plus;
    j["gap_minus"] = d.level.gap_minus;
    j["residual"] = d.residual;
    j["degenerate"] = d.degenerate;
    if (d.kind == DescriptorKind::flat_core) {
      j["core_budget"] = d.core_budget;
      j["core_count"] = d.core_count;
      j["core_side"] = to_string(d.core_side);
      j["continuum_dim"] = d.continuum_dim;
    }
    return j;
  }

  int solve() {
    if (opt_.jmax < 1 || opt_.jmax > kMaxN) throw ConfigError("--jmax must be in 1.." + std::to_string(kMaxN));
    const auto pr = problem();
    const auto en = enumerate(pr, opt_.jmax, solver_opts());
    if (csv()) {
      std::string s = "id,class,kind,r,residual,degenerate,core_budget\n";
      for (const auto& d : en.solutions) {
        s += d.id() + "," + d.cls.label() + "," + to_string(d.kind) + "," + fmt17(d.r) + "," +
             fmt17(d.residual) + "," + (d.degenerate ? "1" : "0") + "," + fmt17(d.core_budget) + "\n";
      }
      emit(s);
      return kOk;
    }
    json j;
    j["lambda"] = pr.lambda;
    j["p"] = pr.p;
    j["q"] = pr.nl.q();
    j["trivial"] = en.trivial;
    json arr = json::array();
    for (const auto& d : en.solutions) arr.push_back(descriptor_json(d));
    j["descriptors"] = arr;
    emit(j);
    return kOk;
  }

  static json meta_json(const SolutionDescriptor& d, const Profile& prof, const std::vector<double>& cores) {
    json j;
    j["id"] = d.id();
    j["points"] = prof.x.size();
    json fl = json::array();
    for (const auto& [a, b] : prof.flat_intervals) fl.push_back({a, b});
    j["flat_intervals"] = fl;
    j["nodes"] = prof.nodes;
    j["core_lengths"] = cores;
    return j;
  }

  int profile_cmd() {
    const auto pr = problem();
    const auto d = lookup(pr);
    const auto cores = parse_cores(opt_.cores);
    const Profile prof = reconstruct(pr, d, cfg_.numerics.grid, cores);
    json meta = meta_json(d, prof, cores);
    if (!csv()) {
      meta["x"] = prof.x;
      meta["phi"] = prof.phi;
      meta["dphi"] = prof.dphi;
      emit(meta);
      return kOk;
    }
    std::string s = "x,phi,dphi\n";
    for (std::size_t i = 0; i < prof.x.size(); ++i) {
      s += fmt17(prof.x[i]) + "," + fmt17(prof.phi[i]) + "," + fmt17(prof.dphi[i]) + "\n";
    }
    emit(s);
    if (!opt_.out_path.empty()) write_file(opt_.out_path + ".json", meta.dump(2) + "\n");
    return kOk;
  }

  int verify_cmd() {
    require_json("verify");
    const auto pr = problem();
    const auto d = lookup(pr);
    const auto rep = verify(pr, d, cfg_.numerics.grid, cfg_.numerics.ode_steps);
    json j;
    j["id"] = d.id();
    j["pass"] = rep.pass;
    j["matching_residual"] = rep.matching_residual;
    j["length_error"] = rep.length_error;
    j["energy_residual"] = rep.energy_residual;
    j["oracle_sup_diff"] = rep.oracle_sup_diff;
    j["oracle_until"] = rep.oracle_until;
    j["tolerances"] = {{"residual", kResidualTol}, {"energy", kEnergyTol}, {"oracle", kOracleTol}};
    j["detail"] = rep.detail;
    emit(j);
    return rep.pass ? kOk : kVerification;
  }

  int regularity() {
    require_json("regularity");
    const auto pr = problem();
    const auto d = lookup(pr);
    const auto prof = reconstruct(pr, d, cfg_.numerics.grid, parse_cores(opt_.cores));
    const auto rep = classify_regularity(pr, prof);
    json j;
    j["id"] = d.id();
    j["smoothness"] = to_string(rep.smoothness);
    j["boundary_case"] = rep.boundary_case;
    json pts = json::array();
    for (const auto& cp : rep.points) {
      pts.push_back({{"chi", cp.chi},
                     {"value", cp.value},
                     {"h_value", cp.h_value},
                     {"plateau_end", cp.plateau_end},
                     {"in_z", cp.in_z},
                     {"zero_order", cp.zero_order},
                     {"c2", cp.c2},
                     {"boundary_case", cp.boundary_case},
                     {"deltas", cp.deltas},
                     {"ratios", cp.ratios},
                     {"second_derivative", cp.second_derivative},
                     {"predicted_limit", num(cp.predicted_limit)},
                     {"energy_limit", num(cp.energy_limit)},
                     {"measured_limit", num(cp.measured_limit)}});
    }
    j["points"] = pts;
    emit(j);
    return kOk;
  }

  Options opt_;
  RunConfig cfg_;
  std::ostream& out_;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig cfg;
  cfg.p = get_number(j, "p");
  cfg.q = get_number(j, "q");
  if (!(cfg.p > 1.0)) throw ConfigError("p must exceed 1");
  if (!(cfg.q > 1.0)) throw ConfigError("q must exceed 1");
  if (j.contains("lambda")) {
    cfg.lambda = get_number(j, "lambda");
    if (!(*cfg.lambda > 0.0) || !std::isfinite(*cfg.lambda)) throw ConfigError("lambda must be positive");
  }
  if (!j.contains("nonlinearity")) throw ConfigError("missing \"nonlinearity\"");
  cfg.nonlinearity = parse_nonlinearity(j["nonlinearity"]);

  if (j.contains("numerics")) {
    const auto& nj = j["numerics"];
    if (!nj.is_object()) throw ConfigError("\"numerics\" must be an object");
    if (nj.contains("quad_tol")) {
      cfg.numerics.quad_tol = get_number(nj, "quad_tol");
      if (!(cfg.numerics.quad_tol > 0.0)) throw ConfigError("quad_tol must be positive");
    }
    cfg.numerics.scan_points = get_count(nj, "scan_points", cfg.numerics.scan_points, 16);
    cfg.numerics.grid = get_count(nj, "grid", cfg.numerics.grid, 16);
    cfg.numerics.ode_steps = get_count(nj, "ode_steps", cfg.numerics.ode_steps, 100);
  }
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria of the one-dimensional p-Laplacian eigenvalue problem", "plap"};
  Options opt;
  app.add_option("command", opt.command, "validate | diagram | structure | solve | profile | verify | regularity")
      ->required()
      ->check(CLI::IsMember({"validate", "diagram", "structure", "solve", "profile", "verify", "regularity"}));
  app.add_option("--config", opt.config_path, "problem JSON")->required();
  app.add_option("--out", opt.out_path, "output file (default: stdout)");
  app.add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--n", opt.n, "number of thresholds / classes (<= 64)");
  app.add_option("--jmax", opt.jmax, "largest class index for solve");
  app.add_option("--id", opt.id, "descriptor id from solve");
  app.add_option("--cores", opt.cores, "plateau lengths a1,a2,... for flat-core continua");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (opt.format.empty()) opt.format = opt.command == "diagram" ? "csv" : "json";

  try {
    RunConfig cfg = parse_config(read_file(opt.config_path));
    Runner runner(std::move(opt), std::move(cfg), out);
    return runner.dispatch();
  } catch (const HypothesisViolated& e) {
    err << "hypothesis violated: " << e.what() << "\n";
    return kHypothesis;
  } catch (const NoZeroFound& e) {
    err << "hypothesis violated: " << e.what() << "\n";
    return kHypothesis;
  } catch (const BudgetMismatch& e) {
    err << "BudgetMismatch: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ShapeError& e) {
    err << "ShapeError: " << e.what() << "\n";
    return kVerification;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace plap::cli
