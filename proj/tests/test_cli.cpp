#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "plap/bifurcation.hpp"
#include "plap/cli.hpp"
#include "plap/errors.hpp"
#include "plap/solver.hpp"

using namespace plap;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("plap_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string power_config(double p, double q, double bp, double bm, double r, double lambda = -1) {
  json j = {{"p", p}, {"q", q}, {"nonlinearity", {{"kind", "power_asym"}, {"b_plus", bp}, {"b_minus", bm}, {"r_exp", r}}}};
  if (lambda > 0) j["lambda"] = lambda;
  return j.dump();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = cli::parse_config(
      R"({"p": 3, "q": 2, "lambda": 5, "nonlinearity": {"kind": "polynomial", "coeffs": [0, 0, 1]},
          "numerics": {"quad_tol": 1e-9, "scan_points": 512, "grid": 300, "ode_steps": 5000}})");
  CHECK(cfg.p == 3.0);
  CHECK(*cfg.lambda == 5.0);
  CHECK(std::get<PolynomialParams>(cfg.nonlinearity).coeffs.size() == 3);
  CHECK(cfg.numerics.quad_tol == 1e-9);
  CHECK(cfg.numerics.scan_points == 512);
  CHECK(cfg.numerics.grid == 300);
  CHECK(cfg.numerics.ode_steps == 5000);

  const auto dflt = cli::parse_config(power_config(2, 2, 1, 1, 4));
  CHECK_FALSE(dflt.lambda.has_value());
  CHECK(dflt.numerics.quad_tol == 1e-10);
  CHECK(dflt.numerics.scan_points == 1024);
  CHECK(dflt.numerics.grid == 2048);
  CHECK(dflt.numerics.ode_steps == 100000);

  CHECK_THROWS_AS(cli::parse_config("{\"p\": 2,"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"p": 2, "q": 2})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"p": 1, "q": 2, "nonlinearity": {"kind": "polynomial", "coeffs": [1]}})"),
                  ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"p": 2, "q": 2, "nonlinearity": {"kind": "exp"}})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"p": 2, "q": 2, "nonlinearity": {"kind": "power_asym", "b_plus": 1}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      cli::parse_config(R"({"p": 2, "q": 2, "nonlinearity": {"kind": "polynomial", "coeffs": [0, 0, 1]},
                            "numerics": {"quad_tol": -1}})"),
      ConfigError);
  CHECK_THROWS_AS(
      cli::parse_config(R"({"p": 2, "q": 2, "nonlinearity": {"kind": "polynomial", "coeffs": [0, 0, 1]},
                            "numerics": {"grid": 2.5}})"),
      ConfigError);
}

TEST_CASE("validate exit codes") {
  TempDir dir;
  const auto ok = call({"validate", "--config", dir.write("ok.json", power_config(2, 2, 1, 1, 4))});
  CHECK(ok.code == cli::kOk);
  CHECK(json::parse(ok.out)["pass"] == true);

  const auto low = call({"validate", "--config", dir.write("low.json", power_config(2, 2, 1, 1, 1.5))});
  CHECK(low.code == cli::kHypothesis);
  const auto rep = json::parse(low.out);
  CHECK(rep["pass"] == false);
  CHECK(rep["violation_at"].is_number());

  CHECK(call({"validate", "--config", dir.write("bad.json", "{\"p\": 2,")}).code == cli::kUsage);
  CHECK(call({"validate", "--config", dir.file("missing.json")}).code == cli::kUsage);
  // Hypothesis failures surface as exit 2 in the other commands too.
  CHECK(call({"diagram", "--config", dir.file("low.json")}).code == cli::kHypothesis);
}

TEST_CASE("usage errors") {
  TempDir dir;
  const auto cfg = dir.write("c.json", power_config(2, 2, 1, 1, 4, 2 * kPi2));
  CHECK(call({}).code == cli::kUsage);
  CHECK(call({"plot", "--config", cfg}).code == cli::kUsage);
  CHECK(call({"solve"}).code == cli::kUsage);
  CHECK(call({"diagram", "--config", cfg, "--format", "xml"}).code == cli::kUsage);
  CHECK(call({"diagram", "--config", cfg, "--n", "65"}).code == cli::kUsage);
  CHECK(call({"diagram", "--config", cfg, "--n", "0"}).code == cli::kUsage);
  CHECK(call({"diagram", "--config", cfg, "--n", "64"}).code == cli::kOk);
  CHECK(call({"verify", "--config", cfg, "--id", "S1+-regular-0000000000000000"}).code == cli::kUsage);
  CHECK(call({"verify", "--config", cfg, "--id", "nonsense"}).code == cli::kUsage);
  CHECK(call({"verify", "--config", cfg}).code == cli::kUsage);
  CHECK(call({"solve", "--config", dir.write("nol.json", power_config(2, 2, 1, 1, 4))}).code == cli::kUsage);
  CHECK(call({"verify", "--config", cfg, "--format", "csv", "--id", "x"}).code == cli::kUsage);
  const auto help = call({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("--config") != std::string::npos);
}

TEST_CASE("diagram CSV") {
  TempDir dir;
  SUBCASE("p = 2: tilde columns are inf, classical column present") {
    const auto r = call({"diagram", "--config", dir.write("a.json", power_config(2, 2, 1, 1, 4)), "--n", "4"});
    REQUIRE(r.code == cli::kOk);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"n", "lambda_tilde_plus", "lambda_tilde_minus", "lambda_star_plus",
                                              "lambda_star_minus", "lambda_classical"});
    for (int k = 1; k <= 4; ++k) {
      CHECK(rows[k][0] == std::to_string(k));
      CHECK(rows[k][1] == "inf");
      CHECK(rows[k][2] == "inf");
      CHECK(rows[k][3].empty());
      CHECK(std::stod(rows[k][5]) == doctest::Approx(k * k * kPi2).epsilon(1e-12));
    }
  }
  SUBCASE("q < p: no star values, no classical column") {
    const auto r = call({"diagram", "--config", dir.write("b.json", power_config(3, 2, 1, 1, 4)), "--n", "3"});
    REQUIRE(r.code == cli::kOk);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].size() == 5);
    for (int k = 1; k <= 3; ++k) {
      CHECK(std::isfinite(std::stod(rows[k][1])));
      CHECK(rows[k][3].empty());
      CHECK(rows[k][4].empty());
    }
  }
  SUBCASE("q > p: 17 digits round-trip the library values") {
    const auto r = call({"diagram", "--config", dir.write("c.json", power_config(3, 4, 1, 1, 6)), "--n", "3"});
    REQUIRE(r.code == cli::kOk);
    const auto rows = csv_rows(r.out);
    const auto tb = bifurcation_table(build_nonlinearity(4, PowerAsymParams{1, 1, 6}), 3, 3);
    for (int k = 1; k <= 3; ++k) {
      CHECK(std::stod(rows[k][1]) == tb.lambda_tilde_plus[k - 1]);
      CHECK(std::stod(rows[k][3]) == tb.lambda_star_plus[k - 1]);
      CHECK(std::stod(rows[k][4]) == tb.lambda_star_minus[k - 1]);
    }
  }
  SUBCASE("json form") {
    const auto r =
        call({"diagram", "--config", dir.write("d.json", power_config(2, 2, 1, 1, 4)), "--n", "2", "--format", "json"});
    REQUIRE(r.code == cli::kOk);
    const auto j = json::parse(r.out);
    CHECK(j["rows"].size() == 2);
    CHECK(j["rows"][0]["lambda_tilde_plus"] == "inf");
    CHECK(j["regime"] == "q=p");
  }
}

TEST_CASE("Chafee-Infante pipeline: solve, verify, profile") {
  TempDir dir;
  const auto cfg = dir.write("ci.json", power_config(2, 2, 1, 1, 4, 2 * kPi2));
  const auto solved = call({"solve", "--config", cfg, "--jmax", "3"});
  REQUIRE(solved.code == cli::kOk);
  const auto j = json::parse(solved.out);
  CHECK(j["trivial"] == true);
  REQUIRE(j["descriptors"].size() == 2);

  for (const auto& d : j["descriptors"]) {
    const std::string id = d["id"];
    const auto v = call({"verify", "--config", cfg, "--id", id});
    CHECK(v.code == cli::kOk);
    const auto rep = json::parse(v.out);
    CHECK(rep["pass"] == true);
    CHECK(rep["oracle_sup_diff"].get<double>() < 1e-6);
    CHECK(rep["energy_residual"].get<double>() < 1e-8);

    const auto out = dir.file("prof.csv");
    const auto prof = call({"profile", "--config", cfg, "--id", id, "--format", "csv", "--out", out});
    REQUIRE(prof.code == cli::kOk);
    CHECK(prof.out.empty());
    const auto rows = csv_rows(slurp(out));
    REQUIRE(rows.size() == 2049);
    CHECK(rows[0] == std::vector<std::string>{"x", "phi", "dphi"});
    CHECK(std::stod(rows[1][0]) == 0.0);
    CHECK(std::stod(rows[2048][0]) == 1.0);
    CHECK(std::abs(std::stod(rows[1][2])) == doctest::Approx(d["r"].get<double>()).epsilon(1e-12));
    const auto meta = json::parse(slurp(out + ".json"));
    CHECK(meta["id"] == id);
    CHECK(meta["nodes"].empty());
    CHECK(meta["flat_intervals"].empty());
  }
}

TEST_CASE("grid override and regularity output") {
  TempDir dir;
  json c = json::parse(power_config(3, 2, 1, 1, 4, 50.0));
  c["numerics"] = {{"grid", 300}};
  const auto cfg = dir.write("r.json", c.dump());
  const auto sols = json::parse(call({"solve", "--config", cfg, "--jmax", "1"}).out)["descriptors"];
  REQUIRE(sols.size() == 2);
  const std::string id = sols[0]["id"];
  const auto prof = json::parse(call({"profile", "--config", cfg, "--id", id}).out);
  CHECK(prof["x"].size() == 300);
  CHECK(prof["phi"].size() == 300);

  const auto reg = call({"regularity", "--config", cfg, "--id", id});
  REQUIRE(reg.code == cli::kOk);
  const auto rj = json::parse(reg.out);
  CHECK(rj["smoothness"].is_string());
  REQUIRE(rj["points"].size() == 1);
  const auto& pt = rj["points"][0];
  CHECK(pt["chi"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(pt["measured_limit"].get<double>() == doctest::Approx(pt["energy_limit"].get<double>()).epsilon(1e-3));
}

TEST_CASE("flat-core plateau lengths") {
  const auto nl = build_nonlinearity(3, PowerAsymParams{1, 1, 6});
  const double lambda = 2.0 * lambda_tilde(nl, 3, {2, +1});
  TempDir dir;
  const auto cfg = dir.write("fc.json", power_config(3, 3, 1, 1, 6, lambda));
  const auto sols = json::parse(call({"solve", "--config", cfg, "--jmax", "2"}).out)["descriptors"];
  const json* s2 = nullptr;
  for (const auto& d : sols) {
    if (d["class"] == "S2+") s2 = &d;
  }
  REQUIRE(s2 != nullptr);
  CHECK((*s2)["kind"] == "flat_core");
  CHECK((*s2)["continuum_dim"] == 1);
  const std::string id = (*s2)["id"];
  const double budget = (*s2)["core_budget"];

  std::ostringstream cores;
  cores.precision(17);
  cores << 0.3 * budget << "," << budget - 0.3 * budget;
  const auto ok = call({"profile", "--config", cfg, "--id", id, "--cores", cores.str()});
  REQUIRE(ok.code == cli::kOk);
  const auto meta = json::parse(ok.out);
  REQUIRE(meta["flat_intervals"].size() == 2);
  const double w0 = meta["flat_intervals"][0][1].get<double>() - meta["flat_intervals"][0][0].get<double>();
  CHECK(w0 == doctest::Approx(0.3 * budget).epsilon(1e-12));

  const auto wrong = call({"profile", "--config", cfg, "--id", id, "--cores", "0.01,0.01"});
  CHECK(wrong.code == cli::kUsage);
  CHECK(wrong.err.find("BudgetMismatch") != std::string::npos);
  CHECK(call({"profile", "--config", cfg, "--id", id, "--cores", "a,b"}).code == cli::kUsage);
  CHECK(call({"verify", "--config", cfg, "--id", id}).code == cli::kOk);
}

TEST_CASE("identical configs give byte-identical output") {
  TempDir dir;
  const auto cfg = dir.write("d.json", power_config(3, 2, 2, 1, 4, 40.0));
  for (const auto& cmd : std::vector<std::vector<std::string>>{
           {"solve", "--config", cfg, "--jmax", "3"},
           {"structure", "--config", cfg, "--n", "4"},
           {"diagram", "--config", cfg, "--n", "5"},
       }) {
    const auto a = call(cmd);
    const auto b = call(cmd);
    REQUIRE(a.code == cli::kOk);
    CHECK(a.out == b.out);
  }
  const auto ids = json::parse(call({"solve", "--config", cfg, "--jmax", "2"}).out)["descriptors"];
  REQUIRE_FALSE(ids.empty());
  const std::string id = ids[0]["id"];
  const auto p1 = call({"profile", "--config", cfg, "--id", id, "--format", "csv"});
  const auto p2 = call({"profile", "--config", cfg, "--id", id, "--format", "csv"});
  CHECK(p1.out == p2.out);
  CHECK(p1.out.size() > 1000);
}

TEST_CASE("structure report") {
  TempDir dir;
  const auto r = call({"structure", "--config", dir.write("s.json", power_config(2, 2, 1, 1, 4, 2 * kPi2)), "--n", "2"});
  REQUIRE(r.code == cli::kOk);
  const auto j = json::parse(r.out);
  CHECK(j["regime"] == "q=p");
  REQUIRE(j["classes"].size() == 4);
  CHECK(j["classes"][0]["class"] == "S1+");
  CHECK(j["classes"][0]["tag"] == "single");
  CHECK(j["classes"][2]["tag"] == "empty");
}
