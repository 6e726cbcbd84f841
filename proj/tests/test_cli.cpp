#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "rootlap/cli_run.hpp"
#include "rootlap/domain_spec.hpp"

namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  std::vector<const char*> argv;
  argv.push_back("rootlap");
  for (auto& a : args) argv.push_back(a.c_str());
  return rootlap::run_cli(static_cast<int>(argv.size()), argv.data());
}

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name) : path(fs::temp_directory_path() / name) {}
  ~TempFile() {
    std::error_code ec;
    fs::remove(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string read() const {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  void write(const std::string& text) const {
    std::ofstream out(path, std::ios::binary);
    out << text;
  }
};

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

}  // namespace

TEST_CASE("spectrum: csv header, exit 0, small closed-form sanity") {
  TempFile out("rootlap_t_spectrum.csv");
  int rc = run({"spectrum", "--domain", "interval", "--grid", "40", "--modes", "3",
                "--output", out.str()});
  CHECK(rc == 0);
  std::string text = out.read();
  CHECK(first_line(text) == "k,lambda,radical,residual");
  // Header plus three mode rows.
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("json output carries config, results and assertions") {
  TempFile out("rootlap_t_spectrum.json");
  int rc = run({"spectrum", "--grid", "30", "--modes", "2", "--format", "json",
                "--output", out.str()});
  CHECK(rc == 0);
  auto doc = nlohmann::json::parse(out.read());
  REQUIRE(doc.contains("config"));
  REQUIRE(doc.contains("results"));
  REQUIRE(doc.contains("assertions"));
  CHECK(doc["config"]["subcommand"] == "spectrum");
  CHECK(doc["config"]["domain"]["grid"][0] == 30);
  CHECK(doc["results"]["modes"].size() == 2);
  bool all_ok = true;
  for (auto& a : doc["assertions"]) all_ok = all_ok && a["ok"].get<bool>();
  CHECK(all_ok);
}

TEST_CASE("repeated runs are byte-identical; the seed changes random output") {
  std::vector<std::string> args = {"green", "--grid", "60", "--modes", "10", "--pairs",
                                   "3",     "--seed", "5"};
  TempFile a("rootlap_t_det_a.csv"), b("rootlap_t_det_b.csv"), c("rootlap_t_det_c.csv");
  auto with_out = [&](const TempFile& f) {
    auto v = args;
    v.push_back("--output");
    v.push_back(f.str());
    return v;
  };
  CHECK(run(with_out(a)) == 0);
  CHECK(run(with_out(b)) == 0);
  CHECK(a.read() == b.read());
  CHECK(!a.read().empty());
  auto other = with_out(c);
  other[8] = "6";  // --seed value
  CHECK(run(other) == 0);
  CHECK(a.read() != c.read());
}

TEST_CASE("failed assertion exits 1: impossible green tolerance") {
  TempFile out("rootlap_t_green_fail.csv");
  int rc = run({"green", "--grid", "50", "--modes", "8", "--pairs", "2", "--tolerance",
                "1e-30", "--output", out.str()});
  CHECK(rc == 1);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({"spectrum", "--bogus-flag"}) == 2);
  CHECK(run({}) == 2);                                      // subcommand required
  CHECK(run({"spectrum", "--domain", "triangle"}) == 2);    // rejected by build_domain
  CHECK(run({"spectrum", "--grid", "40", "--modes", "99"}) == 2);  // modes > grid
  CHECK(run({"rayleigh", "--grid", "30", "--init", "x +"}) == 2);  // parse error
  CHECK(run({"weyl", "--closed-form", "hexagon"}) == 2);
}

TEST_CASE("weyl closed-form run reports the interval law") {
  TempFile out("rootlap_t_weyl.json");
  int rc = run({"weyl", "--closed-form", "interval-dirichlet", "--length", "1", "--modes",
                "200", "--level", "100", "--fit-lo", "20", "--fit-hi", "180", "--format",
                "json", "--output", out.str()});
  CHECK(rc == 0);
  auto doc = nlohmann::json::parse(out.read());
  double expo = doc["results"]["exponent"].get<double>();
  double cons = doc["results"]["constant"].get<double>();
  CHECK(std::abs(expo - 0.5) <= 1e-9);
  CHECK(oracle::rel_err(cons, 1.0 / oracle::kPi) <= 1e-9);
  // N(100): modes with (pi k)^2 <= 100, i.e. k <= 10/pi: 3 of them.
  CHECK(doc["results"]["count_lambda_at_100"].get<double>() == 3.0);
}

TEST_CASE("heat run: csv snapshot table with non-increasing norm") {
  TempFile out("rootlap_t_heat.csv");
  int rc = run({"heat", "--grid", "50", "--modes", "5", "--mode", "1", "--time", "0",
                "--time", "0.2", "--output", out.str()});
  CHECK(rc == 0);
  CHECK(first_line(out.read()) == "t,x,y,u");
}

TEST_CASE("wave run: energy drift assertion passes") {
  TempFile out("rootlap_t_wave.json");
  int rc = run({"wave", "--grid", "50", "--modes", "5", "--init", "sin(pi*x)", "--time",
                "1.0", "--format", "json", "--output", out.str()});
  CHECK(rc == 0);
  auto doc = nlohmann::json::parse(out.read());
  bool found = false;
  for (auto& a : doc["assertions"])
    if (a["name"] == "energy_drift_rel") {
      found = true;
      CHECK(a["ok"].get<bool>());
    }
  CHECK(found);
}

TEST_CASE("rayleigh run: quotient above lambda_1 with an expression field") {
  TempFile out("rootlap_t_rayleigh.json");
  int rc = run({"rayleigh", "--grid", "200", "--init", "x*(1-x)", "--format", "json",
                "--output", out.str()});
  CHECK(rc == 0);
  auto doc = nlohmann::json::parse(out.read());
  double q = doc["results"]["quotient"].get<double>();
  double l1 = doc["results"]["lambda1"].get<double>();
  CHECK(q >= l1);
  CHECK(std::abs(q - 10.0) <= 0.01);
}

TEST_CASE("bracket run: all rows hold on the standard split") {
  TempFile out("rootlap_t_bracket.csv");
  int rc = run({"bracket", "--domain", "interval", "--length", "2", "--grid", "99",
                "--cut", "1", "--cut-kind", "neumann", "--kmax", "6", "--output",
                out.str()});
  CHECK(rc == 0);
  std::string text = out.read();
  CHECK(first_line(text) == "k,lambda,bound,holds");
  CHECK(text.find(",0\n") == std::string::npos);  // no failed holds column
}

TEST_CASE("nodal run with tone check") {
  TempFile out("rootlap_t_nodal.json");
  // Grid 401: the zero of mode 2 at x = 1/2 falls exactly on a lattice node,
  // so the half-interval tone matches lambda_2 to round-off.
  int rc = run({"nodal", "--grid", "401", "--modes", "6", "--tone-k", "2", "--format",
                "json", "--output", out.str()});
  CHECK(rc == 0);
  auto doc = nlohmann::json::parse(out.read());
  CHECK(doc["results"]["tone"]["rel_err"].get<double>() <= 5e-3);
}

TEST_CASE("diffgeo run: all four checks pass on the metric interval") {
  TempFile out("rootlap_t_diffgeo.csv");
  int rc = run({"diffgeo", "--grid", "500", "--metric", "exp2x", "--output", out.str()});
  CHECK(rc == 0);
  std::string text = out.read();
  CHECK(first_line(text) == "check,value,bound,ok");
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("spec file wins over inline flags") {
  TempFile spec("rootlap_t_spec.json");
  spec.write(R"({"kind": "interval", "lengths": [1.0], "grid": [60]})");
  TempFile out("rootlap_t_spec_out.json");
  int rc = run({"spectrum", "--grid", "50", "--spec", spec.str(), "--modes", "2",
                "--format", "json", "--output", out.str()});
  CHECK(rc == 0);
  auto doc = nlohmann::json::parse(out.read());
  CHECK(doc["config"]["domain"]["grid"][0] == 60);
}

TEST_CASE("parse_domain_spec: full document with metric samples and mask") {
  auto spec = rootlap::parse_domain_spec(R"({
    "kind": "interval", "lengths": [2.0], "grid": [5],
    "bc": ["neumann", "neumann"],
    "metric": {"g": [1,1,1,1,1], "dg": [0,0,0,0,0]}
  })");
  CHECK(spec.kind == "interval");
  CHECK(spec.metric == "sampled");
  CHECK(spec.metric_g.size() == 5);
  auto dom = rootlap::build_domain(spec);
  CHECK(dom->n_active == 5);

  auto masked = rootlap::parse_domain_spec(R"({
    "kind": "masked-grid", "lengths": [1.0, 1.0], "grid": [3, 3],
    "mask": [[0,1,0],[1,1,1],[0,1,0]]
  })");
  CHECK(rootlap::build_domain(masked)->n_active == 5);
}

TEST_CASE("parse_domain_spec: shape errors name the field") {
  CHECK_THROWS_AS(rootlap::parse_domain_spec("not json"), std::invalid_argument);
  CHECK_THROWS_AS(rootlap::parse_domain_spec(R"({"lengths": [1.0], "grid": [5]})"),
                  std::invalid_argument);  // kind missing
  CHECK_THROWS_AS(rootlap::parse_domain_spec(R"({"kind": "interval", "grid": [5]})"),
                  std::invalid_argument);  // lengths missing
  CHECK_THROWS_AS(
      rootlap::parse_domain_spec(R"({"kind": "interval", "lengths": [1.0], "grid": [5], "bc": [3]})"),
      std::invalid_argument);  // bc entries must be strings
  CHECK_THROWS_AS(rootlap::load_domain_spec("/nonexistent/rootlap_spec.json"),
                  std::invalid_argument);
}
