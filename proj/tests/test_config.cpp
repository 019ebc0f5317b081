#include "collar/config.hpp"
#include "collar/report.hpp"

#include <doctest.h>

#include <charconv>
#include <cmath>
#include <string>

using namespace collar;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty text yields the documented defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.theory == Theory::verify_all);
  CHECK(c.seed == 20240611);
  CHECK(c.grid.sizes == std::vector<int>{32});
  CHECK(c.collar.dt == 0.01);
  CHECK(c.collar.steps == 100);
  CHECK(c.tolerances == default_tolerances());
}

TEST_CASE("theory names") {
  for (Theory t : {Theory::pca_demo, Theory::scalar, Theory::psigma, Theory::yangmills, Theory::verify_all})
    CHECK(theory_from_string(to_string(t)) == t);
  CHECK_THROWS_AS(theory_from_string("maxwell"), ConfigError);
}

TEST_CASE("a full configuration parses") {
  const RunConfig c = parse_config(R"(theory = "scalar"
seed = 7
[grid]
sizes = [16, 8]
spacing = [0.0625, 0.125]
metric = [[1.0, 0.0], [0.0, 4.0]]
shift = [0.1, 0.0]
[collar]
epsilon = 0.5
dt = 0.01
steps = 50
[scalar]
potential = "mass"
mass2 = 0.25
[tolerances]
rank = 1e-9
)");
  CHECK(c.theory == Theory::scalar);
  CHECK(c.seed == 7);
  CHECK(c.grid.sizes == std::vector<int>{16, 8});
  CHECK(c.scalar.mass2 == 0.25);
  CHECK(c.tolerances.at("rank") == 1e-9);
  CHECK(c.tolerances.at("noether") == default_tolerances().at("noether"));
  const LatticeGrid g = LatticeGrid::build(grid_description(c.grid));
  CHECK(g.sqrt_det_metric(0) == doctest::Approx(2.0));
  CHECK(g.shift(3)[0] == 0.1);
}

TEST_CASE("default spacing is 1/N per axis") {
  GridConfig gc;
  gc.sizes = {8, 5};
  const GridDescription d = grid_description(gc);
  CHECK(d.spacing == std::vector<double>{0.125, 0.2});
}

TEST_CASE("echo is a fixpoint of parse") {
  const RunConfig c = parse_config(R"(theory = "yangmills"
[grid]
sizes = [6, 6]
[yangmills]
algebra = "u1"
a0 = "constant"
a0_value = [0.3]
census = true
[psigma]
poisson = "constant"
constant = [[0.0, 2.0], [-2.0, 0.0]]
beta = [0.5, 0.0]
[tolerances]
symplecticity = 3e-7
)");
  const std::string once = echo_config(c);
  const std::string twice = echo_config(parse_config(once));
  CHECK(once == twice);
  const RunConfig back = parse_config(once);
  CHECK(back.tolerances.at("symplecticity") == 3e-7);
  CHECK(back.yangmills.a0_value == std::vector<double>{0.3});
  CHECK(echo_config(parse_config("")) == echo_config(parse_config(echo_config(parse_config("")))));
}

TEST_CASE("unknown keys are rejected with their line") {
  const std::string e = error_of("seed = 1\n[collar]\ndt = 0.01\nfoo = 2\n");
  CHECK(e.find("line 4") != std::string::npos);
  CHECK(e.find("foo") != std::string::npos);
  CHECK(error_of("[nonsense]\nx = 1\n").find("line 1") != std::string::npos);
  CHECK(error_of("[tolerances]\nmystery = 1.0\n").find("mystery") != std::string::npos);
}

TEST_CASE("invalid values are rejected with their line") {
  CHECK(error_of("[collar]\n\ndt = -0.1\n").find("line 3") != std::string::npos);
  CHECK(error_of("theory = 'scalar'\n[collar]\nepsilon = 0.5\ndt = 0.01\nsteps = 100\n").find("exceeds") != std::string::npos);
  CHECK(error_of("[collar]\nsteps = 0\n").find("steps") != std::string::npos);
  CHECK(error_of("[scalar]\nmass2 = -1.0\n").find("line 2") != std::string::npos);
  CHECK(error_of("[grid]\nsizes = [1]\n").find("grid") != std::string::npos);
  CHECK(error_of("[collar]\ndt = \"fast\"\n").find("number") != std::string::npos);
  CHECK(error_of("theory = \"qcd\"\n").find("qcd") != std::string::npos);
  CHECK(error_of("[tolerances]\nrank = -1.0\n").find("positive") != std::string::npos);
  CHECK(error_of("[yangmills]\na0 = \"constant\"\n").find("a0_value") != std::string::npos);
  CHECK(error_of("seed = -3\n").find("seed") != std::string::npos);
}

TEST_CASE("syntax errors carry a line number") {
  CHECK(error_of("seed = 1\n[collar\n").find("line 2") != std::string::npos);
}

TEST_CASE("a missing file is an i/o failure") {
  CHECK_THROWS_AS(load_config("/nonexistent/collar.toml"), std::ios_base::failure);
}

TEST_CASE("CSV quoting and numbers") {
  CHECK(CsvTable::quote("plain") == "plain");
  CHECK(CsvTable::quote("a,b") == "\"a,b\"");
  CHECK(CsvTable::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(CsvTable::quote("two\nlines") == "\"two\nlines\"");
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) {
    const std::string s = CsvTable::number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CsvTable t({"t", "note"});
  t.add_row(std::vector<double>{0.5, 1.0});
  t.add_row(std::vector<std::string>{"1", "x,y"});
  CHECK(t.str() == "t,note\r\n0.5,1\r\n1,\"x,y\"\r\n");
}

TEST_CASE("report JSON has a fixed key order and no clock") {
  RunReport r;
  r.command = "pca";
  r.config_echo = "seed = 1\n";
  r.add({"a", 1.0, 2.0, true});
  r.add({"b", 3.0, 2.0, false});
  CHECK_FALSE(r.pass());
  const Json j = report_to_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"version", "command", "pass", "config", "checks", "details", "series", "warnings"});
  CHECK(j["checks"][1]["name"] == "b");
  CHECK(j["pass"] == false);
  CHECK(report_text(r) == report_text(r));
}

TEST_CASE("write_file reports unwritable paths") {
  CHECK_THROWS_AS(write_file("/proc/collar_test/x.json", "{}"), IoError);
}

}
