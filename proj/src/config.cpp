#include "collar/config.hpp"

#include <toml.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace collar {

namespace {

[[noreturn]] void fail_at(int line, const std::string& msg) {
  if (line > 0) throw ConfigError("line " + std::to_string(line) + ": " + msg);
  throw ConfigError(msg);
}

int line_of(const toml::node& n) { return static_cast<int>(n.source().begin.line); }

// Reads one table strictly: every key must be claimed by a handler.
class TableReader {
 public:
  TableReader(const toml::table& t, std::string prefix, RunConfig& cfg)
      : table_(t), prefix_(std::move(prefix)), cfg_(cfg) {}

  void on(const std::string& key, std::function<void(const toml::node&)> fn) {
    handlers_[key] = std::move(fn);
  }

  void run() {
    for (const auto& [k, node] : table_) {
      const std::string key(k.str());
      const auto it = handlers_.find(key);
      if (it == handlers_.end()) fail_at(line_of(node), "unknown key '" + dotted(key) + "'");
      cfg_.key_lines[dotted(key)] = line_of(node);
      it->second(node);
    }
  }

  std::string dotted(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

 private:
  const toml::table& table_;
  std::string prefix_;
  RunConfig& cfg_;
  std::map<std::string, std::function<void(const toml::node&)>> handlers_;
};

double as_real(const toml::node& n, const std::string& key) {
  if (auto v = n.as_floating_point()) return v->get();
  if (auto v = n.as_integer()) return static_cast<double>(v->get());
  fail_at(line_of(n), "'" + key + "' must be a number");
}

std::int64_t as_int(const toml::node& n, const std::string& key) {
  if (auto v = n.as_integer()) return v->get();
  fail_at(line_of(n), "'" + key + "' must be an integer");
}

std::string as_str(const toml::node& n, const std::string& key) {
  if (auto v = n.as_string()) return v->get();
  fail_at(line_of(n), "'" + key + "' must be a string");
}

bool as_bool(const toml::node& n, const std::string& key) {
  if (auto v = n.as_boolean()) return v->get();
  fail_at(line_of(n), "'" + key + "' must be a boolean");
}

const toml::array& as_array(const toml::node& n, const std::string& key) {
  if (auto v = n.as_array()) return *v;
  fail_at(line_of(n), "'" + key + "' must be an array");
}

std::vector<double> real_vec(const toml::node& n, const std::string& key) {
  std::vector<double> out;
  for (const auto& e : as_array(n, key)) out.push_back(as_real(e, key));
  return out;
}

std::vector<std::vector<double>> real_mat(const toml::node& n, const std::string& key) {
  std::vector<std::vector<double>> out;
  for (const auto& e : as_array(n, key)) out.push_back(real_vec(e, key));
  return out;
}

std::string one_of(const toml::node& n, const std::string& key, std::initializer_list<const char*> allowed) {
  const std::string v = as_str(n, key);
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return v;
    list += list.empty() ? a : std::string(", ") + a;
  }
  fail_at(line_of(n), "'" + key + "' must be one of: " + list);
}

int narrow(std::int64_t v, const toml::node& n, const std::string& key) {
  if (v < INT32_MIN || v > INT32_MAX) fail_at(line_of(n), "'" + key + "' out of range");
  return static_cast<int>(v);
}

const toml::table& sub_table(const toml::node& n, const std::string& key) {
  if (auto t = n.as_table()) return *t;
  fail_at(line_of(n), "'" + key + "' must be a table");
}

int line(const RunConfig& c, const std::string& key) {
  const auto it = c.key_lines.find(key);
  return it == c.key_lines.end() ? 0 : it->second;
}

toml::array to_array(const std::vector<double>& v) {
  toml::array a;
  for (double x : v) a.push_back(x);
  return a;
}

toml::array to_array(const std::vector<std::vector<double>>& m) {
  toml::array a;
  for (const auto& r : m) a.push_back(to_array(r));
  return a;
}

}  // namespace

std::string to_string(Theory t) {
  switch (t) {
    case Theory::pca_demo: return "pca_demo";
    case Theory::scalar: return "scalar";
    case Theory::psigma: return "psigma";
    case Theory::yangmills: return "yangmills";
    case Theory::verify_all: return "verify_all";
  }
  return "verify_all";
}

Theory theory_from_string(const std::string& s) {
  for (Theory t : {Theory::pca_demo, Theory::scalar, Theory::psigma, Theory::yangmills, Theory::verify_all})
    if (to_string(t) == s) return t;
  throw ConfigError("unknown theory '" + s + "'");
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tol = {
      {"rank", 1e-10},
      {"gradient_check", 1e-6},
      {"scalar_ratio_band", 0.3},
      {"energy_order", 1.8},
      {"symplecticity", 1e-6},
      {"noether", 1e-12},
      {"gauss_order", 1.8},
      {"gauss_u1", 1e-10},
      {"coisotropy_identity", 1e-10},
      {"coisotropy_order", 1.8},
      {"dn_symmetry", 1e-10},
      {"generating_functional", 1e-6},
      {"roundoff_floor", 1e-12},
  };
  return tol;
}

GridDescription grid_description(const GridConfig& grid) {
  GridDescription d;
  d.sizes = grid.sizes;
  d.spacing = grid.spacing;
  if (d.spacing.empty())
    for (int n : grid.sizes) d.spacing.push_back(n > 0 ? 1.0 / n : 0.0);
  if (!grid.metric.empty()) {
    const auto dim = grid.metric.size();
    Eigen::MatrixXd g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
      if (grid.metric[i].size() != dim) throw ConfigError("grid.metric must be a square matrix");
      for (std::size_t j = 0; j < dim; ++j)
        g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = grid.metric[i][j];
    }
    d.metric.push_back(g);
  }
  if (!grid.shift.empty())
    d.shift.push_back(Eigen::Map<const Eigen::VectorXd>(grid.shift.data(), static_cast<Eigen::Index>(grid.shift.size())));
  return d;
}

void validate_config(const RunConfig& c) {
  try {
    (void)LatticeGrid::build(grid_description(c.grid));
  } catch (const ConfigError& e) {
    fail_at(line(c, "grid.sizes"), e.what());
  }
  const bool collar_run = c.theory == Theory::scalar || c.theory == Theory::psigma ||
                          c.theory == Theory::yangmills;
  if (!(c.collar.dt > 0.0)) fail_at(line(c, "collar.dt"), "collar.dt must be positive");
  if (!(c.collar.epsilon > 0.0)) fail_at(line(c, "collar.epsilon"), "collar.epsilon must be positive");
  if (c.collar.steps < 1) fail_at(line(c, "collar.steps"), "collar.steps must be at least 1");
  if (c.collar.output_every < 1) fail_at(line(c, "collar.output_every"), "collar.output_every must be at least 1");
  if (collar_run && c.collar.steps * c.collar.dt > c.collar.epsilon * (1.0 + 1e-12))
    fail_at(line(c, "collar.steps"), "collar.steps * collar.dt exceeds collar.epsilon");
  for (const auto& [name, v] : c.tolerances) {
    if (!default_tolerances().count(name)) fail_at(line(c, "tolerances." + name), "unknown tolerance '" + name + "'");
    if (!(v > 0.0) || !std::isfinite(v)) fail_at(line(c, "tolerances." + name), "tolerance '" + name + "' must be positive");
  }
  if (c.scalar.mass2 < 0.0) fail_at(line(c, "scalar.mass2"), "scalar.mass2 must be non-negative");
  if (c.scalar.quartic < 0.0) fail_at(line(c, "scalar.quartic"), "scalar.quartic must be non-negative");
  if (c.scalar.mode < 0) fail_at(line(c, "scalar.mode"), "scalar.mode must be non-negative");
  if (c.pca.max_steps < 1) fail_at(line(c, "pca.max_steps"), "pca.max_steps must be at least 1");
  if (c.yangmills.a0 == "constant" && c.yangmills.a0_value.empty())
    fail_at(line(c, "yangmills.a0"), "yangmills.a0 = \"constant\" needs yangmills.a0_value");
  if (c.psigma.poisson != "su2" && c.psigma.constant.empty())
    fail_at(line(c, "psigma.poisson"), "psigma.constant is required for this Poisson structure");
}

RunConfig parse_config(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    fail_at(static_cast<int>(e.source().begin.line), std::string(e.description()));
  }

  RunConfig c;
  c.tolerances = default_tolerances();
  TableReader top(root, "", c);
  top.on("theory", [&](const toml::node& n) {
    try {
      c.theory = theory_from_string(as_str(n, "theory"));
    } catch (const ConfigError& e) {
      fail_at(line_of(n), e.what());
    }
  });
  top.on("seed", [&](const toml::node& n) {
    const auto v = as_int(n, "seed");
    if (v < 0) fail_at(line_of(n), "'seed' must be non-negative");
    c.seed = static_cast<std::uint64_t>(v);
  });
  top.on("output_dir", [&](const toml::node& n) { c.output_dir = as_str(n, "output_dir"); });

  top.on("grid", [&](const toml::node& n) {
    TableReader t(sub_table(n, "grid"), "grid", c);
    t.on("sizes", [&](const toml::node& v) {
      c.grid.sizes.clear();
      for (const auto& e : as_array(v, "grid.sizes")) c.grid.sizes.push_back(narrow(as_int(e, "grid.sizes"), e, "grid.sizes"));
    });
    t.on("spacing", [&](const toml::node& v) { c.grid.spacing = real_vec(v, "grid.spacing"); });
    t.on("metric", [&](const toml::node& v) { c.grid.metric = real_mat(v, "grid.metric"); });
    t.on("shift", [&](const toml::node& v) { c.grid.shift = real_vec(v, "grid.shift"); });
    t.run();
  });
  top.on("collar", [&](const toml::node& n) {
    TableReader t(sub_table(n, "collar"), "collar", c);
    t.on("epsilon", [&](const toml::node& v) { c.collar.epsilon = as_real(v, "collar.epsilon"); });
    t.on("dt", [&](const toml::node& v) { c.collar.dt = as_real(v, "collar.dt"); });
    t.on("steps", [&](const toml::node& v) { c.collar.steps = narrow(as_int(v, "collar.steps"), v, "collar.steps"); });
    t.on("output_every", [&](const toml::node& v) {
      c.collar.output_every = narrow(as_int(v, "collar.output_every"), v, "collar.output_every");
    });
    t.run();
  });
  top.on("scalar", [&](const toml::node& n) {
    TableReader t(sub_table(n, "scalar"), "scalar", c);
    t.on("potential", [&](const toml::node& v) { c.scalar.potential = one_of(v, "scalar.potential", {"free", "mass", "quartic"}); });
    t.on("mass2", [&](const toml::node& v) { c.scalar.mass2 = as_real(v, "scalar.mass2"); });
    t.on("quartic", [&](const toml::node& v) { c.scalar.quartic = as_real(v, "scalar.quartic"); });
    t.on("initial", [&](const toml::node& v) { c.scalar.initial = one_of(v, "scalar.initial", {"mode", "gaussian"}); });
    t.on("mode", [&](const toml::node& v) { c.scalar.mode = narrow(as_int(v, "scalar.mode"), v, "scalar.mode"); });
    t.on("amplitude", [&](const toml::node& v) { c.scalar.amplitude = as_real(v, "scalar.amplitude"); });
    t.on("bulk", [&](const toml::node& v) { c.scalar.bulk = one_of(v, "scalar.bulk", {"none", "lorentzian", "euclidean"}); });
    t.run();
  });
  top.on("psigma", [&](const toml::node& n) {
    TableReader t(sub_table(n, "psigma"), "psigma", c);
    t.on("poisson", [&](const toml::node& v) { c.psigma.poisson = one_of(v, "psigma.poisson", {"constant", "su2", "polynomial"}); });
    t.on("constant", [&](const toml::node& v) { c.psigma.constant = real_mat(v, "psigma.constant"); });
    t.on("linear", [&](const toml::node& v) {
      c.psigma.linear.clear();
      for (const auto& e : as_array(v, "psigma.linear")) c.psigma.linear.push_back(real_mat(e, "psigma.linear"));
    });
    t.on("lambda", [&](const toml::node& v) { c.psigma.lambda = as_real(v, "psigma.lambda"); });
    t.on("radius", [&](const toml::node& v) { c.psigma.radius = as_real(v, "psigma.radius"); });
    t.on("height", [&](const toml::node& v) { c.psigma.height = as_real(v, "psigma.height"); });
    t.on("beta", [&](const toml::node& v) { c.psigma.beta = real_vec(v, "psigma.beta"); });
    t.run();
  });
  top.on("yangmills", [&](const toml::node& n) {
    TableReader t(sub_table(n, "yangmills"), "yangmills", c);
    t.on("algebra", [&](const toml::node& v) { c.yangmills.algebra = one_of(v, "yangmills.algebra", {"u1", "su2"}); });
    t.on("a0", [&](const toml::node& v) { c.yangmills.a0 = one_of(v, "yangmills.a0", {"zero", "constant"}); });
    t.on("a0_value", [&](const toml::node& v) { c.yangmills.a0_value = real_vec(v, "yangmills.a0_value"); });
    t.on("initial", [&](const toml::node& v) { c.yangmills.initial = one_of(v, "yangmills.initial", {"random", "mode"}); });
    t.on("amplitude", [&](const toml::node& v) { c.yangmills.amplitude = as_real(v, "yangmills.amplitude"); });
    t.on("census", [&](const toml::node& v) { c.yangmills.census = as_bool(v, "yangmills.census"); });
    t.run();
  });
  top.on("pca", [&](const toml::node& n) {
    TableReader t(sub_table(n, "pca"), "pca", c);
    t.on("example", [&](const toml::node& v) {
      c.pca.example = one_of(v, "pca.example", {"regular", "two_step", "scalar", "psigma", "yangmills"});
    });
    t.on("max_steps", [&](const toml::node& v) { c.pca.max_steps = narrow(as_int(v, "pca.max_steps"), v, "pca.max_steps"); });
    t.run();
  });
  top.on("tolerances", [&](const toml::node& n) {
    const toml::table& t = sub_table(n, "tolerances");
    for (const auto& [k, v] : t) {
      const std::string key(k.str());
      if (!default_tolerances().count(key)) fail_at(line_of(v), "unknown tolerance '" + key + "'");
      c.key_lines["tolerances." + key] = line_of(v);
      c.tolerances[key] = as_real(v, "tolerances." + key);
    }
  });
  top.run();
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string echo_config(const RunConfig& c, bool include_output_dir) {
  toml::table root;
  root.insert("theory", to_string(c.theory));
  root.insert("seed", static_cast<std::int64_t>(c.seed));
  if (include_output_dir) root.insert("output_dir", c.output_dir);

  toml::table grid;
  toml::array sizes;
  for (int n : c.grid.sizes) sizes.push_back(static_cast<std::int64_t>(n));
  grid.insert("sizes", sizes);
  if (!c.grid.spacing.empty()) grid.insert("spacing", to_array(c.grid.spacing));
  if (!c.grid.metric.empty()) grid.insert("metric", to_array(c.grid.metric));
  if (!c.grid.shift.empty()) grid.insert("shift", to_array(c.grid.shift));
  root.insert("grid", grid);

  root.insert("collar", toml::table{{"epsilon", c.collar.epsilon},
                                    {"dt", c.collar.dt},
                                    {"steps", static_cast<std::int64_t>(c.collar.steps)},
                                    {"output_every", static_cast<std::int64_t>(c.collar.output_every)}});
  root.insert("scalar", toml::table{{"potential", c.scalar.potential},
                                    {"mass2", c.scalar.mass2},
                                    {"quartic", c.scalar.quartic},
                                    {"initial", c.scalar.initial},
                                    {"mode", static_cast<std::int64_t>(c.scalar.mode)},
                                    {"amplitude", c.scalar.amplitude},
                                    {"bulk", c.scalar.bulk}});
  toml::table psm{{"poisson", c.psigma.poisson},
                  {"lambda", c.psigma.lambda},
                  {"radius", c.psigma.radius},
                  {"height", c.psigma.height}};
  if (!c.psigma.constant.empty()) psm.insert("constant", to_array(c.psigma.constant));
  if (!c.psigma.beta.empty()) psm.insert("beta", to_array(c.psigma.beta));
  if (!c.psigma.linear.empty()) {
    toml::array lin;
    for (const auto& m : c.psigma.linear) lin.push_back(to_array(m));
    psm.insert("linear", lin);
  }
  root.insert("psigma", psm);
  toml::table ym{{"algebra", c.yangmills.algebra},
                 {"a0", c.yangmills.a0},
                 {"initial", c.yangmills.initial},
                 {"amplitude", c.yangmills.amplitude},
                 {"census", c.yangmills.census}};
  if (!c.yangmills.a0_value.empty()) ym.insert("a0_value", to_array(c.yangmills.a0_value));
  root.insert("yangmills", ym);
  root.insert("pca", toml::table{{"example", c.pca.example}, {"max_steps", static_cast<std::int64_t>(c.pca.max_steps)}});
  toml::table tol;
  for (const auto& [k, v] : c.tolerances) tol.insert(k, v);
  root.insert("tolerances", tol);

  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

}  // namespace collar
