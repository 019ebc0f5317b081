#pragma once

/// @file config.hpp
/// @brief Run configuration: strict TOML parsing, defaults, validation and a
/// canonical echo serialization.

#include "collar/lattice.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace collar {

enum class Theory { pca_demo, scalar, psigma, yangmills, verify_all };

std::string to_string(Theory t);
Theory theory_from_string(const std::string& s);

struct GridConfig {
  std::vector<int> sizes{32};
  std::vector<double> spacing;               // empty: 1/N per axis
  std::vector<std::vector<double>> metric;   // empty: identity
  std::vector<double> shift;                 // empty: zero
};

struct CollarConfig {
  double epsilon = 1.0;
  double dt = 0.01;
  int steps = 100;
  int output_every = 10;
};

struct ScalarConfig {
  std::string potential = "free";  // free | mass | quartic
  double mass2 = 0.0;
  double quartic = 0.0;
  std::string initial = "mode";    // mode | gaussian
  int mode = 1;
  double amplitude = 1.0;
  std::string bulk = "none";       // none | lorentzian | euclidean
};

struct PsigmaConfig {
  std::string poisson = "su2";     // constant | su2 | polynomial
  std::vector<std::vector<double>> constant;
  std::vector<std::vector<std::vector<double>>> linear;
  double lambda = 1.0;
  double radius = 1.0;
  double height = 0.0;
  std::vector<double> beta;        // constant multiplier per target axis; empty: zero
};

struct YangMillsConfig {
  std::string algebra = "su2";     // u1 | su2
  std::string a0 = "zero";         // zero | constant
  std::vector<double> a0_value;
  std::string initial = "random";  // random | mode
  double amplitude = 0.1;
  bool census = false;
};

struct PcaConfig {
  std::string example = "regular";  // regular | two_step | scalar | psigma | yangmills
  int max_steps = 16;
};

struct RunConfig {
  Theory theory = Theory::verify_all;
  std::uint64_t seed = 20240611;
  std::string output_dir = "collar_out";
  GridConfig grid;
  CollarConfig collar;
  ScalarConfig scalar;
  PsigmaConfig psigma;
  YangMillsConfig yangmills;
  PcaConfig pca;
  std::map<std::string, double> tolerances;  // always complete after parsing

  /// Source line of each dotted key, for diagnostics; not serialized.
  std::map<std::string, int> key_lines;
};

/// Parses and validates. Throws ConfigError with "line N:" prefixes where known.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical TOML text of the fully defaulted config. parse(echo(c)) echoes identically.
/// Reports omit output_dir so that they do not depend on where they are written.
std::string echo_config(const RunConfig& config, bool include_output_dir = true);

/// Invariant checks shared by parsing and programmatic construction.
void validate_config(const RunConfig& config);

GridDescription grid_description(const GridConfig& grid);

/// Named tolerances of the verification suite with their defaults.
const std::map<std::string, double>& default_tolerances();

}  // namespace collar
