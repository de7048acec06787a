#pragma once

#include <string>
#include <vector>

#include "nlpme/time_stepper.hpp"

namespace nlpme {

/// Flat sectioned key = value run description (strict: unknown keys are
/// errors, every diagnostic carries the line number). Sections: [equation],
/// [discretization], [output], [tolerances], [study].
struct RunConfig {
  std::string command;  // run | lte | converge | properties | stefan | heat

  // [equation]
  int dimension = 1;
  double box_half = 8.0;
  double alpha = 1.0;
  std::string measure = "fractional";  // fractional | zero
  std::string phi1 = "identity";       // identity | power | stefan
  std::string phi2 = "identity";
  double phi1_m = 2.0, phi1_a = 1.0, phi1_b = 0.5;
  double phi2_m = 2.0, phi2_a = 1.0, phi2_b = 0.5;
  std::string operator1 = "zero";  // zero | local_laplacian | midpoint |
                                   // multilinear | lagrange |
                                   // vanishing_viscosity | vv_midpoint |
                                   // fractional_laplacian | sigma
  std::string operator2 = "zero";
  std::string r_rule = "h";  // h | sqrt_h | const:<value>
  double R_tail = 4.0;
  int lagrange_order = 2;
  double theta = -1.0;  // in [0,1]: op1 = theta L, op2 = (1-theta) L
  std::string sigma;    // columns "s11 s21 ; s12 s22 ; ..."
  std::string eta_rule = "sqrt_h";  // sqrt_h | const:<value>
  std::string initial = "gaussian";  // gaussian | bump | box

  // [discretization]
  double h = 0.1;
  std::string dt_rule = "h";  // h | h2 | cfl | const:<value>
  double T = 1.0;

  // [output]
  std::string out_dir = "out";
  int snapshot_every = 0;  // 0: no snapshots

  // [tolerances]
  double tol = 1e-10;
  std::string cfl_policy = "enforce";  // enforce | warn | off

  // [study]
  int levels = 6;
  unsigned long seed = 12345;

  std::string config_text;  // raw file content (hashed into provenance)
};

/// Parses and validates; throws std::runtime_error with one line per
/// diagnostic (unknown key, bad value, missing required key).
RunConfig parse_config(const std::string& path);

Nonlinearity make_nonlinearity(const std::string& kind, double m, double a,
                               double b);
DiscreteOperator make_operator(const RunConfig& cfg, const std::string& recipe,
                               double h);
double resolve_r(const std::string& rule, double h);

/// Assembles operators, nonlinearities, and time grid at spacing h.
SchemeConfig build_scheme(const RunConfig& cfg, double h);

Field initial_field(const RunConfig& cfg, const UniformGrid& grid);

/// Runs the command; writes CSV/snapshots under out_dir (overridden by the
/// NLPME_OUT environment variable). Returns the process exit status; on
/// property failure a machine-readable failure.json is written.
int execute(const RunConfig& cfg);

/// FNV-1a hash of the config text, for CSV provenance lines.
std::string config_hash(const std::string& text);

}  // namespace nlpme
