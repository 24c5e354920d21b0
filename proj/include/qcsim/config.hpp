#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcsim/dynamics.hpp"
#include "qcsim/grid.hpp"
#include "qcsim/material.hpp"

namespace qcsim {

/// One term of a field profile:
///   zero
///   constant(a1,a2,a3)
///   mode(k1,k2,k3,a1,a2,a3)   prod_a sin(k_a pi x_a / L_a) * (a1,a2,a3)
///   affine(c1,c2,c3,g11,g12,g13,g21,...,g33)   c + G x
///   file(path)                a snapshot file (initial data only)
struct ProfileTerm {
  enum class Kind { zero, constant, mode, affine, file };
  Kind kind = Kind::zero;
  std::vector<double> args;
  std::string path;

  friend bool operator==(const ProfileTerm&, const ProfileTerm&) = default;
};

/// Sum of terms, written `term + term + ...`; no terms means zero.
struct Profile {
  std::vector<ProfileTerm> terms;

  bool uses_file() const;
  friend bool operator==(const Profile&, const Profile&) = default;
};

/// Throws std::invalid_argument on malformed text.
Profile parse_profile(const std::string& text);
std::string to_string(const Profile& p);

enum class Study { none, viscosity_ladder, mms, uniqueness };
enum class GateMode { theorem, energy };

struct RunConfig {
  MaterialParams material;

  int dim = 2;
  Index3 n{0, 0, 1};
  std::array<double, 3> extent{1.0, 1.0, 1.0};
  Profile bc_u;
  Profile bc_nu;

  Profile u0;
  Profile dot_u0;
  Profile nu0;

  SolverConfig solver;

  Model model = Model::linear;
  GateMode gate = GateMode::theorem;
  Study study = Study::none;

  std::vector<std::pair<double, double>> ladder{{0.1, 0.1}, {0.05, 0.05}, {0.025, 0.025}};
  std::vector<int> mms_levels{7, 15, 31};
  double mms_t_end = 0.5;
  double mms_dt_over_h = 0.5;
  Profile perturbation;  ///< added to nu0 for the second uniqueness trajectory

  std::string output_directory = "run";
  bool write_snapshots = true;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& key, const std::string& what);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Parses the flat `section.key = value` format. `overrides` are applied on
/// top of the text (reported as line 0 on error).
RunConfig parse_config(const std::string& text, const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Canonical text with every key, in documentation order.
std::string emit_config(const RunConfig& cfg);

/// Keys accepted by the parser, with their default value text ("" = required).
const std::vector<std::pair<std::string, std::string>>& config_keys();

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

GridPtr build_grid(const RunConfig& cfg);
FieldState build_initial_state(const RunConfig& cfg, GridPtr grid);
/// nu0 + perturbation.
FieldState build_perturbed_state(const RunConfig& cfg, GridPtr grid);

}  // namespace qcsim
