#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "difflab/geometry.hpp"
#include "difflab/manifold.hpp"
#include "difflab/pde_solver.hpp"

namespace difflab {

enum class ExperimentKind {
  solve,
  varadhan,
  pressure,
  barrier,
  symmetry,
  manifold,
  acceptance,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

//! Mesh recipe. Radial runs use the graded interval description; lattice
//! runs use the uniform spacing h over the domain's bounding box.
struct MeshSpec {
  double r_lo = 0.0;
  double r_hi = 8.0;
  double h_min = 1e-3;
  double grade_ratio = 1.06;
  double h_max = 0.05;
  std::vector<double> attractors;
  double h = 0.02;  // lattice spacing
};

//! Numeric knobs shared across experiment kinds. Unused entries are ignored
//! by kinds that do not read them.
struct NumericsSpec {
  SolverOptions options;
  MeshSpec mesh;
  std::vector<double> times;      // snapshot times, strictly increasing
  std::vector<double> epsilons;   // pressure sweep, strictly decreasing
  std::vector<double> ref_times;  // pressure reference times
  double k_lo = 0.5;              // probe band in distance-to-boundary
  double k_hi = 2.0;
  double envelope_tol = 0.05;
  double tol = 1e-6;
  double tau = 1.0;             // comparison window for the boundary bound
  double surface_offset = 0.4;  // parallel-surface distance
  int surface_samples = 64;
  std::vector<double> moment_radii;  // balance-law circle radii
  double band_limit = 1.5;
};

//! Profile start for the self-similar boundary-layer system. Absent h0 / H0
//! select the balanced pair built from the flux derivative bounds.
struct BarrierSpec {
  std::optional<double> h0;
  std::optional<double> H0;
  double span = 12.0;  // integration reach in the similarity variable
};

struct ManifoldRunSpec {
  ManifoldSpec manifold;
  GeodesicDomain domain;
  ManifoldSetup setup;
  double rho = 0.05;    // collar half-width for the kernel comparison
  double scale = 0.05;  // rescaling factor for the flat-limit cross-check
  bool kernel_check = false;
  bool euclid_check = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::solve;
  std::optional<DomainSpec> domain;
  std::string nonlinearity = "linear";
  NumericsSpec numerics;
  BarrierSpec barrier;
  std::optional<ManifoldRunSpec> manifold;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
};

//! Parses the JSON experiment description. Errors throw ConfigError naming
//! the offending field by its dotted path (origin prepended when given).
ExperimentConfig parse_config_text(const std::string& json_text,
                                   const std::string& origin = "");

//! parse_config_text applied to the file's contents; read failures throw
//! ConfigError naming the path.
ExperimentConfig parse_config_file(const std::string& path);

//! The configuration serialized back to canonical JSON. Parsing the result
//! reproduces the configuration; reports embed it for reruns.
std::string resolved_config_json(const ExperimentConfig& cfg, int indent = 2);

}  // namespace difflab
