#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "elasteig/adaptive.hpp"
#include "elasteig/eigensolve.hpp"
#include "elasteig/fem.hpp"
#include "elasteig/mesh.hpp"

namespace elasteig {

inline constexpr int kSchemaVersion = 1;

enum class GeometryKind { UnitSquare, ThreeStripSquare, LShape, File };

struct GeometryConfig {
  GeometryKind kind = GeometryKind::UnitSquare;
  int n = 8;
  std::vector<int> levels;  // explicit structured levels for uniform studies
  SideTags sides;
  std::set<int> dirichlet_labels;
  std::filesystem::path path;
  MeshFormat format = MeshFormat::Native;
};

struct OutputConfig {
  std::filesystem::path directory = "elasteig-out";
  bool table = true;
  bool plot = true;
  bool matrices = false;
  bool indicators = false;
};

/// A fully resolved experiment. `echo` mirrors the input with every
/// defaulted leaf written as {"value": v, "defaulted": true}.
struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string label;
  GeometryConfig geometry;
  MaterialModel model;
  ElementFamily family = ElementFamily::TaylorHood;
  EigenOptions eigen;
  LoopKind loop = LoopKind::Uniform;
  std::vector<int> modes = {1};
  double fraction = 0.5;
  int max_iterations = 12;
  long max_dofs = 300000;
  bool estimate = true;
  std::vector<ReferenceValue> references;
  OutputConfig output;
  nlohmann::json echo;

  /// Mesh for level `n` of a built-in generator, or the mesh file.
  [[nodiscard]] Mesh build_mesh(int n) const;
  /// The mesh used by a single solve.
  [[nodiscard]] Mesh build_mesh() const { return build_mesh(geometry.n); }
  [[nodiscard]] StudyConfig study_config() const;
};

/// Parses and validates; relative paths resolve against `base_dir`.
/// Throws InputError with the offending key on any problem.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace elasteig
