#pragma once

#include "cenn/builders.hpp"
#include "cenn/uat.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace cenn {

using Json = nlohmann::json;

/// Reads and parses a JSON file; Error(malformed_input) names the file on any failure.
Json read_json_file(const std::filesystem::path& path);
/// Two-space indented JSON with a trailing newline; parent directories are created.
void write_json_file(const std::filesystem::path& path, const Json& doc);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Row-major nested arrays.
Json matrix_to_json(const Matrix& m);
/// Checks the shape when rows/cols are non-negative.
Matrix matrix_from_json(const Json& j, Eigen::Index rows = -1, Eigen::Index cols = -1, std::string_view what = "matrix");

// ---- categories ----

/// {objects, arrows: [{id, src, tgt}], identities: {object: arrow}, composition: [[f, g, f∘g]], weights}.
/// Arrows may also be given as [id, src, tgt] triples; missing weights default to 1.
CategorySpec category_spec_from_json(const Json& j);
Json category_to_json(const FiniteCategory& c);
CategoryPtr category_from_json(const Json& j);

// ---- functors and sections ----

/// {base: {object: [point ids]}, fiber_dim: {object: n}, tau: {arrow: {point: point}}, pi: {...},
///  L: {arrow: matrix}}. Missing bases are the single point "*"; missing τ/π are allowed between
/// one-point bases; a missing L is the identity when the fibers agree.
FunctorPtr functor_from_json(const Json& j, const CategoryPtr& cat);
Json functor_to_json(const FeatureFunctor& f);

/// {object: |Ω| x n nested array}; objects may be omitted.
Section section_from_json(const Json& j, const FunctorPtr& f);
Json section_to_json(const Section& s);

/// {arrow: {point of tgt: point of src}}.
ProbeFamily probe_from_json(const Json& j, const FeatureFunctor& f);
Json probe_to_json(const ProbeFamily& p, const FeatureFunctor& f);

/// {object: matrix}; used for bias fields and scalar channels.
Json object_matrices_to_json(const ObjectMap<Matrix>& m, const FiniteCategory& c);
ObjectMap<Matrix> object_matrices_from_json(const Json& j, const FiniteCategory& c, std::string_view what);

// ---- kernels ----

/// {regime, entries: {"arrow@point": matrix}, bias?: {object: matrix}, probe?: {...}}.
/// Missing entries are zero.
Json kernel_to_json(const CategoryKernel& k);
CategoryKernel kernel_from_json(const Json& j, FunctorPtr source, FunctorPtr target);

/// {regime, rank, singular_values, kernels: [...], biases: [...], channels: [...]}.
Json basis_to_json(const ParameterBasis& basis, Regime regime, const std::vector<ObjectMap<Matrix>>& biases,
                   const std::vector<ScalarChannel>& channels, const FiniteCategory& c);
std::vector<CategoryKernel> basis_kernels_from_json(const Json& j, FunctorPtr source, FunctorPtr target);
/// Shape and per-row generating tuples of a constraint system.
Json provenance_to_json(const ConstraintSystem& sys);

// ---- networks ----

/// {functors: {name: functor doc | file path}, input: name, layers: [...]}. Layers reference
/// functors by name; kernels may be inline or a file path relative to `base_dir`.
Json network_to_json(const NetworkSpec& net);
NetworkSpec network_from_json(const Json& j, const CategoryPtr& cat, const std::filesystem::path& base_dir = {});

/// {maps: {object: [stages] | null}} between given functors. Fragment stages need a `functors`
/// table in the same document.
Json objectwise_map_to_json(const ObjectwiseMap& m);
ObjectwiseMap objectwise_map_from_json(const Json& j, FunctorPtr input, FunctorPtr output,
                                       const std::filesystem::path& base_dir = {});

// ---- complexes ----

/// {cells: [{id, dim}], faces: [[face, cell]]}.
CWComplex complex_from_json(const Json& j);
Json complex_to_json(const CWComplex& k);

// ---- experiments ----

struct ExperimentConfig {
  std::string name = "experiment";
  std::string category;                              // category document
  std::string x;                                     // input functor document
  std::string y;                                     // target functor document (Haar or graded)
  std::map<std::string, std::size_t> graded_dims;    // alternative to y: build the graded target
  std::string probe = "identity";                    // "identity" or "tau"
  TargetFamily family = TargetFamily::affine_tanh;
  std::uint64_t target_seed = 0;
  std::vector<UatArchitecture> grid = default_capacity_grid();
  std::vector<std::uint64_t> seeds{0};
  std::size_t samples = 64;
  std::uint64_t sample_seed = 1;
  std::size_t eqv_samples = 50;
  FitBudget budget;
  Activation activation;
};

ExperimentConfig experiment_config_from_json(const Json& j);
Json experiment_config_to_json(const ExperimentConfig& c);

/// Curve of a fit (no networks).
Json uat_experiment_to_json(const UatExperiment& e);
UatExperiment uat_experiment_from_json(const Json& j);

}  // namespace cenn
