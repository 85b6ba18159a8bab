#pragma once

#include "cenn/compilation.hpp"

namespace cenn {

// ---- targets ----

enum class TargetFamily { affine, affine_tanh };
std::string to_string(TargetFamily f);
TargetFamily target_family_from_string(std::string_view s);

/// Seeded random objectwise map G: X → Y (Gaussian affine, optionally followed by tanh).
ObjectwiseMap random_objectwise_map(const FunctorPtr& x, const FunctorPtr& y, TargetFamily family,
                                    std::uint64_t seed, double scale = 1.0);

/// compile(R, G) for a seeded random G; equivariant by construction.
NetworkSpec sample_equivariant_target(const Retraction& r, const FunctorPtr& x, std::uint64_t seed,
                                      TargetFamily family = TargetFamily::affine_tanh);

// ---- constructive blocks ----

/// Reads η(y)·⟨ℓ, (X(u0) x_a)(σ_{u0} y)⟩ at a = tgt(u0).
struct Carrier {
  ArrowIndex arrow;
  Vector ell;  // covector on E_X(src u0)
  Vector eta;  // weight per point of Ω(a); empty means 1 everywhere
};

/// [lift, bundle_conv] into the scalar functor S^k, k = the largest carrier count at any object.
/// Carriers at one object fill consecutive output channels in the given order.
/// Throws Error(zero_weight) for carriers on null arrows.
NetworkSpec build_carrier_block(const FunctorPtr& x, const ProbeFamily& sigma, const std::vector<Carrier>& carriers);

/// Identity-supported conv computing c(y)·h(y) + b(y) per object and point.
/// weight[a][y] is out x n_in(a); bias[a] is |Ω(a)| x out. `output` must share the input's base.
NetworkSpec build_affine_block(const FunctorPtr& input, const FunctorPtr& output,
                               const ObjectMap<std::vector<Matrix>>& weight, const ObjectMap<Matrix>& bias);

/// One hidden layer z = W h + b of a per-object MLP, shared across base points.
struct MlpLayer {
  ObjectMap<Matrix> weight;
  ObjectMap<Vector> bias;
};

/// Hidden layers of a pointwise MLP realized by gate gadgets: an affine conv to pairs (1, z_j), a
/// block gate scaling pair j by α(z_j), and a projection keeping the first entry of each pair.
/// With passthrough the input channels ride along in front, so the output is [h; α(z_last)].
NetworkSpec build_gate_mlp(const FunctorPtr& input, const std::vector<MlpLayer>& layers, const Activation& alpha,
                           bool passthrough);

/// Concatenates fragments whose boundary functors agree.
NetworkSpec chain_networks(const NetworkSpec& first, const NetworkSpec& second);

// ---- per-object parametric model ----

/// Carrier values h(y)_j = η_j(y)·⟨ℓ_j, (X(u0_j) x_b)(σ_{u0_j} y)⟩ at b, as a |Ω(b)| x k matrix.
Matrix carrier_values(const FeatureFunctor& x, const ProbeFamily& sigma, const std::vector<Carrier>& carriers,
                      ObjectIndex b, const Matrix& feature);

/// k carriers at b: coordinate reads through id_b first, then through the other positive-weight
/// arrows of I(b), then seeded Gaussian covectors cycling over those arrows.
std::vector<Carrier> default_carriers(const FeatureFunctor& x, ObjectIndex b, std::size_t k, std::uint64_t seed);

/// One gated hidden layer on the carrier values, then a per-point affine readout of [h; α(W h + c)].
struct ObjectModel {
  std::vector<Carrier> carriers;
  Matrix hidden_weight;         // w x k
  Vector hidden_bias;           // w
  std::vector<Matrix> readout;  // per point: n_Y(b) x (k + w + 1), last column is the bias
};

/// Training data at one object: carrier values and targets per sample.
struct ObjectData {
  std::vector<Matrix> carriers;  // |Ω(b)| x k
  std::vector<Matrix> targets;   // |Ω(b)| x n_Y(b)
};

/// Reference evaluation of the model head on carrier values.
Matrix evaluate_head(const ObjectModel& m, const Activation& alpha, const Matrix& h);

/// ½·mean over samples of Σ_y ‖head − target‖² and its gradient with respect to the hidden weights,
/// hidden biases and readouts, flattened in that order (matrices column-major).
double object_loss(const ObjectModel& m, const Activation& alpha, const ObjectData& data, Vector* gradient);
Vector object_parameters(const ObjectModel& m);
void set_object_parameters(ObjectModel& m, const Vector& theta);

/// Readouts minimizing the loss for fixed hidden weights (minimum-norm least squares per point).
void solve_readouts(ObjectModel& m, const Activation& alpha, const ObjectData& data);

/// Residuals (sample, point, output) scaled by 1/√N, and their Jacobian in parameter order, so that
/// the loss is ½‖r‖² and its gradient is Jᵀr.
Vector object_residuals(const ObjectModel& m, const Activation& alpha, const ObjectData& data, Matrix* jacobian);

// ---- fitting ----

struct UatArchitecture {
  std::size_t carriers = 1;
  std::size_t width = 0;
  friend bool operator==(const UatArchitecture&, const UatArchitecture&) = default;
};

/// carriers ∈ {1,2,4,8} × width ∈ {0,4,8}, in increasing capacity.
std::vector<UatArchitecture> default_capacity_grid();

struct FitBudget {
  std::size_t iterations = 400;  // damped Gauss-Newton steps per object
  double damping = 1e-3;         // initial Levenberg-Marquardt damping
  double tol = 1e-14;            // stop when the loss drops below this
};

struct UatProblem {
  Retraction retraction;
  FunctorPtr x;
  ProbeFamily sigma;
  NetworkSpec target;
  std::vector<Section> samples;  // the compacts K_a
  Activation alpha{ActivationKind::tanh};
};

struct FitPoint {
  UatArchitecture arch;
  double sup_error = 0.0;      // this configuration's error on the compacts
  double best_error = 0.0;     // monotone-best: min over this and all earlier configurations
  double eqv_residual = 0.0;   // equivariance residual of this configuration's Ψ
  double train_loss = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string status;          // "converged", "tolerance", "stalled", "budget_exhausted"
  double seconds = 0.0;
};

struct FitResult {
  std::vector<FitPoint> curve;
  std::size_t best = 0;              // index into curve of the network behind best_error
  std::vector<NetworkSpec> networks; // Ψ per configuration
  const NetworkSpec& best_network() const { return networks.at(best); }
};

/// Fits Ψ = compile(R, Ĝ) per capacity configuration: Ĝ_b is the object model fitted to Φ_b on the
/// transported samples {X(u) x_a : x ∈ K_a, u ∈ I(a), src u = b}. Readouts are solved by least
/// squares; hidden weights start from a seeded draw and take damped Gauss-Newton steps on all
/// parameters, re-solving the readouts after each step.
FitResult fit_cenn(const UatProblem& p, const std::vector<UatArchitecture>& grid, const FitBudget& budget,
                   std::uint64_t seed, std::size_t eqv_samples = 50);

/// Network Ψ for given per-object models.
NetworkSpec assemble_fitted_network(const UatProblem& p, const ObjectMap<ObjectModel>& models);

/// Max relative error ‖g − g_fd‖∞ / max(‖g‖∞, ‖g_fd‖∞, 1e-12) of the fit-loss gradient against
/// central differences, over `points` random parameter points and random data.
double gradient_check(const UatArchitecture& arch, const Activation& alpha, std::size_t output_dim,
                      std::size_t base_points, std::size_t points, std::uint64_t seed, double step = 1e-5);

// ---- reporting ----

struct UatExperiment {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t sample_count = 0;
  FitResult result;
};

struct UatReport {
  std::string csv;
  std::string markdown;
};

/// CSV (17 significant digits, no runtimes) and Markdown (with runtimes). Several experiments are
/// concatenated with an `experiment` column.
UatReport uat_report(const std::vector<UatExperiment>& experiments);

}  // namespace cenn
