#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sentitrade::nn {

enum class Activation { Identity, ReLU };

/// Shape of one dense layer inside an Mlp's flat parameter vector. Weights
/// are row-major out x in, followed by `out` biases.
struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::Identity;
  std::size_t offset = 0;

  std::size_t weight_count() const { return in * out; }
  std::size_t parameter_count() const { return in * out + out; }

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

/// Parameter-shaped gradient buffers, one vector per parameter block.
using Gradients = std::vector<std::vector<double>>;

/// Per-call activation record for backpropagation. Reusable across calls.
struct MlpTape {
  std::vector<std::vector<double>> inputs;  // input to layer k
  std::vector<std::vector<double>> pre;     // pre-activation of layer k
  std::vector<double> output;
};

/// Dense feed-forward network with all parameters in one contiguous block.
class Mlp {
 public:
  Mlp() = default;
  /// widths = {in, h1, ..., out}; hidden layers use `hidden`, the last layer
  /// uses `output`. Parameters start at zero.
  Mlp(std::span<const std::size_t> widths, Activation hidden, Activation output);

  /// Uniform He initialisation U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
  void init_he_uniform(std::mt19937_64& rng);

  std::size_t input_size() const { return layers_.empty() ? 0 : layers_.front().in; }
  std::size_t output_size() const { return layers_.empty() ? 0 : layers_.back().out; }
  const std::vector<LayerShape>& layers() const { return layers_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::span<double> weights(std::size_t layer);
  std::span<double> biases(std::size_t layer);

  /// Throws std::invalid_argument on an input width mismatch.
  std::vector<double> forward(std::span<const double> x) const;
  void forward(std::span<const double> x, MlpTape& tape) const;

  /// Adds dLoss/dparams into `grad` (sized like params()) and returns dLoss/dx.
  std::vector<double> backward(const MlpTape& tape, std::span<const double> grad_out,
                               std::span<double> grad) const;

  /// True where a ReLU unit's pre-activation is positive, over all ReLU layers.
  void relu_pattern(const MlpTape& tape, std::vector<bool>& out) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;

 private:
  friend class ModelIo;
  std::vector<LayerShape> layers_;
  std::vector<double> params_;
};

/// Two-stream head over a shared trunk:
/// Q(s, a) = V(s) + A(s, a) - mean_a' A(s, a').
class DuelingNetwork {
 public:
  DuelingNetwork() = default;
  DuelingNetwork(Mlp trunk, Mlp value, Mlp advantage);

  struct Tape {
    MlpTape trunk;
    MlpTape value;
    MlpTape advantage;
  };

  std::size_t input_size() const { return trunk_.input_size(); }
  std::size_t output_size() const { return advantage_.output_size(); }

  Mlp& trunk() { return trunk_; }
  Mlp& value() { return value_; }
  Mlp& advantage() { return advantage_; }
  const Mlp& trunk() const { return trunk_; }
  const Mlp& value() const { return value_; }
  const Mlp& advantage() const { return advantage_; }

  std::vector<double> forward(std::span<const double> x) const;
  void forward(std::span<const double> x, Tape& tape, std::vector<double>& q) const;
  /// `grad` holds three blocks: trunk, value, advantage.
  std::vector<double> backward(const Tape& tape, std::span<const double> grad_q, Gradients& grad) const;

  /// V(s) for one input (the value stream's scalar output).
  double state_value(std::span<const double> x) const;

  friend bool operator==(const DuelingNetwork&, const DuelingNetwork&) = default;

 private:
  Mlp trunk_;
  Mlp value_;
  Mlp advantage_;
};

/// Chain rule through the mean-subtraction combine: given dL/dQ, returns
/// dL/dV and writes dL/dA (which always sums to zero).
double dueling_combine_backward(std::span<const double> grad_q, std::span<double> grad_advantage);

/// Loss (q[action] - target)^2 and its gradient w.r.t. q (nonzero only at
/// `action`, where it is 2 (q[action] - target)).
struct MseResult {
  double loss = 0.0;
  std::vector<double> grad;
};
MseResult mse_loss(std::span<const double> q_pred, std::size_t action, double target);

/// A Q-function approximator: plain or dueling. Value type; copying it is
/// how the target network is synced.
class QModel {
 public:
  QModel() = default;
  QModel(Mlp net) : net_(std::move(net)) {}                 // NOLINT(implicit)
  QModel(DuelingNetwork net) : net_(std::move(net)) {}      // NOLINT(implicit)

  bool is_dueling() const { return std::holds_alternative<DuelingNetwork>(net_); }
  const Mlp& plain() const { return std::get<Mlp>(net_); }
  Mlp& plain() { return std::get<Mlp>(net_); }
  const DuelingNetwork& dueling() const { return std::get<DuelingNetwork>(net_); }
  DuelingNetwork& dueling() { return std::get<DuelingNetwork>(net_); }

  std::size_t input_size() const;
  std::size_t output_size() const;

  std::vector<double> forward(std::span<const double> x) const;

  /// Parameter blocks in a fixed order (1 for plain, 3 for dueling).
  std::vector<std::span<double>> parameter_blocks();
  std::vector<std::span<const double>> parameter_blocks() const;
  std::size_t parameter_count() const;
  Gradients zero_gradients() const;

  /// Adds scale * d(q[action] - target)^2 / dparams into `grad`; returns the
  /// unscaled loss.
  double accumulate_gradient(std::span<const double> x, std::size_t action, double target,
                             Gradients& grad, double scale = 1.0) const;

  /// ReLU on/off pattern of the forward pass at `x`.
  std::vector<bool> relu_pattern(std::span<const double> x) const;

  void save(std::ostream& out) const;
  static QModel load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static QModel load(const std::filesystem::path& path);

  friend bool operator==(const QModel&, const QModel&) = default;

 private:
  std::variant<Mlp, DuelingNetwork> net_;
};

inline constexpr std::size_t kStateWidth = 6;
inline constexpr std::size_t kActionCount = 3;
inline constexpr std::size_t kHiddenWidth = 64;

/// 6 -> 64 -> 64 -> 64 -> 3, ReLU hidden layers, linear output.
Mlp make_q_network(std::mt19937_64& rng);
/// Trunk 6 -> 64 -> 64, value head 64 -> 64 -> 1, advantage head 64 -> 64 -> 3.
DuelingNetwork make_dueling_q_network(std::mt19937_64& rng);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates shaped like the parameter blocks.
struct AdamState {
  AdamConfig config;
  Gradients m;
  Gradients v;
  long long step = 0;

  static AdamState for_blocks(std::span<const std::span<double>> params, AdamConfig config = {});
};

/// One bias-corrected Adam update. Throws std::invalid_argument on shape mismatch.
void adam_step(std::span<const std::span<double>> params, const Gradients& grads, AdamState& state);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_at_kink = 0;
};

struct GradientCheckOptions {
  double step = 1e-5;
  /// Denominator floor: |a - n| / max(|a|, |n|, floor). Keeps vanishing
  /// gradients from turning finite-difference rounding into huge ratios.
  double floor = 1e-6;
};

/// Compares `analytic` against central differences of (q[action] - target)^2,
/// parameter by parameter. Parameters whose +-step perturbation flips any
/// ReLU unit are skipped, since the loss is not differentiable across a kink.
GradientCheckResult compare_gradients(const QModel& model, std::span<const double> x,
                                      std::size_t action, double target, const Gradients& analytic,
                                      GradientCheckOptions options = {});

/// Backpropagates, then runs compare_gradients.
GradientCheckResult gradient_check(const QModel& model, std::span<const double> x,
                                   std::size_t action, double target,
                                   GradientCheckOptions options = {});

}  // namespace sentitrade::nn
