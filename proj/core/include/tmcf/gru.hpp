#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tmcf/dataset.hpp"

namespace tmcf {

struct GruConfig {
  std::size_t hidden_size = 200;
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  std::size_t patience = 5;
  double min_delta = 1e-5;
  std::uint64_t seed = 0;
  std::string profile = "paper";

  static GruConfig paper();
  /// Reduced model for minutes-long runs: hidden 16, 30 epochs.
  static GruConfig desk();
  static GruConfig from_profile(std::string_view name);

  void validate() const;
};

/// One-layer gated recurrent cell followed by an affine readout of the final
/// hidden state. Gate rows are stacked reset, update, candidate:
///
///   r = sigmoid(Wi_r x + bi_r + Wh_r h + bh_r)
///   z = sigmoid(Wi_z x + bi_z + Wh_z h + bh_z)
///   n = tanh(Wi_n x + bi_n + r * (Wh_n h + bh_n))
///   h' = (1 - z) * n + z * h
///   y = Wo h_last + bo
///
/// All parameters live in one flat vector; the accessors are views into it.
class GruModel {
 public:
  using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
  using VectorMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  struct Tensor {
    std::string_view name;
    Eigen::Index offset;
    Eigen::Index rows;
    Eigen::Index cols;
  };

  GruModel() = default;
  /// Zero-initialised parameters.
  GruModel(std::size_t input_size, std::size_t hidden_size, std::size_t output_size);

  std::size_t input_size() const noexcept { return input_; }
  std::size_t hidden_size() const noexcept { return hidden_; }
  std::size_t output_size() const noexcept { return output_; }

  /// Uniform in [-1/sqrt(hidden), 1/sqrt(hidden)].
  void init_uniform(std::uint64_t seed);

  Eigen::VectorXd& parameters() noexcept { return params_; }
  const Eigen::VectorXd& parameters() const noexcept { return params_; }
  std::vector<Tensor> tensors() const;

  MatrixMap w_input() { return map(0); }
  MatrixMap w_hidden() { return map(1); }
  MatrixMap b_input() { return map(2); }
  MatrixMap b_hidden() { return map(3); }
  MatrixMap w_out() { return map(4); }
  MatrixMap b_out() { return map(5); }
  ConstMatrixMap w_input() const { return cmap(0); }
  ConstMatrixMap w_hidden() const { return cmap(1); }
  ConstMatrixMap b_input() const { return cmap(2); }
  ConstMatrixMap b_hidden() const { return cmap(3); }
  ConstMatrixMap w_out() const { return cmap(4); }
  ConstMatrixMap b_out() const { return cmap(5); }

  bool all_finite() const { return params_.allFinite(); }

 private:
  MatrixMap map(std::size_t idx);
  ConstMatrixMap cmap(std::size_t idx) const;

  std::size_t input_ = 0;
  std::size_t hidden_ = 0;
  std::size_t output_ = 0;
  Eigen::VectorXd params_;
};

/// Prediction for one history of `steps` rows of width input_size, row-major.
Eigen::VectorXd gru_forward(const GruModel& model, std::span<const double> sequence, std::size_t steps);

/// Predictions for samples [first, first + count) of a dataset, one column
/// per sample.
Eigen::MatrixXd gru_forward(const GruModel& model, const WindowedDataset& data, std::size_t first, std::size_t count);

/// Mean squared error over the selected samples and all outputs. When `grad`
/// is non-null it receives d(loss)/d(parameters), same layout as parameters().
double gru_loss(const GruModel& model, const WindowedDataset& data, std::span<const std::size_t> samples,
                Eigen::VectorXd* grad);

/// Mean squared error over every sample, evaluated in batches.
double gru_mse(const GruModel& model, const WindowedDataset& data, std::size_t batch_size = 256);

class AdamOptimizer {
 public:
  AdamOptimizer(Eigen::Index size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  std::uint64_t steps() const noexcept { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  Eigen::VectorXd m_, v_;
};

struct TrainReport {
  std::size_t epochs_run = 0;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  bool stopped_early = false;
  std::size_t best_epoch = 0;  // 1-based
  double best_val_loss = 0.0;
  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string init = "uniform(+-1/sqrt(hidden))";
};

struct TrainResult {
  GruModel model;
  TrainReport report;
};

/// Adam on shuffled mini-batches with early stopping on validation MSE. The
/// returned model carries the best-validation parameters. When `val` is
/// empty the training loss is monitored instead.
TrainResult train(const GruConfig& config, const WindowedDataset& train_data, const WindowedDataset& val_data);

/// Stream-splitting hash used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace tmcf
