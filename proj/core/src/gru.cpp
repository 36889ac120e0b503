#include "tmcf/gru.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "tmcf/errors.hpp"

namespace tmcf {

GruConfig GruConfig::paper() { return GruConfig{}; }

GruConfig GruConfig::desk() {
  GruConfig c;
  c.hidden_size = 16;
  c.epochs = 30;
  c.profile = "desk";
  return c;
}

GruConfig GruConfig::from_profile(std::string_view name) {
  if (name == "paper") return paper();
  if (name == "desk") return desk();
  throw ConfigError("unknown profile '" + std::string(name) + "' (expected paper or desk)");
}

void GruConfig::validate() const {
  if (hidden_size == 0) throw ConfigError("hidden_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (patience == 0) throw ConfigError("patience must be positive");
  if (!(min_delta >= 0.0)) throw ConfigError("min_delta must be nonnegative");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined state.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

GruModel::GruModel(std::size_t input_size, std::size_t hidden_size, std::size_t output_size)
    : input_(input_size), hidden_(hidden_size), output_(output_size) {
  if (input_size == 0 || hidden_size == 0 || output_size == 0) throw ConfigError("GRU dimensions must be positive");
  Eigen::Index total = 0;
  for (const auto& t : tensors()) total += t.rows * t.cols;
  params_ = Eigen::VectorXd::Zero(total);
}

std::vector<GruModel::Tensor> GruModel::tensors() const {
  const auto d = static_cast<Eigen::Index>(input_);
  const auto h = static_cast<Eigen::Index>(hidden_);
  const auto o = static_cast<Eigen::Index>(output_);
  std::vector<Tensor> out;
  Eigen::Index offset = 0;
  auto add = [&](std::string_view name, Eigen::Index rows, Eigen::Index cols) {
    out.push_back({name, offset, rows, cols});
    offset += rows * cols;
  };
  add("w_input", 3 * h, d);
  add("w_hidden", 3 * h, h);
  add("b_input", 3 * h, 1);
  add("b_hidden", 3 * h, 1);
  add("w_out", o, h);
  add("b_out", o, 1);
  return out;
}

GruModel::MatrixMap GruModel::map(std::size_t idx) {
  const auto t = tensors()[idx];
  return {params_.data() + t.offset, t.rows, t.cols};
}

GruModel::ConstMatrixMap GruModel::cmap(std::size_t idx) const {
  const auto t = tensors()[idx];
  return {params_.data() + t.offset, t.rows, t.cols};
}

void GruModel::init_uniform(std::uint64_t seed) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < params_.size(); ++i) params_[i] = dist(rng);
}

namespace {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;

ArrayXXd sigmoid(const ArrayXXd& x) { return 1.0 / (1.0 + (-x).exp()); }

struct StepCache {
  MatrixXd h_prev;
  ArrayXXd r, z, n, hn;
};

struct ForwardPass {
  std::vector<MatrixXd> inputs;  // per step, input x batch
  std::vector<StepCache> steps;
  MatrixXd h_last;
  MatrixXd output;
};

// Gathers per-step input matrices for the selected samples.
std::vector<MatrixXd> gather_inputs(const WindowedDataset& data, std::span<const std::size_t> samples) {
  const auto b = static_cast<Eigen::Index>(samples.size());
  std::vector<MatrixXd> xs(data.history, MatrixXd(static_cast<Eigen::Index>(data.width), b));
  for (Eigen::Index col = 0; col < b; ++col) {
    const std::size_t s = samples[static_cast<std::size_t>(col)];
    for (std::size_t step = 0; step < data.history; ++step) {
      const double* row = data.inputs.data() + (s * data.history + step) * data.width;
      for (std::size_t k = 0; k < data.width; ++k) xs[step](static_cast<Eigen::Index>(k), col) = row[k];
    }
  }
  return xs;
}

ForwardPass run_forward(const GruModel& model, std::vector<MatrixXd> inputs, bool keep_cache) {
  const auto h = static_cast<Eigen::Index>(model.hidden_size());
  const Eigen::Index b = inputs.empty() ? 0 : inputs.front().cols();
  const auto wi = model.w_input();
  const auto wh = model.w_hidden();
  const Eigen::VectorXd bi = model.b_input();
  const Eigen::VectorXd bh = model.b_hidden();

  ForwardPass pass;
  MatrixXd hidden = MatrixXd::Zero(h, b);
  if (keep_cache) pass.steps.reserve(inputs.size());
  for (const auto& x : inputs) {
    MatrixXd gi = wi * x;
    gi.colwise() += bi;
    MatrixXd gh = wh * hidden;
    gh.colwise() += bh;
    ArrayXXd r = sigmoid(gi.topRows(h).array() + gh.topRows(h).array());
    ArrayXXd z = sigmoid(gi.middleRows(h, h).array() + gh.middleRows(h, h).array());
    ArrayXXd hn = gh.bottomRows(h).array();
    ArrayXXd n = (gi.bottomRows(h).array() + r * hn).tanh();
    MatrixXd next = ((1.0 - z) * n + z * hidden.array()).matrix();
    if (keep_cache) pass.steps.push_back({std::move(hidden), std::move(r), std::move(z), std::move(n), std::move(hn)});
    hidden = std::move(next);
  }
  pass.output = model.w_out() * hidden;
  pass.output.colwise() += Eigen::VectorXd(model.b_out());
  pass.h_last = std::move(hidden);
  if (keep_cache) pass.inputs = std::move(inputs);
  return pass;
}

void check_shapes(const GruModel& model, const WindowedDataset& data) {
  if (data.width != model.input_size() || data.width != model.output_size()) {
    throw DataError("dataset width " + std::to_string(data.width) + " does not match model (" +
                    std::to_string(model.input_size()) + " in, " + std::to_string(model.output_size()) + " out)");
  }
  if (data.history == 0) throw DataError("dataset history must be at least one step");
}

}  // namespace

Eigen::VectorXd gru_forward(const GruModel& model, std::span<const double> sequence, std::size_t steps) {
  if (steps == 0) throw DataError("gru_forward: empty input sequence");
  if (sequence.size() != steps * model.input_size()) throw DataError("gru_forward: input shape mismatch");
  for (const double v : sequence) {
    if (!std::isfinite(v)) throw NumericalError("gru_forward: non-finite input");
  }
  std::vector<MatrixXd> xs(steps, MatrixXd(static_cast<Eigen::Index>(model.input_size()), 1));
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t k = 0; k < model.input_size(); ++k) {
      xs[t](static_cast<Eigen::Index>(k), 0) = sequence[t * model.input_size() + k];
    }
  }
  return run_forward(model, std::move(xs), false).output.col(0);
}

Eigen::MatrixXd gru_forward(const GruModel& model, const WindowedDataset& data, std::size_t first, std::size_t count) {
  check_shapes(model, data);
  if (first + count > data.samples) throw DataError("gru_forward: sample range out of bounds");
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), first);
  return run_forward(model, gather_inputs(data, idx), false).output;
}

double gru_loss(const GruModel& model, const WindowedDataset& data, std::span<const std::size_t> samples,
                Eigen::VectorXd* grad) {
  check_shapes(model, data);
  if (samples.empty()) throw DataError("gru_loss: empty batch");
  const auto h = static_cast<Eigen::Index>(model.hidden_size());
  const auto b = static_cast<Eigen::Index>(samples.size());
  const auto d = static_cast<Eigen::Index>(data.width);

  ForwardPass pass = run_forward(model, gather_inputs(data, samples), grad != nullptr);
  MatrixXd target(d, b);
  for (Eigen::Index col = 0; col < b; ++col) {
    const double* row = data.targets.data() + samples[static_cast<std::size_t>(col)] * data.width;
    for (Eigen::Index k = 0; k < d; ++k) target(k, col) = row[k];
  }
  const MatrixXd diff = pass.output - target;
  const double denom = static_cast<double>(b * d);
  const double loss = diff.squaredNorm() / denom;
  if (grad == nullptr) return loss;

  GruModel g(model.input_size(), model.hidden_size(), model.output_size());
  auto gwi = g.w_input();
  auto gwh = g.w_hidden();
  auto gbi = g.b_input();
  auto gbh = g.b_hidden();
  const auto wh = model.w_hidden();

  const MatrixXd dy = (2.0 / denom) * diff;
  g.w_out() = dy * pass.h_last.transpose();
  g.b_out() = dy.rowwise().sum();
  MatrixXd dh = model.w_out().transpose() * dy;

  MatrixXd dgi(3 * h, b);
  MatrixXd dgh(3 * h, b);
  for (std::size_t t = pass.steps.size(); t-- > 0;) {
    const StepCache& c = pass.steps[t];
    const ArrayXXd dha = dh.array();
    const ArrayXXd dn = dha * (1.0 - c.z);
    const ArrayXXd dz = dha * (c.h_prev.array() - c.n);
    const ArrayXXd dan = dn * (1.0 - c.n.square());
    const ArrayXXd dr = dan * c.hn;
    dgi.topRows(h) = (dr * c.r * (1.0 - c.r)).matrix();
    dgi.middleRows(h, h) = (dz * c.z * (1.0 - c.z)).matrix();
    dgi.bottomRows(h) = dan.matrix();
    dgh.topRows(2 * h) = dgi.topRows(2 * h);
    dgh.bottomRows(h) = (dan * c.r).matrix();

    gwi.noalias() += dgi * pass.inputs[t].transpose();
    gbi += dgi.rowwise().sum();
    gwh.noalias() += dgh * c.h_prev.transpose();
    gbh += dgh.rowwise().sum();
    dh = (dha * c.z).matrix();
    dh.noalias() += wh.transpose() * dgh;
  }
  *grad = std::move(g.parameters());
  return loss;
}

double gru_mse(const GruModel& model, const WindowedDataset& data, std::size_t batch_size) {
  if (data.samples == 0) throw DataError("gru_mse: empty dataset");
  double total = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t first = 0; first < data.samples; first += batch_size) {
    const std::size_t count = std::min(batch_size, data.samples - first);
    idx.resize(count);
    std::iota(idx.begin(), idx.end(), first);
    total += gru_loss(model, data, idx, nullptr) * static_cast<double>(count);
  }
  return total / static_cast<double>(data.samples);
}

AdamOptimizer::AdamOptimizer(Eigen::Index size, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(Eigen::VectorXd::Zero(size)),
      v_(Eigen::VectorXd::Zero(size)) {}

void AdamOptimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
}

TrainResult train(const GruConfig& config, const WindowedDataset& train_data, const WindowedDataset& val_data) {
  config.validate();
  if (train_data.samples == 0) throw DataError("train: empty training set");
  if (val_data.samples > 0 && (val_data.width != train_data.width || val_data.history != train_data.history)) {
    throw DataError("train: validation shape differs from training shape");
  }
  const auto started = std::chrono::steady_clock::now();

  TrainResult result{GruModel(train_data.width, config.hidden_size, train_data.width), {}};
  GruModel& model = result.model;
  TrainReport& report = result.report;
  report.seed = config.seed;
  model.init_uniform(mix_seed(config.seed, 0));

  const bool monitor_val = val_data.samples > 0;
  AdamOptimizer adam(model.parameters().size(), config.learning_rate);
  std::mt19937_64 shuffle_rng(mix_seed(config.seed, 1));
  std::vector<std::size_t> order(train_data.samples);
  std::iota(order.begin(), order.end(), 0);

  Eigen::VectorXd best_params = model.parameters();
  double best = std::numeric_limits<double>::infinity();
  std::size_t wait = 0;
  Eigen::VectorXd grad;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t first = 0; first < order.size(); first += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - first);
      const std::span<const std::size_t> batch(order.data() + first, count);
      const double loss = gru_loss(model, train_data, batch, &grad);
      if (!std::isfinite(loss) || !grad.allFinite()) {
        throw NumericalError("train: non-finite loss in epoch " + std::to_string(epoch + 1) + " (seed " +
                             std::to_string(config.seed) + ")");
      }
      adam.step(model.parameters(), grad);
      epoch_loss += loss * static_cast<double>(count);
    }
    if (!model.all_finite()) throw NumericalError("train: parameters diverged in epoch " + std::to_string(epoch + 1));
    report.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
    const double monitored = monitor_val ? gru_mse(model, val_data) : gru_mse(model, train_data);
    if (!std::isfinite(monitored)) throw NumericalError("train: non-finite validation loss");
    report.val_loss.push_back(monitored);
    report.epochs_run = epoch + 1;

    if (best - monitored > config.min_delta) {
      best = monitored;
      best_params = model.parameters();
      report.best_epoch = epoch + 1;
      wait = 0;
    } else if (++wait >= config.patience) {
      report.stopped_early = true;
      break;
    }
  }

  model.parameters() = best_params;
  report.best_val_loss = best;
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace tmcf
