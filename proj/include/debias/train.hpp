#pragma once

#include "debias/core.hpp"
#include "debias/loss.hpp"
#include "debias/propensity.hpp"
#include "debias/scorer.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace debias {

/// Raised when training produces a non-finite loss.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 3;
  int batch_size = 8;
  LossConfig loss;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
  /// Heavy-ball momentum; 0 gives plain SGD.
  double momentum = 0.0;
};

struct TrainReport {
  std::vector<double> loss_curve;  ///< mean instance loss per epoch
  Params final_params;
  double wall_time = 0.0;  ///< seconds, informational only
  std::uint64_t seed = 0;
};

/// Loss of one instance and its gradient with respect to the trainable
/// parameters (packed as in ScorerParams::trainable()).
struct InstanceGradient {
  double value = 0.0;
  Eigen::VectorXd grad;
};

InstanceGradient instance_gradient(const LossConfig& cfg, const Params& params,
                                   const Example& ex, const PropensityMatrix* omega);

/// Mini-batch gradient descent on the mean instance loss. Epoch e visits the
/// data in the order drawn from RngStream(seed, .).child(e).
TrainReport train(const std::vector<Example>& dataset, const Params& init,
                  const TrainConfig& cfg, const PropensityMatrix* omega = nullptr);

struct GradCheckReport {
  Eigen::VectorXd analytic;
  Eigen::VectorXd numeric;
  Eigen::VectorXd per_param_error;  ///< |analytic - numeric| / scale
  double max_rel_error = 0.0;
  double max_abs_analytic = 0.0;
  double max_abs_numeric = 0.0;
  bool passed = false;
};

/// Compares the chain-rule parameter gradient with central differences.
/// Errors are relative to max(|analytic|_inf, |numeric|_inf).
GradCheckReport grad_check(const LossConfig& cfg, const Params& params, const Example& ex,
                           const PropensityMatrix* omega, double h, double tol);

}  // namespace debias
