#include "debias/train.hpp"

#include "debias/permute.hpp"
#include "debias/rng.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace debias {

namespace {
constexpr std::uint64_t kEpochStream = 0xE9C4ULL;

double loss_value(const LossConfig& cfg, const Params& params, const Example& ex,
                  const PropensityMatrix* omega) {
  return joint_loss(cfg, score(params, ex.list), ex.truth, omega).value;
}
}  // namespace

InstanceGradient instance_gradient(const LossConfig& cfg, const Params& params,
                                   const Example& ex, const PropensityMatrix* omega) {
  const auto jac = score_gradient(params, ex.list);
  const Eigen::VectorXd s = jac.content * params.content_weights +
                            params.bias_scale * params.position_weights;
  const auto lv = joint_loss(cfg, s, ex.truth, omega);
  const auto g = backprop(jac, lv.grad_scores);
  return {lv.value, g.trainable()};
}

TrainReport train(const std::vector<Example>& dataset, const Params& init,
                  const TrainConfig& cfg, const PropensityMatrix* omega) {
  if (!(cfg.learning_rate >= 0.0) || cfg.epochs < 1 || cfg.batch_size < 1) {
    throw DataError("train: learning_rate >= 0, epochs >= 1 and batch_size >= 1 required");
  }
  if (uses_propensities(cfg.loss.variant) != (omega != nullptr)) {
    throw DataError(uses_propensities(cfg.loss.variant)
                        ? "train: loss variant requires propensities"
                        : "train: propensities given for a non-IPS loss variant");
  }
  const auto start = std::chrono::steady_clock::now();

  TrainReport report;
  report.seed = cfg.seed;
  Params params = init;
  Eigen::VectorXd theta = params.trainable();
  Eigen::VectorXd velocity = Eigen::VectorXd::Zero(theta.size());
  const RngStream epoch_base(cfg.seed, kEpochStream);

  std::vector<int> order(dataset.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    if (cfg.shuffle_each_epoch) {
      auto rng = epoch_base.child(static_cast<std::uint64_t>(epoch));
      order = shuffle_order(dataset.size(), rng);
    }
    double epoch_loss = 0.0;
    const auto batch = static_cast<std::size_t>(cfg.batch_size);
    for (std::size_t b0 = 0; b0 < order.size(); b0 += batch) {
      const std::size_t b1 = std::min(order.size(), b0 + batch);
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(theta.size());
      double batch_loss = 0.0;
      for (std::size_t j = b0; j < b1; ++j) {
        const auto ig = instance_gradient(cfg.loss, params,
                                          dataset[static_cast<std::size_t>(order[j])], omega);
        batch_loss += ig.value;
        grad += ig.grad;
      }
      if (!std::isfinite(batch_loss) || !grad.allFinite()) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1) +
                              ", batch " + std::to_string(b0 / batch + 1));
      }
      epoch_loss += batch_loss;
      grad /= static_cast<double>(b1 - b0);
      velocity = cfg.momentum * velocity + grad;
      theta -= cfg.learning_rate * velocity;
      if (!theta.allFinite()) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch + 1) +
                              ", batch " + std::to_string(b0 / batch + 1) +
                              ": non-finite parameters");
      }
      params.set_trainable(theta);
    }
    report.loss_curve.push_back(dataset.empty() ? 0.0
                                                : epoch_loss / static_cast<double>(dataset.size()));
  }
  if (!params.all_finite()) throw DivergenceError("training produced non-finite parameters");
  report.final_params = params;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

GradCheckReport grad_check(const LossConfig& cfg, const Params& params, const Example& ex,
                           const PropensityMatrix* omega, double h, double tol) {
  if (!(h > 0.0)) throw DataError("grad_check: h must be positive");
  GradCheckReport rep;
  rep.analytic = instance_gradient(cfg, params, ex, omega).grad;

  const Eigen::VectorXd theta = params.trainable();
  rep.numeric.resize(theta.size());
  Params probe = params;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd t = theta;
    t(i) = theta(i) + h;
    probe.set_trainable(t);
    const double up = loss_value(cfg, probe, ex, omega);
    t(i) = theta(i) - h;
    probe.set_trainable(t);
    const double down = loss_value(cfg, probe, ex, omega);
    rep.numeric(i) = (up - down) / (2.0 * h);
  }

  rep.max_abs_analytic = rep.analytic.cwiseAbs().maxCoeff();
  rep.max_abs_numeric = rep.numeric.cwiseAbs().maxCoeff();
  const double scale = std::max(rep.max_abs_analytic, rep.max_abs_numeric);
  rep.per_param_error = (rep.analytic - rep.numeric).cwiseAbs();
  if (scale > 0.0) rep.per_param_error /= scale;
  rep.max_rel_error = rep.per_param_error.maxCoeff();
  rep.passed = rep.max_rel_error < tol;
  return rep;
}

}  // namespace debias
