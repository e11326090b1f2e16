#pragma once

// Ranking objectives over per-passage scores with analytic gradients.
//
//   lm_loss        Plackett-Luce negative log-likelihood of the true order
//   rank_loss      sum_{r(a) < r(b)} softplus(s_b - s_a) / (r(a) + r(b))
//   rank_ips_loss  rank_loss pair terms divided by omega[a, r(a)] * omega[b, r(b)]
//   joint_loss     lambda * {rank_loss | rank_ips_loss} + lm_loss
//
// r(.) is the true rank; a, b index input positions.

#include "debias/core.hpp"
#include "debias/propensity.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <string_view>

namespace debias {

enum class LossVariant { Rank, RankIPS, LM, First, DebiasFirst };

std::string_view to_string(LossVariant v);
LossVariant parse_loss_variant(std::string_view s);
bool uses_propensities(LossVariant v);

struct LossConfig {
  double lambda = 0.1;
  LossVariant variant = LossVariant::DebiasFirst;
};

template <typename Scalar>
struct LossValue {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Scalar value = Scalar(0);
  Vector grad_scores;

  LossValue& operator+=(const LossValue& o) {
    value += o.value;
    if (grad_scores.size() == 0) {
      grad_scores = o.grad_scores;
    } else {
      grad_scores += o.grad_scores;
    }
    return *this;
  }
  LossValue scaled(Scalar c) const { return {c * value, c * grad_scores}; }
};

namespace detail {

template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::abs, std::exp, std::log1p, std::max;
  return max(z, Scalar(0)) + log1p(exp(-abs(z)));
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

template <typename Derived>
void check_inputs(const Eigen::MatrixBase<Derived>& scores, const Ranking& truth) {
  if (truth.partial()) throw DataError("loss: truth ranking is incomplete");
  if (static_cast<std::size_t>(scores.size()) != truth.size()) {
    throw DataError("loss: " + std::to_string(scores.size()) + " scores for a ranking of " +
                    std::to_string(truth.size()));
  }
  if (!scores.allFinite()) throw DataError("loss: non-finite scores");
}

/// Shared pair loop; weight(a, b) returns the multiplier of softplus(s_b - s_a)
/// for the pair where a is ranked above b.
template <typename Derived, typename Weight>
auto pairwise(const Eigen::MatrixBase<Derived>& scores, const Ranking& truth, Weight weight) {
  using Scalar = typename Derived::Scalar;
  check_inputs(scores, truth);
  const auto k = scores.size();
  LossValue<Scalar> out{Scalar(0), Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(k)};
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      if (truth.rank_of(static_cast<std::size_t>(a)) >=
          truth.rank_of(static_cast<std::size_t>(b))) {
        continue;
      }
      const Scalar w = weight(a, b);
      const Scalar z = scores(b) - scores(a);
      out.value += w * softplus(z);
      const Scalar g = w * sigmoid(z);
      out.grad_scores(b) += g;
      out.grad_scores(a) -= g;
    }
  }
  return out;
}

}  // namespace detail

template <typename Derived>
auto lm_loss(const Eigen::MatrixBase<Derived>& scores, const Ranking& truth) {
  using Scalar = typename Derived::Scalar;
  using std::exp, std::log;
  detail::check_inputs(scores, truth);
  const auto k = scores.size();
  LossValue<Scalar> out{Scalar(0), Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(k)};
  const auto order = truth.order();
  for (std::size_t t = 0; t < order.size(); ++t) {
    Scalar m = scores(order[t]);
    for (std::size_t u = t + 1; u < order.size(); ++u) m = std::max(m, Scalar(scores(order[u])));
    Scalar sum(0);
    for (std::size_t u = t; u < order.size(); ++u) sum += exp(scores(order[u]) - m);
    const Scalar lse = m + log(sum);
    out.value += lse - scores(order[t]);
    for (std::size_t u = t; u < order.size(); ++u) {
      out.grad_scores(order[u]) += exp(scores(order[u]) - lse);
    }
    out.grad_scores(order[t]) -= Scalar(1);
  }
  return out;
}

template <typename Derived>
auto rank_loss(const Eigen::MatrixBase<Derived>& scores, const Ranking& truth) {
  using Scalar = typename Derived::Scalar;
  return detail::pairwise(scores, truth, [&](Eigen::Index a, Eigen::Index b) {
    return Scalar(1) / Scalar(truth.rank_of(static_cast<std::size_t>(a)) +
                              truth.rank_of(static_cast<std::size_t>(b)));
  });
}

/// input_positions[i] is the 1-based input position of scores(i); empty
/// means scores are already in input order.
template <typename Derived>
auto rank_ips_loss(const Eigen::MatrixBase<Derived>& scores, const Ranking& truth,
                   const PropensityMatrix& omega,
                   std::span<const int> input_positions = {}) {
  using Scalar = typename Derived::Scalar;
  const auto k = static_cast<Eigen::Index>(truth.size());
  if (!input_positions.empty() && static_cast<Eigen::Index>(input_positions.size()) != k) {
    throw DataError("rank_ips_loss: input_positions size mismatch");
  }
  auto pos = [&](Eigen::Index i) {
    return input_positions.empty() ? i : Eigen::Index(input_positions[static_cast<std::size_t>(i)] - 1);
  };
  if (omega.k() < k) {
    throw DataError("rank_ips_loss: propensity matrix is " + std::to_string(omega.k()) +
                    "x" + std::to_string(omega.k()) + ", need at least k=" + std::to_string(k));
  }
  auto prop = [&](Eigen::Index i) {
    const auto p = pos(i);
    if (p < 0 || p >= omega.k()) throw DataError("rank_ips_loss: input position out of range");
    const double w = omega(p, truth.rank_of(static_cast<std::size_t>(i)) - 1);
    if (!(w > 0.0)) throw DataError("unclamped propensity");
    return Scalar(w);
  };
  return detail::pairwise(scores, truth, [&](Eigen::Index a, Eigen::Index b) {
    const Scalar rank_sum(truth.rank_of(static_cast<std::size_t>(a)) +
                          truth.rank_of(static_cast<std::size_t>(b)));
    return Scalar(1) / (rank_sum * prop(a) * prop(b));
  });
}

/// omega is required for RankIPS and DebiasFirst.
template <typename Derived>
auto joint_loss(const LossConfig& cfg, const Eigen::MatrixBase<Derived>& scores,
                const Ranking& truth, const PropensityMatrix* omega = nullptr,
                std::span<const int> input_positions = {}) {
  using Scalar = typename Derived::Scalar;
  if (uses_propensities(cfg.variant) && omega == nullptr) {
    throw DataError("loss variant " + std::string(to_string(cfg.variant)) +
                    " requires a propensity matrix");
  }
  const Scalar lambda(cfg.lambda);
  switch (cfg.variant) {
    case LossVariant::Rank: return rank_loss(scores, truth);
    case LossVariant::RankIPS: return rank_ips_loss(scores, truth, *omega, input_positions);
    case LossVariant::LM: return lm_loss(scores, truth);
    case LossVariant::First: {
      auto v = rank_loss(scores, truth).scaled(lambda);
      return v += lm_loss(scores, truth);
    }
    case LossVariant::DebiasFirst: {
      auto v = rank_ips_loss(scores, truth, *omega, input_positions).scaled(lambda);
      return v += lm_loss(scores, truth);
    }
  }
  throw DataError("unknown loss variant");
}

}  // namespace debias
