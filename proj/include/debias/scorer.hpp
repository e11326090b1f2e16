#pragma once

// Linear relevance scorer with an explicit additive per-position pathway.
//
//   score_i = <content_weights, x_i> + bias_scale * position_weights_i
//
// position_weights are trainable; bias_scale is a fixed experiment knob that
// sets how strongly the position pathway reaches the scores.

#include "debias/core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace debias {

template <typename Scalar>
struct ScorerParams {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector content_weights;
  Vector position_weights;
  Scalar bias_scale = Scalar(0);

  Eigen::Index dim() const { return content_weights.size(); }
  Eigen::Index window() const { return position_weights.size(); }

  /// Trainable parameters packed as [content_weights; position_weights].
  Eigen::Index num_trainable() const { return dim() + window(); }

  Vector trainable() const {
    Vector theta(num_trainable());
    theta << content_weights, position_weights;
    return theta;
  }

  void set_trainable(const Eigen::Ref<const Vector>& theta) {
    content_weights = theta.head(dim());
    position_weights = theta.tail(window());
  }

  bool all_finite() const {
    return content_weights.allFinite() && position_weights.allFinite() &&
           Eigen::numext::isfinite(bias_scale);
  }

  template <typename Other>
  ScorerParams<Other> cast() const {
    return {content_weights.template cast<Other>(), position_weights.template cast<Other>(),
            static_cast<Other>(bias_scale)};
  }

  friend bool operator==(const ScorerParams& a, const ScorerParams& b) {
    return a.bias_scale == b.bias_scale && a.content_weights == b.content_weights &&
           a.position_weights == b.position_weights;
  }
};

using Params = ScorerParams<double>;

/// Zero content weights, position prior -strength * (i-1)/(k-1) (strictly
/// decreasing for strength > 0).
Params make_params(Eigen::Index d, Eigen::Index k, double bias_scale,
                   double prior_strength = 0.0);

/// Scores for a k x d feature matrix.
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> score(const ScorerParams<Scalar>& params,
                                              const Eigen::MatrixBase<Derived>& features) {
  if (features.cols() != params.dim() || features.rows() != params.window()) {
    throw DataError("score: expected " + std::to_string(params.window()) + "x" +
                    std::to_string(params.dim()) + " features, got " +
                    std::to_string(features.rows()) + "x" + std::to_string(features.cols()));
  }
  if (!features.allFinite()) throw DataError("score: non-finite features");
  return features.template cast<Scalar>() * params.content_weights +
         params.bias_scale * params.position_weights;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> score(const ScorerParams<Scalar>& params,
                                              const CandidateList& list) {
  return score(params, list.feature_matrix());
}

/// d score_i / d theta, split by parameter block.
template <typename Scalar>
struct ScoreJacobian {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> content;   ///< k x d
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> position;  ///< k x k
};

template <typename Scalar>
ScoreJacobian<Scalar> score_gradient(const ScorerParams<Scalar>& params,
                                     const CandidateList& list) {
  const Eigen::MatrixXd x = list.feature_matrix();
  score(params, x);  // dimension and finiteness checks
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  return {x.cast<Scalar>(), params.bias_scale * Matrix::Identity(x.rows(), x.rows())};
}

/// Chain rule: parameter gradient of a loss given dL/dscores.
template <typename Scalar, typename Derived>
ScorerParams<Scalar> backprop(const ScoreJacobian<Scalar>& jac,
                              const Eigen::MatrixBase<Derived>& grad_scores) {
  return {jac.content.transpose() * grad_scores, jac.position.transpose() * grad_scores,
          Scalar(0)};
}

struct SynthConfig {
  int num_queries = 1000;
  int k = 20;
  int d = 8;
  /// P(relevant at input position i) proportional to exp(-skew * (i-1)).
  double relevance_position_skew = 0.0;
  /// The relevant passage takes the largest grade, the others the smallest.
  std::vector<int> label_grades{0, 1};
  double noise_sigma = 1.0;
  std::uint64_t seed = 0;
  /// Index of the first generated query. Splits drawn from one seed share
  /// the relevance direction; disjoint index ranges give disjoint queries.
  int first_query = 0;
};

struct SynthDataset {
  std::vector<Example> examples;
  RelevanceJudgments judgments;
  Eigen::VectorXd direction;  ///< unit ground-truth relevance direction
};

/// Gaussian features with the relevant passage shifted by grade * direction.
/// The true permutation orders by grade, then by the projection of the
/// features on the direction (the latent relevance), then input position.
SynthDataset synth_generate(const SynthConfig& cfg);

/// 1-based input position of the relevant passage for each query.
std::vector<int> relevant_positions(const SynthDataset& data);

}  // namespace debias
