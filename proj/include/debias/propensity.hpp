#pragma once

// Transition counting and propensity estimation for inverse propensity
// scoring. Cell (i, r) of every matrix refers to input position i+1 and
// output rank r+1.

#include "debias/core.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace debias {

using CountMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

struct TransitionCounts {
  CountMatrix counts;
  long long total_queries = 0;
  long long shuffles_per_query = 1;

  Eigen::Index k() const { return counts.rows(); }
  long long observations() const { return total_queries * shuffles_per_query; }

  /// Merge partial counts. Sizes and shuffles_per_query must agree.
  TransitionCounts& operator+=(const TransitionCounts& other);
};

struct PropensityMatrix {
  Eigen::MatrixXd omega;        ///< clamped, every entry >= epsilon_floor
  Eigen::MatrixXd unclamped;    ///< counts / (|Q| k n)
  double epsilon_floor = 0.0;

  Eigen::Index k() const { return omega.rows(); }
  double operator()(Eigen::Index input, Eigen::Index rank) const {
    return omega(input, rank);
  }

  /// Builds a propensity matrix from explicit values (no clamping applied).
  static PropensityMatrix from_values(Eigen::MatrixXd omega);
  /// Every cell 1/k^2.
  static PropensityMatrix uniform(Eigen::Index k);
};

/// Tallies input-position -> output-rank transitions. Partial rankings are
/// completed first. |Q| is observations / shuffles_per_query.
TransitionCounts count_transitions(const std::vector<std::pair<CandidateList, Ranking>>& observations,
                                   long long shuffles_per_query = 1);
TransitionCounts count_transitions(const std::vector<Example>& observations,
                                   long long shuffles_per_query = 1);

/// omega = counts / (|Q| k n), clamped below at 1/(|Q| k n).
PropensityMatrix estimate_propensities(const TransitionCounts& counts);

struct HeatmapCell {
  int input_position;
  int output_rank;
  long long count;
};

/// Dense k^2 table in row-major order.
std::vector<HeatmapCell> propensity_heatmap(const TransitionCounts& counts);

}  // namespace debias
