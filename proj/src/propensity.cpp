#include "debias/propensity.hpp"

namespace debias {

TransitionCounts& TransitionCounts::operator+=(const TransitionCounts& other) {
  if (counts.size() == 0) return *this = other;
  if (other.counts.rows() != counts.rows() ||
      other.shuffles_per_query != shuffles_per_query) {
    throw DataError("cannot merge transition counts of different shape");
  }
  counts += other.counts;
  total_queries += other.total_queries;
  return *this;
}

PropensityMatrix PropensityMatrix::from_values(Eigen::MatrixXd omega) {
  PropensityMatrix p;
  p.unclamped = omega;
  p.epsilon_floor = omega.size() ? omega.minCoeff() : 0.0;
  p.omega = std::move(omega);
  return p;
}

PropensityMatrix PropensityMatrix::uniform(Eigen::Index k) {
  const double v = 1.0 / static_cast<double>(k * k);
  return from_values(Eigen::MatrixXd::Constant(k, k, v));
}

namespace {

template <typename Range, typename ListOf, typename RankingOf>
TransitionCounts count_impl(const Range& observations, long long shuffles_per_query,
                            ListOf list_of, RankingOf ranking_of) {
  if (shuffles_per_query <= 0) throw DataError("shuffles_per_query must be positive");
  TransitionCounts tc;
  tc.shuffles_per_query = shuffles_per_query;
  if (observations.empty()) {
    tc.counts = CountMatrix::Zero(0, 0);
    return tc;
  }
  const auto k = static_cast<Eigen::Index>(ranking_of(observations.front()).size());
  tc.counts = CountMatrix::Zero(k, k);
  for (const auto& obs : observations) {
    const auto& list = list_of(obs);
    const auto& r = ranking_of(obs);
    if (static_cast<Eigen::Index>(r.size()) != k ||
        static_cast<Eigen::Index>(list.size()) != k) {
      throw DataError("count_transitions: inconsistent k (expected " + std::to_string(k) +
                      ", query " + list.query_id + " has " + std::to_string(r.size()) + ")");
    }
    const Ranking full = r.partial() ? complete_ranking(r, list) : r;
    for (Eigen::Index i = 0; i < k; ++i) {
      ++tc.counts(i, full.rank_of(static_cast<std::size_t>(i)) - 1);
    }
  }
  const auto n_obs = static_cast<long long>(observations.size());
  tc.total_queries = n_obs / shuffles_per_query;
  if (tc.total_queries * shuffles_per_query != n_obs) {
    throw DataError("observation count " + std::to_string(n_obs) +
                    " is not a multiple of shuffles_per_query");
  }
  return tc;
}

}  // namespace

TransitionCounts count_transitions(
    const std::vector<std::pair<CandidateList, Ranking>>& observations,
    long long shuffles_per_query) {
  return count_impl(
      observations, shuffles_per_query, [](const auto& o) -> const CandidateList& { return o.first; },
      [](const auto& o) -> const Ranking& { return o.second; });
}

TransitionCounts count_transitions(const std::vector<Example>& observations,
                                   long long shuffles_per_query) {
  return count_impl(
      observations, shuffles_per_query,
      [](const Example& e) -> const CandidateList& { return e.list; },
      [](const Example& e) -> const Ranking& { return e.truth; });
}

PropensityMatrix estimate_propensities(const TransitionCounts& counts) {
  const double denom = static_cast<double>(counts.total_queries) *
                       static_cast<double>(counts.k()) *
                       static_cast<double>(counts.shuffles_per_query);
  if (!(denom > 0.0)) {
    throw DataError("estimate_propensities: |Q|*k*n is zero");
  }
  PropensityMatrix p;
  p.unclamped = counts.counts.cast<double>() / denom;
  p.epsilon_floor = 1.0 / denom;
  p.omega = p.unclamped.cwiseMax(p.epsilon_floor);
  return p;
}

std::vector<HeatmapCell> propensity_heatmap(const TransitionCounts& counts) {
  std::vector<HeatmapCell> cells;
  cells.reserve(static_cast<std::size_t>(counts.counts.size()));
  for (Eigen::Index i = 0; i < counts.counts.rows(); ++i) {
    for (Eigen::Index r = 0; r < counts.counts.cols(); ++r) {
      cells.push_back({static_cast<int>(i) + 1, static_cast<int>(r) + 1, counts.counts(i, r)});
    }
  }
  return cells;
}

}  // namespace debias
