#pragma once

// Inference-side machinery: windowed reranking with fallback completion,
// sliding windows, reciprocal rank fusion and Kemeny aggregation.

#include "debias/core.hpp"
#include "debias/rng.hpp"
#include "debias/scorer.hpp"

#include <Eigen/Dense>

#include <vector>

namespace debias {

struct WindowConfig {
  int window_size = 20;
  int step = 10;
};

struct FusionInput {
  std::vector<Ranking> rankings;
  double rrf_c = 60.0;
};

/// Deterministic sort by (-score, input position).
Ranking rank_by_scores(const Eigen::Ref<const Eigen::VectorXd>& scores);

/// Each passage independently fails with probability p_fail (one uniform
/// draw per passage from rng); survivors are sorted by score and failures
/// appended in input order. rng may be null only when p_fail == 0.
Ranking rerank_window(const Params& params, const CandidateList& list, double p_fail = 0.0,
                      RngStream* rng = nullptr);

/// Windows of cfg.window_size move from the bottom of the list to the top
/// with stride cfg.step; each is reranked in place.
Ranking sliding_window_rerank(const Params& params, const CandidateList& full_list,
                              const WindowConfig& cfg);

/// rerank_window when the list fits the scorer's window, sliding windows of
/// the scorer's size otherwise. step 0 means half the window.
Ranking rerank(const Params& params, const CandidateList& list, double p_fail = 0.0,
               RngStream* rng = nullptr, int step = 0);

/// Per input index: sum over rankings of 1 / (c + rank).
Eigen::VectorXd rrf_scores(const FusionInput& inp);

/// Descending RRF score; ties go to the better rank in the first ranking.
Ranking rrf_fuse(const FusionInput& inp);

/// Sum of Kendall tau distances from `candidate` to every input ranking.
long kemeny_cost(const Ranking& candidate, const std::vector<Ranking>& rankings);

/// Borda order (mean rank ascending, ties by the first ranking).
Ranking borda(const FusionInput& inp);

/// Borda initialization refined by adjacent transpositions until no swap
/// lowers the total Kendall distance.
Ranking kemeny_local_search(const FusionInput& inp);

/// Central ranking minimizing total Kendall tau distance: exhaustive for
/// k <= exact_limit, kemeny_local_search otherwise.
Ranking permsc_aggregate(const FusionInput& inp, int exact_limit = 8);

}  // namespace debias
