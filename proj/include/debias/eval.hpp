#pragma once

// NDCG@k and the measurement protocols built on it: controlled positional
// sweeps, original vs shuffled order evaluation and run-level variance.

#include "debias/core.hpp"
#include "debias/rng.hpp"
#include "debias/scorer.hpp"

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace debias {

/// DCG = sum_{r <= k_cut} (2^grade - 1) / log2(r + 1), normalized by the DCG
/// of the ideal ordering of the same list. Lists without a relevant passage
/// score 0.
double ndcg_at_k(const Ranking& ranking, const CandidateList& list,
                 const RelevanceJudgments& judgments, int k_cut = 10);

struct SweepResult {
  Eigen::VectorXd per_position_ndcg;  ///< entry p-1: mean NDCG with relevant at p
  double variance = 0.0;              ///< population variance of the entries
  int num_queries = 0;
};

/// Population variance (divide by n).
double population_variance(const Eigen::Ref<const Eigen::VectorXd>& v);

SweepResult positional_sweep(const Params& params, std::span<const CandidateList> lists,
                             const RelevanceJudgments& judgments, int k_cut = 10);
SweepResult positional_sweep(const Params& params, std::span<const Example> dataset,
                             const RelevanceJudgments& judgments, int k_cut = 10);

enum class OrderMode { Original, Shuffled };
std::string_view to_string(OrderMode m);
OrderMode parse_order_mode(std::string_view s);

struct EvalReport {
  double mean_ndcg_at_10 = 0.0;
  std::map<std::string, double> per_query;
  OrderMode order_mode = OrderMode::Original;
  std::optional<std::uint64_t> seed;
  std::vector<RunRecord> run;  ///< reranked output, in query order
};

struct EvalOptions {
  OrderMode mode = OrderMode::Original;
  /// Required for shuffled mode; query i is shuffled with rng->child(i).
  const RngStream* rng = nullptr;
  double p_fail = 0.0;
  int k_cut = 10;
  int window_step = 0;  ///< sliding-window stride for long lists, 0 = half the window
  std::string tag = "debias";
};

EvalReport evaluate(const Params& params, std::span<const CandidateList> lists,
                    const RelevanceJudgments& judgments, const EvalOptions& opts);
EvalReport evaluate(const Params& params, std::span<const Example> dataset,
                    const RelevanceJudgments& judgments, const EvalOptions& opts);

/// Population variance of the report means, in NDCG percentage points.
double run_variance(std::span<const EvalReport> reports);

/// Run records for one reranked window (score = number of passages - rank + 1).
std::vector<RunRecord> to_run(const CandidateList& list, const Ranking& ranking,
                              const std::string& tag);

/// NDCG@k per query of a run; the ideal ordering is taken over the run's own
/// passages for that query.
std::map<std::string, double> evaluate_run(std::span<const RunRecord> run,
                                           const RelevanceJudgments& judgments,
                                           int k_cut = 10);

double mean_of(const std::map<std::string, double>& per_query);

enum class Aggregation { Kemeny, RRF };
std::string_view to_string(Aggregation a);
Aggregation parse_aggregation(std::string_view s);

/// Fuses several runs query by query. Every run must hold the same passage
/// set per query; rankings are indexed by the first run's order.
std::vector<RunRecord> aggregate_runs(const std::vector<std::vector<RunRecord>>& runs,
                                      Aggregation method, const std::string& tag,
                                      int exact_limit = 8, double rrf_c = 60.0);

}  // namespace debias
