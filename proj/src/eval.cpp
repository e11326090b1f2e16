#include "debias/eval.hpp"

#include "debias/permute.hpp"
#include "debias/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace debias {

namespace {

double dcg(const std::vector<int>& grades_in_rank_order, int k_cut) {
  double total = 0.0;
  const auto n = std::min<std::size_t>(grades_in_rank_order.size(), static_cast<std::size_t>(k_cut));
  for (std::size_t r = 0; r < n; ++r) {
    total += (std::exp2(grades_in_rank_order[r]) - 1.0) / std::log2(static_cast<double>(r) + 2.0);
  }
  return total;
}

double ndcg_from_grades(std::vector<int> grades_in_rank_order, int k_cut) {
  const double actual = dcg(grades_in_rank_order, k_cut);
  std::sort(grades_in_rank_order.begin(), grades_in_rank_order.end(), std::greater<>());
  const double ideal = dcg(grades_in_rank_order, k_cut);
  return ideal > 0.0 ? actual / ideal : 0.0;
}

}  // namespace

double ndcg_at_k(const Ranking& ranking, const CandidateList& list,
                 const RelevanceJudgments& judgments, int k_cut) {
  if (k_cut < 1) throw DataError("ndcg: k_cut must be >= 1");
  if (ranking.size() != list.size()) throw DataError("ndcg: ranking/list size mismatch");
  std::vector<int> grades;
  grades.reserve(list.size());
  for (int idx : ranking.order()) {
    grades.push_back(judgments.grade(list.query_id,
                                     list.passages[static_cast<std::size_t>(idx)].passage_id));
  }
  return ndcg_from_grades(std::move(grades), k_cut);
}

double population_variance(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) return 0.0;
  return (v.array() - v.mean()).square().mean();
}

SweepResult positional_sweep(const Params& params, std::span<const CandidateList> lists,
                             const RelevanceJudgments& judgments, int k_cut) {
  SweepResult res;
  res.num_queries = static_cast<int>(lists.size());
  if (lists.empty()) return res;
  const auto k = static_cast<int>(lists.front().size());
  res.per_position_ndcg = Eigen::VectorXd::Zero(k);
  for (const auto& list : lists) {
    if (static_cast<int>(list.size()) != k) throw DataError("sweep: lists differ in size");
    for (int p = 1; p <= k; ++p) {
      const auto placed = place_relevant_at(list, judgments, p);
      res.per_position_ndcg(p - 1) += ndcg_at_k(rerank(params, placed), placed, judgments, k_cut);
    }
  }
  res.per_position_ndcg /= static_cast<double>(lists.size());
  res.variance = population_variance(res.per_position_ndcg);
  return res;
}

namespace {
std::vector<CandidateList> lists_of(std::span<const Example> dataset) {
  std::vector<CandidateList> out;
  out.reserve(dataset.size());
  for (const auto& ex : dataset) out.push_back(ex.list);
  return out;
}
}  // namespace

SweepResult positional_sweep(const Params& params, std::span<const Example> dataset,
                             const RelevanceJudgments& judgments, int k_cut) {
  const auto lists = lists_of(dataset);
  return positional_sweep(params, std::span<const CandidateList>(lists), judgments, k_cut);
}

std::string_view to_string(OrderMode m) {
  return m == OrderMode::Original ? "original" : "shuffled";
}

OrderMode parse_order_mode(std::string_view s) {
  if (s == "original") return OrderMode::Original;
  if (s == "shuffled" || s == "shuffle") return OrderMode::Shuffled;
  throw DataError("unknown order mode '" + std::string(s) + "' (original|shuffled)");
}

std::vector<RunRecord> to_run(const CandidateList& list, const Ranking& ranking,
                              const std::string& tag) {
  std::vector<RunRecord> run;
  run.reserve(list.size());
  const auto order = ranking.order();
  for (std::size_t r = 0; r < order.size(); ++r) {
    run.push_back({list.query_id, list.passages[static_cast<std::size_t>(order[r])].passage_id,
                   static_cast<int>(r) + 1, static_cast<double>(order.size() - r), tag});
  }
  return run;
}

EvalReport evaluate(const Params& params, std::span<const CandidateList> lists,
                    const RelevanceJudgments& judgments, const EvalOptions& opts) {
  if (opts.mode == OrderMode::Shuffled && opts.rng == nullptr) {
    throw DataError("shuffled evaluation requires an rng");
  }
  EvalReport rep;
  rep.order_mode = opts.mode;
  if (opts.rng) rep.seed = opts.rng->seed();
  double total = 0.0;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    CandidateList input = lists[i];
    std::optional<RngStream> stream;
    if (opts.rng) stream = opts.rng->child(i);
    if (opts.mode == OrderMode::Shuffled) input = fisher_yates_shuffle(input, *stream);
    const Ranking r =
        rerank(params, input, opts.p_fail, stream ? &*stream : nullptr, opts.window_step);
    const double v = ndcg_at_k(r, input, judgments, opts.k_cut);
    rep.per_query[input.query_id] = v;
    total += v;
    auto recs = to_run(input, r, opts.tag);
    rep.run.insert(rep.run.end(), recs.begin(), recs.end());
  }
  rep.mean_ndcg_at_10 = lists.empty() ? 0.0 : total / static_cast<double>(lists.size());
  return rep;
}

EvalReport evaluate(const Params& params, std::span<const Example> dataset,
                    const RelevanceJudgments& judgments, const EvalOptions& opts) {
  const auto lists = lists_of(dataset);
  return evaluate(params, std::span<const CandidateList>(lists), judgments, opts);
}

double run_variance(std::span<const EvalReport> reports) {
  if (reports.size() < 2) throw DataError("run_variance needs at least 2 reports");
  Eigen::VectorXd means(static_cast<Eigen::Index>(reports.size()));
  for (std::size_t i = 0; i < reports.size(); ++i) {
    means(static_cast<Eigen::Index>(i)) = 100.0 * reports[i].mean_ndcg_at_10;
  }
  return population_variance(means);
}

namespace {

/// Groups records by query (first-appearance order), each sorted by rank.
std::vector<std::pair<std::string, std::vector<RunRecord>>> by_query(
    std::span<const RunRecord> run) {
  std::vector<std::pair<std::string, std::vector<RunRecord>>> groups;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& rec : run) {
    auto [it, fresh] = index.emplace(rec.query_id, groups.size());
    if (fresh) groups.push_back({rec.query_id, {}});
    groups[it->second].second.push_back(rec);
  }
  for (auto& [q, recs] : groups) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const RunRecord& a, const RunRecord& b) { return a.rank < b.rank; });
  }
  return groups;
}

}  // namespace

std::map<std::string, double> evaluate_run(std::span<const RunRecord> run,
                                           const RelevanceJudgments& judgments, int k_cut) {
  if (k_cut < 1) throw DataError("ndcg: k_cut must be >= 1");
  std::map<std::string, double> out;
  for (const auto& [q, recs] : by_query(run)) {
    std::vector<int> grades;
    grades.reserve(recs.size());
    for (const auto& rec : recs) grades.push_back(judgments.grade(q, rec.passage_id));
    out[q] = ndcg_from_grades(std::move(grades), k_cut);
  }
  return out;
}

double mean_of(const std::map<std::string, double>& per_query) {
  if (per_query.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [q, v] : per_query) total += v;
  return total / static_cast<double>(per_query.size());
}

std::string_view to_string(Aggregation a) {
  return a == Aggregation::Kemeny ? "kemeny" : "rrf";
}

Aggregation parse_aggregation(std::string_view s) {
  if (s == "kemeny" || s == "permsc") return Aggregation::Kemeny;
  if (s == "rrf") return Aggregation::RRF;
  throw DataError("unknown aggregation '" + std::string(s) + "' (kemeny|rrf)");
}

std::vector<RunRecord> aggregate_runs(const std::vector<std::vector<RunRecord>>& runs,
                                      Aggregation method, const std::string& tag,
                                      int exact_limit, double rrf_c) {
  if (runs.empty()) throw DataError("aggregate: no runs given");
  std::vector<std::vector<std::pair<std::string, std::vector<RunRecord>>>> grouped;
  for (const auto& run : runs) grouped.push_back(by_query(run));

  std::vector<RunRecord> out;
  for (std::size_t qi = 0; qi < grouped.front().size(); ++qi) {
    const auto& [qid, base] = grouped.front()[qi];
    // canonical passage order: the first run's ranked list
    CandidateList canon;
    canon.query_id = qid;
    std::unordered_map<std::string, std::size_t> pos;
    for (const auto& rec : base) {
      pos.emplace(rec.passage_id, canon.passages.size());
      canon.passages.push_back({rec.passage_id, {}, std::nullopt});
    }
    FusionInput inp;
    inp.rrf_c = rrf_c;
    for (std::size_t ri = 0; ri < grouped.size(); ++ri) {
      const auto& groups = grouped[ri];
      const auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& g) { return g.first == qid; });
      if (it == groups.end()) {
        throw DataError("aggregate: run " + std::to_string(ri + 1) + " lacks query " + qid);
      }
      if (it->second.size() != base.size()) {
        throw DataError("aggregate: run " + std::to_string(ri + 1) + " query " + qid +
                        " has " + std::to_string(it->second.size()) + " passages, expected " +
                        std::to_string(base.size()));
      }
      std::vector<int> assignment(base.size(), 0);
      for (std::size_t r = 0; r < it->second.size(); ++r) {
        const auto p = pos.find(it->second[r].passage_id);
        if (p == pos.end() || assignment[p->second] != 0) {
          throw DataError("aggregate: run " + std::to_string(ri + 1) + " query " + qid +
                          " has a different passage set");
        }
        assignment[p->second] = static_cast<int>(r) + 1;
      }
      inp.rankings.emplace_back(std::move(assignment));
    }
    const Ranking fused =
        method == Aggregation::Kemeny ? permsc_aggregate(inp, exact_limit) : rrf_fuse(inp);
    auto recs = to_run(canon, fused, tag);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

}  // namespace debias
