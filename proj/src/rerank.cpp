#include "debias/rerank.hpp"

#include <algorithm>
#include <numeric>

namespace debias {

Ranking rank_by_scores(const Eigen::Ref<const Eigen::VectorXd>& scores) {
  std::vector<int> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores(a) > scores(b); });
  return Ranking::from_order(order);
}

Ranking rerank_window(const Params& params, const CandidateList& list, double p_fail,
                      RngStream* rng) {
  if (!(p_fail >= 0.0 && p_fail < 1.0)) throw DataError("p_fail must lie in [0, 1)");
  if (p_fail > 0.0 && rng == nullptr) throw DataError("p_fail > 0 requires an rng");
  const Eigen::VectorXd s = score(params, list);
  if (p_fail == 0.0) return rank_by_scores(s);

  std::vector<int> survivors;
  for (int i = 0; i < static_cast<int>(list.size()); ++i) {
    if (rng->uniform01() >= p_fail) survivors.push_back(i);
  }
  std::stable_sort(survivors.begin(), survivors.end(),
                   [&](int a, int b) { return s(a) > s(b); });
  std::vector<int> partial(list.size(), 0);
  for (std::size_t r = 0; r < survivors.size(); ++r) {
    partial[static_cast<std::size_t>(survivors[r])] = static_cast<int>(r) + 1;
  }
  return complete_ranking(Ranking(std::move(partial)), list);
}

Ranking sliding_window_rerank(const Params& params, const CandidateList& full_list,
                              const WindowConfig& cfg) {
  if (cfg.window_size < 1 || cfg.step < 1) throw DataError("window and step must be >= 1");
  if (cfg.step > cfg.window_size) {
    throw DataError("step " + std::to_string(cfg.step) + " exceeds window size " +
                    std::to_string(cfg.window_size));
  }
  const auto total = static_cast<int>(full_list.size());
  if (total < cfg.window_size) {
    throw DataError("list of " + std::to_string(total) + " passages is shorter than window " +
                    std::to_string(cfg.window_size));
  }
  // current[j] = input index at current position j
  std::vector<int> current(static_cast<std::size_t>(total));
  std::iota(current.begin(), current.end(), 0);
  int start = total - cfg.window_size;
  while (true) {
    const std::span<const int> slice(current.data() + start,
                                     static_cast<std::size_t>(cfg.window_size));
    CandidateList window;
    window.query_id = full_list.query_id;
    for (int i : slice) window.passages.push_back(full_list.passages[static_cast<std::size_t>(i)]);
    const auto win_order = rerank_window(params, window).order();
    std::vector<int> updated(win_order.size());
    for (std::size_t r = 0; r < win_order.size(); ++r) {
      updated[r] = slice[static_cast<std::size_t>(win_order[r])];
    }
    std::copy(updated.begin(), updated.end(), current.begin() + start);
    if (start == 0) break;
    start = std::max(0, start - cfg.step);
  }
  return Ranking::from_order(current);
}

Ranking rerank(const Params& params, const CandidateList& list, double p_fail, RngStream* rng,
               int step) {
  const auto window = static_cast<int>(params.window());
  if (list.size() <= static_cast<std::size_t>(window)) {
    return rerank_window(params, list, p_fail, rng);
  }
  return sliding_window_rerank(params, list, {window, step > 0 ? step : std::max(1, window / 2)});
}

namespace {

std::size_t common_size(const FusionInput& inp) {
  if (inp.rankings.empty()) throw DataError("fusion needs at least one ranking");
  const auto k = inp.rankings.front().size();
  for (const auto& r : inp.rankings) {
    if (r.size() != k) throw DataError("fusion: rankings cover different passage sets");
    if (r.partial()) throw DataError("fusion: incomplete permutation");
  }
  return k;
}

/// prec(i, j) = number of rankings placing i above j.
Eigen::MatrixXi precedence(const FusionInput& inp) {
  const auto k = static_cast<Eigen::Index>(common_size(inp));
  Eigen::MatrixXi prec = Eigen::MatrixXi::Zero(k, k);
  for (const auto& r : inp.rankings) {
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        if (r.rank_of(static_cast<std::size_t>(i)) < r.rank_of(static_cast<std::size_t>(j))) {
          ++prec(i, j);
        }
      }
    }
  }
  return prec;
}

long order_cost(const std::vector<int>& order, const Eigen::MatrixXi& prec) {
  long cost = 0;
  for (std::size_t u = 0; u < order.size(); ++u) {
    for (std::size_t v = u + 1; v < order.size(); ++v) cost += prec(order[v], order[u]);
  }
  return cost;
}

}  // namespace

Eigen::VectorXd rrf_scores(const FusionInput& inp) {
  if (!(inp.rrf_c > 0.0)) throw DataError("rrf constant must be positive");
  const auto k = static_cast<Eigen::Index>(common_size(inp));
  Eigen::VectorXd s = Eigen::VectorXd::Zero(k);
  for (const auto& r : inp.rankings) {
    for (Eigen::Index i = 0; i < k; ++i) {
      s(i) += 1.0 / (inp.rrf_c + r.rank_of(static_cast<std::size_t>(i)));
    }
  }
  return s;
}

Ranking rrf_fuse(const FusionInput& inp) {
  const Eigen::VectorXd s = rrf_scores(inp);
  std::vector<int> order = inp.rankings.front().order();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s(a) > s(b); });
  return Ranking::from_order(order);
}

long kemeny_cost(const Ranking& candidate, const std::vector<Ranking>& rankings) {
  long total = 0;
  for (const auto& r : rankings) total += kendall_tau(candidate, r);
  return total;
}

Ranking borda(const FusionInput& inp) {
  const auto k = common_size(inp);
  std::vector<long> rank_sum(k, 0);
  for (const auto& r : inp.rankings) {
    for (std::size_t i = 0; i < k; ++i) rank_sum[i] += r.rank_of(i);
  }
  std::vector<int> order = inp.rankings.front().order();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return rank_sum[static_cast<std::size_t>(a)] < rank_sum[static_cast<std::size_t>(b)];
  });
  return Ranking::from_order(order);
}

Ranking kemeny_local_search(const FusionInput& inp) {
  const auto prec = precedence(inp);
  std::vector<int> order = borda(inp).order();
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t u = 0; u + 1 < order.size(); ++u) {
      // swapping neighbours only changes their own pair's contribution
      if (prec(order[u + 1], order[u]) > prec(order[u], order[u + 1])) {
        std::swap(order[u], order[u + 1]);
        improved = true;
      }
    }
  }
  return Ranking::from_order(order);
}

Ranking permsc_aggregate(const FusionInput& inp, int exact_limit) {
  const auto k = common_size(inp);
  if (static_cast<int>(k) > exact_limit) return kemeny_local_search(inp);

  const auto prec = precedence(inp);
  // Enumerate from the Borda order so ties resolve towards it.
  std::vector<int> start = borda(inp).order();
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> best = start;
  long best_cost = order_cost(start, prec);
  std::vector<int> candidate(k);
  do {
    for (std::size_t j = 0; j < k; ++j) candidate[j] = start[static_cast<std::size_t>(idx[j])];
    const long c = order_cost(candidate, prec);
    if (c < best_cost) {
      best_cost = c;
      best = candidate;
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
  return Ranking::from_order(best);
}

}  // namespace debias
