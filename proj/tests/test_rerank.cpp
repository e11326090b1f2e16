#include "debias/rerank.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace debias;

namespace {

/// Scores equal to the single feature.
Params feature_scorer(int k) {
  Params p = make_params(1, k, 0.0);
  p.content_weights << 1.0;
  return p;
}

CandidateList scored_list(const std::vector<double>& s) {
  return oracle::make_list(Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size())));
}

/// Scores depend only on input position through the given weights.
Params position_scorer(const Eigen::VectorXd& w) {
  Params p = make_params(1, w.size(), 1.0);
  p.position_weights = w;
  return p;
}

std::vector<Ranking> random_rankings(int k, int m, std::mt19937_64& gen) {
  std::vector<Ranking> out;
  for (int i = 0; i < m; ++i) out.emplace_back(oracle::random_ranks(k, gen));
  return out;
}

}  // namespace

TEST(RerankWindow, SortsByScore) {
  const auto r = rerank_window(feature_scorer(3), scored_list({0.1, 0.9, 0.5}));
  EXPECT_EQ(r.assignment(), (std::vector<int>{3, 1, 2}));
  EXPECT_EQ(rerank_window(feature_scorer(4), scored_list({4, 3, 2, 1})), Ranking::identity(4));
}

TEST(RerankWindow, TiesKeepInputOrder) {
  const auto r = rerank_window(feature_scorer(4), scored_list({1, 2, 1, 2}));
  EXPECT_EQ(r.assignment(), (std::vector<int>{3, 1, 4, 2}));
}

TEST(RerankWindow, AllFailingFallsBackToInputOrder) {
  RngStream rng(1, 0);
  const auto r = rerank_window(feature_scorer(5), scored_list({1, 2, 3, 4, 5}), 1.0 - 1e-12, &rng);
  EXPECT_EQ(r, Ranking::identity(5));
}

TEST(RerankWindow, PartialFailureAppendsFailuresInInputOrder) {
  const std::vector<double> s{0.3, 0.8, 0.1, 0.9, 0.5, 0.7};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed, 0);
    const auto r = rerank_window(feature_scorer(6), scored_list(s), 0.5, &rng);
    const auto order = r.order();
    ASSERT_EQ(order.size(), 6u);
    // survivors form a score-descending prefix; the rest follow in input order
    std::size_t split = 0;
    while (split + 1 < order.size() && s[order[split]] >= s[order[split + 1]]) ++split;
    for (std::size_t j = split + 1; j + 1 < order.size(); ++j) EXPECT_LT(order[j], order[j + 1]);
  }
}

TEST(RerankWindow, Errors) {
  RngStream rng(1, 0);
  const auto list = scored_list({1, 2});
  EXPECT_THROW(rerank_window(feature_scorer(2), list, 1.0, &rng), DataError);
  EXPECT_THROW(rerank_window(feature_scorer(2), list, 0.5, nullptr), DataError);
  EXPECT_THROW(rerank_window(feature_scorer(2), list, -0.1, &rng), DataError);
}

TEST(SlidingWindow, LatePreferringScorerLiftsTheTail) {
  const Params p = position_scorer(Eigen::VectorXd::LinSpaced(20, 0.0, 19.0));
  const auto list = oracle::make_list(Eigen::MatrixXd::Zero(30, 1));
  const auto order = sliding_window_rerank(p, list, {20, 10}).order();
  std::vector<int> top(order.begin(), order.begin() + 10);
  std::sort(top.begin(), top.end());
  for (int j = 0; j < 10; ++j) EXPECT_EQ(top[j], 20 + j);
}

TEST(SlidingWindow, SingleWindowMatchesRerankWindow) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd x(20, 1);
  for (int i = 0; i < 20; ++i) x(i, 0) = n01(gen);
  const auto list = oracle::make_list(x);
  Params p = feature_scorer(20);
  p.bias_scale = 0.5;
  p.position_weights = Eigen::VectorXd::LinSpaced(20, 1.0, -1.0);
  EXPECT_EQ(sliding_window_rerank(p, list, {20, 10}), rerank_window(p, list));
  EXPECT_EQ(rerank(p, list), rerank_window(p, list));
}

TEST(SlidingWindow, SortedInputIsFixed) {
  std::vector<double> s(45);
  for (int i = 0; i < 45; ++i) s[i] = 45.0 - i;
  EXPECT_EQ(sliding_window_rerank(feature_scorer(20), scored_list(s), {20, 10}),
            Ranking::identity(45));
}

TEST(SlidingWindow, BijectionForEveryStep) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n01;
  for (int total : {8, 9, 13, 21}) {
    Eigen::MatrixXd x(total, 1);
    for (int i = 0; i < total; ++i) x(i, 0) = n01(gen);
    const auto list = oracle::make_list(x);
    for (int window = 2; window <= std::min(total, 8); ++window) {
      Params p = feature_scorer(window);
      p.bias_scale = 1.0;
      for (int i = 0; i < window; ++i) p.position_weights(i) = n01(gen);
      for (int step = 1; step <= window; ++step) {
        const auto r = sliding_window_rerank(p, list, {window, step});
        auto a = r.assignment();
        std::sort(a.begin(), a.end());
        for (int j = 0; j < total; ++j) ASSERT_EQ(a[j], j + 1);
      }
    }
  }
}

TEST(SlidingWindow, OverlappingPassBubblesTheBestToTheTop) {
  std::vector<double> s(50, 0.0);
  s[49] = 1.0;
  for (int step : {1, 5, 10, 19}) {
    const auto order = sliding_window_rerank(feature_scorer(20), scored_list(s), {20, step}).order();
    EXPECT_EQ(order[0], 49) << "step " << step;
  }
}

TEST(SlidingWindow, Errors) {
  const auto list = oracle::make_list(Eigen::MatrixXd::Zero(30, 1));
  EXPECT_THROW(sliding_window_rerank(feature_scorer(20), list, {20, 21}), DataError);
  EXPECT_THROW(sliding_window_rerank(feature_scorer(20), list, {20, 0}), DataError);
  EXPECT_THROW(sliding_window_rerank(feature_scorer(20), oracle::make_list(Eigen::MatrixXd::Zero(10, 1)),
                                     {20, 10}),
               DataError);
}

TEST(Rrf, Examples) {
  EXPECT_EQ(rrf_fuse({{Ranking({2, 3, 1})}}), Ranking({2, 3, 1}));

  const FusionInput reversed{{Ranking({1, 2}), Ranking({2, 1})}};
  const auto s = rrf_scores(reversed);
  EXPECT_DOUBLE_EQ(s(0), 1.0 / 61 + 1.0 / 62);
  EXPECT_DOUBLE_EQ(s(0), s(1));
  EXPECT_EQ(rrf_fuse(reversed), Ranking({1, 2}));
  EXPECT_EQ(rrf_fuse({{Ranking({2, 1}), Ranking({1, 2})}}), Ranking({2, 1}));

  const auto three = rrf_fuse({{Ranking({1, 2, 3}), Ranking({1, 3, 2})}});
  EXPECT_EQ(three.rank_of(0), 1);
}

TEST(Rrf, ScoresArePermutationInvariant) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 50; ++trial) {
    auto rs = random_rankings(7, 5, gen);
    const Eigen::VectorXd a = rrf_scores({rs, 60.0});
    std::shuffle(rs.begin(), rs.end(), gen);
    EXPECT_TRUE(rrf_scores({rs, 60.0}).isApprox(a, 1e-15));
  }
}

TEST(Rrf, MatchesDefinition) {
  std::mt19937_64 gen(7);
  const auto rs = random_rankings(6, 4, gen);
  const auto s = rrf_scores({rs, 10.0});
  for (int i = 0; i < 6; ++i) {
    double want = 0.0;
    for (const auto& r : rs) want += 1.0 / (10.0 + r.rank_of(i));
    EXPECT_NEAR(s(i), want, 1e-15);
  }
}

TEST(Rrf, Errors) {
  EXPECT_THROW(rrf_fuse({}), DataError);
  EXPECT_THROW(rrf_fuse({{Ranking({1, 2}), Ranking({1, 2, 3})}}), DataError);
  EXPECT_THROW(rrf_fuse({{Ranking({1, 2})}, 0.0}), DataError);
}

TEST(Permsc, Examples) {
  const Ranking r({3, 1, 4, 2});
  EXPECT_EQ(permsc_aggregate({{r, r, r}}), r);
  EXPECT_EQ(kemeny_cost(r, {r, r, r}), 0);

  const FusionInput mix{{Ranking::identity(4), Ranking::identity(4), Ranking({4, 3, 2, 1})}};
  EXPECT_EQ(permsc_aggregate(mix), Ranking::identity(4));
  EXPECT_EQ(kemeny_cost(Ranking::identity(4), mix.rankings), 6);
  EXPECT_EQ(oracle::brute_kemeny({{1, 2, 3, 4}, {1, 2, 3, 4}, {4, 3, 2, 1}}), 6);
}

TEST(Permsc, KemenyCostIsSumOfKendall) {
  std::mt19937_64 gen(8);
  const auto rs = random_rankings(6, 5, gen);
  const Ranking c(oracle::random_ranks(6, gen));
  long want = 0;
  for (const auto& r : rs) want += oracle::kendall(c.assignment(), r.assignment());
  EXPECT_EQ(kemeny_cost(c, rs), want);
}

TEST(Permsc, ExactMatchesBruteForce) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + trial % 4, m = 1 + trial % 7;
    const auto rs = random_rankings(k, m, gen);
    std::vector<std::vector<int>> raw;
    for (const auto& r : rs) raw.push_back(r.assignment());
    EXPECT_EQ(kemeny_cost(permsc_aggregate({rs}), rs), oracle::brute_kemeny(raw));
  }
}

TEST(Permsc, LocalSearchNeverWorseThanBorda) {
  std::mt19937_64 gen(10);
  for (int trial = 0; trial < 100; ++trial) {
    const FusionInput inp{random_rankings(12, 2 + trial % 9, gen)};
    const auto heur = kemeny_local_search(inp);
    EXPECT_LE(kemeny_cost(heur, inp.rankings), kemeny_cost(borda(inp), inp.rankings));
    EXPECT_EQ(permsc_aggregate(inp), heur);
  }
}

TEST(Permsc, LocalSearchIsAdjacentSwapOptimal) {
  std::mt19937_64 gen(11);
  const FusionInput inp{random_rankings(10, 6, gen)};
  const auto heur = kemeny_local_search(inp);
  const long base = kemeny_cost(heur, inp.rankings);
  auto order = heur.order();
  for (std::size_t j = 0; j + 1 < order.size(); ++j) {
    std::swap(order[j], order[j + 1]);
    EXPECT_GE(kemeny_cost(Ranking::from_order(order), inp.rankings), base);
    std::swap(order[j], order[j + 1]);
  }
}
