#include "debias/permute.hpp"
#include "debias/rerank.hpp"
#include "debias/scorer.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace debias;

namespace {

Params random_params(int d, int k, double bias, std::mt19937_64& gen) {
  std::normal_distribution<double> n01;
  Params p = make_params(d, k, bias);
  for (int j = 0; j < d; ++j) p.content_weights(j) = n01(gen);
  for (int i = 0; i < k; ++i) p.position_weights(i) = n01(gen);
  return p;
}

Eigen::MatrixXd random_features(int k, int d, std::mt19937_64& gen) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd x(k, d);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = n01(gen);
  }
  return x;
}

}  // namespace

TEST(Score, HandArithmetic) {
  Params p = make_params(1, 2, 1.0);
  p.content_weights << 1.0;
  p.position_weights << 0.5, 0.0;
  const auto list = oracle::make_list((Eigen::MatrixXd(2, 1) << 2, 3).finished());
  const Eigen::VectorXd s = score(p, list);
  EXPECT_DOUBLE_EQ(s(0), 2.5);
  EXPECT_DOUBLE_EQ(s(1), 3.0);
}

TEST(Score, ZeroParametersGiveZeroScores) {
  std::mt19937_64 gen(1);
  auto p = make_params(3, 4, 0.0, 1.0);
  EXPECT_TRUE(score(p, oracle::make_list(random_features(4, 3, gen))).isZero(0.0));
}

TEST(Score, PositionFreeScorerIsEquivariant) {
  std::mt19937_64 gen(2);
  auto p = random_params(3, 6, 0.0, gen);
  const auto list = oracle::make_list(random_features(6, 3, gen));
  const std::vector<int> order{3, 0, 5, 1, 4, 2};
  const Eigen::VectorXd s = score(p, list);
  const Eigen::VectorXd moved = score(p, reorder(list, order));
  for (int j = 0; j < 6; ++j) EXPECT_DOUBLE_EQ(moved(j), s(order[j]));
}

TEST(Score, Errors) {
  auto p = make_params(2, 3, 1.0);
  EXPECT_THROW(score(p, oracle::make_list(Eigen::MatrixXd::Zero(2, 2))), DataError);
  EXPECT_THROW(score(p, oracle::make_list(Eigen::MatrixXd::Zero(3, 1))), DataError);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  x(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(score(p, oracle::make_list(x)), DataError);
  x(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(score(p, oracle::make_list(x)), DataError);
}

TEST(Score, TemplatedOnScalar) {
  std::mt19937_64 gen(3);
  const auto p = random_params(3, 5, 0.7, gen);
  const auto x = random_features(5, 3, gen);
  const Eigen::VectorXf sf = score(p.cast<float>(), x);
  const Eigen::VectorXd sd = score(p, x);
  EXPECT_TRUE(sf.cast<double>().isApprox(sd, 1e-5));
  EXPECT_EQ(p.cast<float>().cast<double>().dim(), p.dim());
}

TEST(ScoreGradient, MatchesFiniteDifferences) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 6, d = 1 + trial % 4;
    const auto p = random_params(d, k, 0.5 + trial * 0.1, gen);
    const auto list = oracle::make_list(random_features(k, d, gen));
    const auto jac = score_gradient(p, list);
    for (int i = 0; i < k; ++i) {
      auto f = [&](const Eigen::VectorXd& theta) {
        Params q = p;
        q.set_trainable(theta);
        return score(q, list)(i);
      };
      const auto num = oracle::numeric_gradient(f, p.trainable(), 1e-5);
      Eigen::VectorXd ana(p.num_trainable());
      ana << jac.content.row(i).transpose(), jac.position.row(i).transpose();
      EXPECT_LT(oracle::relative_error(ana, num), 1e-6);
    }
  }
}

TEST(ScoreGradient, DegenerateCases) {
  std::mt19937_64 gen(5);
  auto p = random_params(3, 4, 0.0, gen);
  const auto zeros = oracle::make_list(Eigen::MatrixXd::Zero(4, 3));
  const auto jac = score_gradient(p, zeros);
  EXPECT_TRUE(jac.content.isZero(0.0));
  EXPECT_TRUE(jac.position.isZero(0.0));
  p.bias_scale = 2.0;
  EXPECT_TRUE(score_gradient(p, zeros).position.isApprox(2.0 * Eigen::MatrixXd::Identity(4, 4)));
}

TEST(ScoreGradient, BackpropIsTransposedProduct) {
  std::mt19937_64 gen(6);
  const auto p = random_params(3, 4, 1.5, gen);
  const auto list = oracle::make_list(random_features(4, 3, gen));
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(4, -1, 2);
  const auto back = backprop(score_gradient(p, list), g);
  EXPECT_TRUE(back.content_weights.isApprox(list.feature_matrix().transpose() * g));
  EXPECT_TRUE(back.position_weights.isApprox(1.5 * g));
}

TEST(MakeParams, PositionPriorDecreasing) {
  const auto p = make_params(2, 5, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(p.position_weights(0), 0.0);
  EXPECT_DOUBLE_EQ(p.position_weights(4), -2.0);
  for (int i = 0; i + 1 < 5; ++i) EXPECT_GT(p.position_weights(i), p.position_weights(i + 1));
  EXPECT_TRUE(p.content_weights.isZero(0.0));
}

TEST(Synth, BalancedWithoutSkew) {
  SynthConfig cfg;
  cfg.num_queries = 10000;
  cfg.d = 2;
  cfg.seed = 12;
  const auto data = synth_generate(cfg);
  std::vector<long> hist(20, 0);
  for (int p : relevant_positions(data)) ++hist[p - 1];
  EXPECT_LT(oracle::chi_square(hist, 500.0), oracle::chi_square_critical_999(19));
}

TEST(Synth, StrongSkewConcentratesEarly) {
  SynthConfig cfg;
  cfg.num_queries = 2000;
  cfg.relevance_position_skew = 1.0;
  const auto data = synth_generate(cfg);
  int top_quartile = 0;
  for (int p : relevant_positions(data)) top_quartile += p <= 5;
  EXPECT_GT(top_quartile, 0.9 * 2000);
}

TEST(Synth, Deterministic) {
  SynthConfig cfg;
  cfg.num_queries = 50;
  cfg.relevance_position_skew = 0.3;
  const auto a = synth_generate(cfg), b = synth_generate(cfg);
  ASSERT_EQ(a.examples.size(), b.examples.size());
  for (std::size_t q = 0; q < a.examples.size(); ++q) {
    EXPECT_EQ(a.examples[q].truth, b.examples[q].truth);
    for (std::size_t i = 0; i < a.examples[q].list.size(); ++i) {
      EXPECT_EQ(a.examples[q].list.passages[i].passage_id, b.examples[q].list.passages[i].passage_id);
      EXPECT_EQ(a.examples[q].list.passages[i].features, b.examples[q].list.passages[i].features);
    }
  }
  EXPECT_EQ(a.judgments.entries(), b.judgments.entries());
}

TEST(Synth, TruthOrdersByGradeThenLatentRelevance) {
  SynthConfig cfg;
  cfg.num_queries = 30;
  cfg.label_grades = {0, 2};
  const auto data = synth_generate(cfg);
  for (const auto& ex : data.examples) {
    const auto order = ex.truth.order();
    const auto& top = ex.list.passages[static_cast<std::size_t>(order[0])];
    EXPECT_EQ(top.relevance_label, 2);
    EXPECT_EQ(data.judgments.grade(ex.list.query_id, top.passage_id), 2);
    for (std::size_t r = 1; r + 1 < order.size(); ++r) {
      const auto& a = ex.list.passages[static_cast<std::size_t>(order[r])];
      const auto& b = ex.list.passages[static_cast<std::size_t>(order[r + 1])];
      EXPECT_EQ(a.relevance_label, 0);
      EXPECT_GE(a.features.dot(data.direction), b.features.dot(data.direction));
    }
  }
}

TEST(Synth, SplitsShareTheRelevanceDirection) {
  SynthConfig cfg;
  cfg.num_queries = 10;
  auto eval = cfg;
  eval.first_query = 10;
  const auto a = synth_generate(cfg), b = synth_generate(eval);
  EXPECT_EQ(a.direction, b.direction);
  std::set<std::string> ids;
  for (const auto& ex : a.examples) ids.insert(ex.list.query_id);
  for (const auto& ex : b.examples) EXPECT_EQ(ids.count(ex.list.query_id), 0u);
  EXPECT_NEAR(a.direction.norm(), 1.0, 1e-12);
}

TEST(Synth, RejectsBadConfig) {
  SynthConfig cfg;
  cfg.k = 1;
  EXPECT_THROW(synth_generate(cfg), DataError);
  cfg = {};
  cfg.noise_sigma = -1;
  EXPECT_THROW(synth_generate(cfg), DataError);
  cfg = {};
  cfg.label_grades = {0};
  EXPECT_THROW(synth_generate(cfg), DataError);
}

TEST(Equivariance, PositionFreeRerankingCommutesWithPermutation) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + trial % 10;
    auto p = random_params(3, k, 0.0, gen);
    const auto list = oracle::make_list(random_features(k, 3, gen));
    auto perm = oracle::random_ranks(k, gen);
    for (auto& v : perm) --v;
    const auto base = rerank_window(p, list).order();
    const auto moved = rerank_window(p, reorder(list, perm)).order();
    for (int r = 0; r < k; ++r) EXPECT_EQ(perm[moved[r]], base[r]);
  }
}
