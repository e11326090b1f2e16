#include "debias/train.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace debias;

namespace {

SynthDataset small_set(int queries = 100) {
  SynthConfig cfg;
  cfg.num_queries = queries;
  cfg.relevance_position_skew = 0.5;
  cfg.seed = 5;
  return synth_generate(cfg);
}

Params random_params(int d, int k, double bias, std::mt19937_64& gen) {
  std::normal_distribution<double> n01;
  Params p = make_params(d, k, bias);
  for (int j = 0; j < d; ++j) p.content_weights(j) = n01(gen);
  for (int i = 0; i < k; ++i) p.position_weights(i) = 0.3 * n01(gen);
  return p;
}

}  // namespace

TEST(Train, ZeroLearningRateKeepsInit) {
  const auto data = small_set(20);
  const auto init = make_params(8, 20, 1.0, 1.0);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.loss.variant = LossVariant::First;
  EXPECT_EQ(train(data.examples, init, cfg).final_params, init);
  cfg.learning_rate = 1e-12;
  const auto tiny = train(data.examples, init, cfg).final_params;
  EXPECT_LT((tiny.trainable() - init.trainable()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Train, LmLossCurveNonIncreasingAfterFirstEpoch) {
  const auto data = small_set(100);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.epochs = 10;
  cfg.loss.variant = LossVariant::LM;
  const auto rep = train(data.examples, make_params(8, 20, 1.0, 1.0), cfg);
  ASSERT_EQ(rep.loss_curve.size(), 10u);
  for (std::size_t e = 1; e + 1 < rep.loss_curve.size(); ++e) {
    EXPECT_LE(rep.loss_curve[e + 1], rep.loss_curve[e]) << "epoch " << e + 2;
  }
  EXPECT_LT(rep.loss_curve.back(), rep.loss_curve.front());
}

TEST(Train, DeterministicGivenSeed) {
  const auto data = small_set(40);
  TrainConfig cfg;
  cfg.loss.variant = LossVariant::First;
  cfg.seed = 3;
  cfg.momentum = 0.5;
  const auto init = make_params(8, 20, 1.0, 1.0);
  const auto a = train(data.examples, init, cfg), b = train(data.examples, init, cfg);
  EXPECT_EQ(a.loss_curve, b.loss_curve);
  EXPECT_EQ(a.final_params, b.final_params);
  cfg.seed = 4;
  EXPECT_NE(train(data.examples, init, cfg).final_params, a.final_params);
}

TEST(Train, PropensityPresenceMustMatchVariant) {
  const auto data = small_set(5);
  const auto init = make_params(8, 20, 1.0);
  const auto w = PropensityMatrix::uniform(20);
  TrainConfig cfg;
  cfg.loss.variant = LossVariant::DebiasFirst;
  EXPECT_THROW(train(data.examples, init, cfg), DataError);
  EXPECT_NO_THROW(train(data.examples, init, cfg, &w));
  cfg.loss.variant = LossVariant::First;
  EXPECT_THROW(train(data.examples, init, cfg, &w), DataError);
  cfg.epochs = 0;
  EXPECT_THROW(train(data.examples, init, cfg), DataError);
}

TEST(Train, DivergenceNamesEpochAndBatch) {
  const auto data = small_set(10);
  TrainConfig cfg;
  cfg.learning_rate = std::numeric_limits<double>::max();
  cfg.loss.variant = LossVariant::First;
  try {
    train(data.examples, make_params(8, 20, 1.0, 1.0), cfg);
    FAIL();
  } catch (const DivergenceError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch"), std::string::npos) << msg;
    EXPECT_NE(msg.find("batch"), std::string::npos) << msg;
  }
}

TEST(Train, InstanceGradientMatchesGradCheck) {
  const auto data = small_set(3);
  std::mt19937_64 gen(1);
  const auto p = random_params(8, 20, 1.3, gen);
  const LossConfig cfg{0.1, LossVariant::First};
  const auto ig = instance_gradient(cfg, p, data.examples[0], nullptr);
  const auto rep = grad_check(cfg, p, data.examples[0], nullptr, 1e-5, 1e-6);
  EXPECT_EQ(ig.grad, rep.analytic);
  EXPECT_TRUE(rep.passed) << rep.max_rel_error;
}

TEST(GradCheck, AllVariantsPass) {
  std::mt19937_64 gen(2);
  for (int k : {2, 5, 20}) {
    SynthConfig sc;
    sc.num_queries = 5;
    sc.k = k;
    sc.d = 4;
    const auto data = synth_generate(sc);
    Eigen::MatrixXd w = Eigen::MatrixXd::Constant(k, k, 1.0 / (k * k));
    w(0, 0) *= 3.0;
    const auto omega = PropensityMatrix::from_values(w);
    for (const auto& ex : data.examples) {
      const auto p = random_params(4, k, 0.8, gen);
      for (auto v : {LossVariant::LM, LossVariant::Rank, LossVariant::RankIPS,
                     LossVariant::First, LossVariant::DebiasFirst}) {
        const auto rep = grad_check({0.1, v}, p, ex, uses_propensities(v) ? &omega : nullptr,
                                    1e-5, 1e-6);
        EXPECT_TRUE(rep.passed) << to_string(v) << " k=" << k << " err " << rep.max_rel_error;
      }
    }
  }
}

TEST(GradCheck, SaturatedPairHasVanishingGradient) {
  auto list = oracle::make_list((Eigen::MatrixXd(2, 1) << 50.0, 0.0).finished());
  Params p = make_params(1, 2, 0.0);
  p.content_weights << 1.0;
  const Example ex{list, Ranking({1, 2})};
  const auto rep = grad_check({0.1, LossVariant::Rank}, p, ex, nullptr, 1e-5, 1e-6);
  EXPECT_LT(rep.max_abs_analytic, 1e-8);
  EXPECT_LT(rep.max_abs_numeric, 1e-8);
}

TEST(GradCheck, UniformIpsIsScaledRankProfile) {
  const auto data = small_set(2);
  std::mt19937_64 gen(3);
  const auto p = random_params(8, 20, 1.0, gen);
  const auto w = PropensityMatrix::uniform(20);
  const auto& ex = data.examples[1];
  const auto rank = grad_check({0.1, LossVariant::Rank}, p, ex, nullptr, 1e-5, 1e-6);
  const auto ips = grad_check({0.1, LossVariant::RankIPS}, p, ex, &w, 1e-5, 1e-6);
  EXPECT_TRUE(rank.passed);
  EXPECT_TRUE(ips.passed);
  EXPECT_LT(oracle::relative_error(ips.analytic, std::pow(20.0, 4) * rank.analytic), 1e-10);
  EXPECT_LT(oracle::relative_error(ips.numeric, std::pow(20.0, 4) * rank.numeric), 1e-6);
  EXPECT_THROW(grad_check({0.1, LossVariant::Rank}, p, ex, nullptr, 0.0, 1e-6), DataError);
}
