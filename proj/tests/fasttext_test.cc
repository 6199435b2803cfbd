#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "test_util.h"
#include "tweetprobe/error.h"
#include "tweetprobe/fasttext.h"
#include "tweetprobe/random.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

using testing::make_tweet;

FtModel random_model(size_t buckets, size_t dim, size_t max_n, size_t classes, uint64_t seed) {
  Rng rng(seed);
  FtModel m;
  m.buckets = buckets;
  m.dim = dim;
  m.max_n = max_n;
  m.class_count = classes;
  m.embeddings.resize(buckets * dim);
  m.output.resize(classes * dim);
  m.bias.resize(classes);
  for (double& x : m.embeddings) x = rng.normal();
  for (double& x : m.output) x = rng.normal();
  for (double& x : m.bias) x = rng.normal();
  return m;
}

TEST(FtFeaturesTest, DeterministicAndMarked) {
  const Tweet t = make_tweet("1", "Hello big World");
  const auto a = featurize_ft(t, {{"World"}}, 2, 1 << 16);
  EXPECT_EQ(a, featurize_ft(t, {{"World"}}, 2, 1 << 16));
  const auto strings = ft_feature_strings(t, {{"World"}, {"New", "York"}}, 2);
  EXPECT_EQ(strings, (std::vector<std::string>{"w:hello", "w:hello big", "w:big", "w:big world",
                                               "w:world", "a0:world", "a1:new york"}));
  EXPECT_EQ(ft_bucket("w:hello", 1 << 16), mix_seed(fnv1a64("w:hello")) % (1 << 16));
  EXPECT_NE(featurize_ft(t, {{"x"}, {"y"}}, 1, 1 << 16), featurize_ft(t, {{"y"}, {"x"}}, 1, 1 << 16));
}

TEST(FtFeaturesTest, EmptyTweetFallsBackToBias) {
  EXPECT_TRUE(featurize_ft(make_tweet("1", ""), {}, 2, 100).empty());
  FtModel m = random_model(100, 4, 2, 3, 1);
  const Prediction p = predict_ft(m, std::vector<uint32_t>{});
  const auto expected = softmax(m.bias);
  for (size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(p.probabilities[c], expected[c]);
}

TEST(FtFeaturesTest, CollisionRateMatchesBirthdayBound) {
  const size_t n = 50000;
  const size_t buckets = size_t{1} << 16;
  std::set<uint32_t> used;
  for (size_t i = 0; i < n; ++i) used.insert(ft_bucket("w:gram" + std::to_string(i), buckets));
  const double collided = static_cast<double>(n - used.size());
  const double expected_occupied = buckets * (1.0 - std::pow(1.0 - 1.0 / buckets, n));
  const double expected = n - expected_occupied;
  EXPECT_NEAR(collided, expected, 0.2 * expected);
}

TEST(FtPredictTest, ZeroModelUniformAndSumsToOne) {
  FtModel zero;
  zero.buckets = 50;
  zero.dim = 3;
  zero.max_n = 2;
  zero.class_count = 4;
  zero.embeddings.assign(150, 0.0);
  zero.output.assign(12, 0.0);
  zero.bias.assign(4, 0.0);
  for (double q : predict_ft(zero, make_tweet("1", "a b c"), {}).probabilities) {
    EXPECT_DOUBLE_EQ(q, 0.25);
  }
  const FtModel m = random_model(50, 3, 2, 4, 2);
  for (const Tweet& t : testing::shared_synth().corpus.tweets()) {
    const auto probs = predict_ft(m, t, {}).probabilities;
    ASSERT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(FtPredictTest, UnigramModelIgnoresWordOrder) {
  const FtModel m = random_model(97, 5, 1, 3, 3);
  const auto a = predict_ft(m, make_tweet("1", "alpha beta gamma delta"), {{"x"}});
  const auto b = predict_ft(m, make_tweet("1", "delta gamma alpha beta"), {{"x"}});
  for (size_t c = 0; c < 3; ++c) EXPECT_NEAR(a.probabilities[c], b.probabilities[c], 1e-15);
  const FtModel bi = random_model(97, 5, 2, 3, 3);
  EXPECT_NE(predict_ft(bi, make_tweet("1", "alpha beta gamma"), {}).probabilities,
            predict_ft(bi, make_tweet("1", "gamma beta alpha"), {}).probabilities);
}

TEST(FtGradientTest, RandomRestarts) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    GradientCheckOptions opt;
    opt.seed = seed;
    EXPECT_LT(ft_gradient_check(opt), 1e-4) << "seed " << seed;
  }
}

TEST(FtGradientTest, ZeroOutputAndFaultInjection) {
  GradientCheckOptions zero;
  zero.zero_weights = true;
  EXPECT_LT(ft_gradient_check(zero), 1e-4);
  GradientCheckOptions bad;
  bad.corrupt = negate_largest;
  EXPECT_GT(ft_gradient_check(bad), 1e-2);
}

class FtTrainTest : public ::testing::Test {
 protected:
  static const TaskDataset& content() {
    static const TaskDataset ds =
        build_task(TaskKind::kContent, testing::shared_synth().corpus, TaskConfig{}, 5);
    return ds;
  }
};

TEST_F(FtTrainTest, SameSeedIdenticalParameters) {
  FtConfig cfg;
  cfg.buckets = 4096;
  cfg.max_epochs = 3;
  const auto& corpus = testing::shared_synth().corpus;
  EXPECT_EQ(train_ft(content(), corpus, cfg), train_ft(content(), corpus, cfg));
}

TEST_F(FtTrainTest, DegenerateLabels) {
  TaskDataset ds = content();
  for (auto& inst : ds.instances) inst.label = 0;
  try {
    train_ft(ds, testing::shared_synth().corpus, FtConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateLabels);
  }
}

// The pairing puts every tweet in the data once with a present word and once
// with an absent one, so the averaged-embedding model only sees the aux
// word's own statistics; the achievable score sits well above chance but
// below what a membership test would reach.
TEST_F(FtTrainTest, ContentWellAboveChance) {
  const auto& corpus = testing::shared_synth().corpus;
  const FtModel m = train_ft(content(), corpus, FtConfig{});
  const auto features = featurize_dataset(content(), corpus, m.max_n, m.buckets);
  const Metrics metrics = evaluate_ft(m, features, content(), content().test);
  EXPECT_GE(metrics.macro_f1, 0.75);
}

TEST_F(FtTrainTest, PersistenceRoundTrip) {
  testing::TempDir dir("ft");
  FtConfig cfg;
  cfg.buckets = 1024;
  cfg.max_epochs = 2;
  const FtModel m = train_ft(content(), testing::shared_synth().corpus, cfg);
  save_ft(m, dir / "m.txt");
  EXPECT_EQ(load_ft(dir / "m.txt"), m);
}

}  // namespace
}  // namespace tweetprobe
