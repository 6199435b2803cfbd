#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <map>

#include "test_util.h"
#include "tweetprobe/analysis.h"
#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/report.h"

namespace tweetprobe {
namespace {

using testing::make_tweet;

TEST(TrendTest, Examples) {
  EXPECT_EQ(classify_trend({0.2, 0.4, 0.6, 0.8}), TrendLabel::kPositive);
  EXPECT_EQ(classify_trend({0.8, 0.6, 0.4, 0.2}), TrendLabel::kNegative);
  EXPECT_EQ(classify_trend({0.50, 0.51, 0.505}), TrendLabel::kInvariant);
  EXPECT_EQ(classify_trend({0.5, 0.9, 0.4, 0.9, 0.5}), TrendLabel::kUncorrelated);
  EXPECT_EQ(classify_trend({0.50, 0.52, 0.51}), TrendLabel::kInvariant);
  EXPECT_THROW(classify_trend({0.1, 0.2}), Error);
  EXPECT_EQ(trend_name(TrendLabel::kInvariant), "invariant");
}

TEST(TrendTest, MidranksWithTies) {
  EXPECT_EQ(midranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
}

double brute_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rank = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        less += w < v[i];
        equal += w == v[i];
      }
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  const auto rx = rank(x), ry = rank(y);
  const double n = x.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

TEST(TrendTest, SpearmanMatchesBruteForce) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 3 + rng.uniform(10);
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.uniform(5));
      y[i] = static_cast<double>(rng.uniform(5));
    }
    if (std::equal(x.begin() + 1, x.end(), x.begin()) ||
        std::equal(y.begin() + 1, y.end(), y.begin())) {
      continue;
    }
    EXPECT_NEAR(spearman(x, y), brute_spearman(x, y), 1e-12);
  }
}

TEST(LengthSliceTest, SingleBinAndPartition) {
  const Corpus c({make_tweet("a", "one two"), make_tweet("b", "x y z"), make_tweet("c", "p")});
  Metrics m = compute_metrics(std::vector<int>{0, 1, 1}, std::vector<int>{0, 1, 0}, 2);
  m.records = {{"a", 0, 0}, {"b", 1, 1}, {"c", 0, 1}};
  const auto bins = slice_by_length(m, c, 4, 1);
  ASSERT_EQ(bins.size(), 1u);
  EXPECT_EQ(bins[0].bin, 0u);
  EXPECT_EQ(bins[0].support, 3u);
  EXPECT_EQ(bins[0].f1, m.macro_f1);
  EXPECT_FALSE(slice_by_length(m, c, 4, 50)[0].reported);
}

TEST(LengthSliceTest, PerBinF1EqualsRecomputation) {
  const Corpus& c = testing::shared_synth().corpus;
  Rng rng(2);
  std::vector<int> gold, pred;
  std::vector<InstanceRecord> records;
  for (size_t i = 0; i < c.size(); ++i) {
    const int g = static_cast<int>(rng.uniform(3));
    const int p = rng.bernoulli(0.7) ? g : static_cast<int>(rng.uniform(3));
    gold.push_back(g);
    pred.push_back(p);
    records.push_back({c[i].id, p, g});
  }
  Metrics m = compute_metrics(gold, pred, 3);
  m.records = records;
  const auto bins = slice_by_length(m, c, 4, 50);
  size_t total = 0;
  for (const LengthBin& b : bins) {
    std::vector<int> bg, bp;
    for (size_t i = 0; i < c.size(); ++i) {
      if (word_count(c[i]) / 4 == b.bin) {
        bg.push_back(gold[i]);
        bp.push_back(pred[i]);
      }
    }
    EXPECT_EQ(b.support, bg.size());
    EXPECT_EQ(b.f1, compute_metrics(bg, bp, 3).macro_f1);
    EXPECT_EQ(b.reported, b.support >= 50);
    total += b.support;
  }
  EXPECT_EQ(total, c.size());
}

TEST(SizeSweepTest, OrderedResultsForAnyJobCount) {
  const std::vector<size_t> sizes = {10, 25, 50, 100, 200};
  const auto cell = [](size_t s) { return 1.0 / static_cast<double>(s); };
  for (size_t jobs : {1u, 2u, 8u}) {
    const auto points = size_sweep(cell, sizes, jobs);
    ASSERT_EQ(points.size(), sizes.size());
    for (size_t i = 0; i < sizes.size(); ++i) {
      EXPECT_EQ(points[i].size, sizes[i]);
      EXPECT_EQ(points[i].f1, 1.0 / sizes[i]);
    }
  }
  EXPECT_EQ(default_sizes(), sizes);
}

TEST(SizeSweepTest, ExceptionsPropagate) {
  const auto cell = [](size_t s) -> double {
    if (s == 50) throw Error(ErrorCode::kMissingSizeVariant, "no table for 50");
    return 0.5;
  };
  try {
    size_sweep(cell, default_sizes(), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingSizeVariant);
  }
}

TEST(RankTest, PaperGridBestModels) {
  const MetricsGrid grid = load_paper_reference();
  const Ranking content = rank_models(grid, TaskKind::kContent);
  EXPECT_EQ(content.order.front(), "STV");
  EXPECT_EQ(content.best_unsupervised, "STV");
  EXPECT_EQ(content.best_supervised, "CNN");
  EXPECT_EQ(rank_models(grid, TaskKind::kSlangWords).order.front(), "BLSTM");
  const Ranking length = rank_models(grid, TaskKind::kLength);
  EXPECT_EQ(length.best_supervised, "LSTM");
  EXPECT_EQ(length.best_unsupervised, "T2V");
}

TEST(RankTest, SingleModelAndTies) {
  MetricsGrid one;
  one.set("Solo", TaskKind::kLength, 0.4);
  EXPECT_EQ(rank_models(one, TaskKind::kLength).order, std::vector<std::string>{"Solo"});
  const Ranking hashtag = rank_models(load_paper_reference(), TaskKind::kHashtag);
  EXPECT_EQ(std::vector<std::string>(hashtag.order.begin(), hashtag.order.begin() + 3),
            (std::vector<std::string>{"CDSSM", "LDA", "SCBOW"}));
}

TEST(RankTest, InvariantUnderMonotoneTransform) {
  const MetricsGrid grid = load_paper_reference();
  MetricsGrid squashed;
  for (const auto& [key, v] : grid.cells()) squashed.set(key.first, key.second, v * v * 0.5);
  for (TaskKind task : kAllTasks) {
    EXPECT_EQ(rank_models(grid, task).order, rank_models(squashed, task).order);
  }
}

TEST(GridTest, RejectsDuplicatesAndOutOfRange) {
  MetricsGrid g;
  g.set("A", TaskKind::kLength, 0.5);
  EXPECT_THROW(g.set("A", TaskKind::kLength, 0.6), Error);
  EXPECT_THROW(g.set("B", TaskKind::kLength, 1.5), Error);
  EXPECT_EQ(model_category("fasttext"), ModelCategory::kSupervised);
  EXPECT_EQ(model_category("BOW"), ModelCategory::kUnsupervised);
}

TEST(AnalysisCsvTest, Headers) {
  const std::string slices =
      length_slices_csv("BOW", TaskKind::kLength, {{0, 60, 0.5, true}, {1, 10, 0.25, false}});
  // Bins under the support threshold keep their support but leave f1 empty.
  EXPECT_EQ(slices, "model,task,bin,f1,support\nBOW,length,0,0.5,60\nBOW,length,1,,10\n");
  const std::string sweep = size_sweep_csv("FT", TaskKind::kContent, {{10, 0.25}}, 40);
  EXPECT_EQ(sweep, "model,task,size,f1,support\nFT,content,10,0.25,40\n");
}

}  // namespace
}  // namespace tweetprobe
