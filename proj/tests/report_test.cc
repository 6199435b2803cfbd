#include <gtest/gtest.h>

#include <cstdlib>
#include <set>

#include "test_util.h"
#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/report.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

TEST(RenderTest, CellIsPercentWithTwoDecimals) {
  MetricsGrid g;
  g.set("BOW", TaskKind::kLength, 0.3783);
  const std::string md = render_grid(g, GridFormat::kMarkdown);
  EXPECT_NE(md.find("| BOW | **37.83** | - |"), std::string::npos) << md;
  EXPECT_EQ(render_grid(g, GridFormat::kCsv), "model,task,f1\nBOW,length,37.83\n");
}

TEST(RenderTest, EmptyGridIsHeaderOnly) {
  const std::string md = render_grid(MetricsGrid(), GridFormat::kMarkdown);
  EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 2);
  EXPECT_EQ(md.rfind("| Model | Length |", 0), 0u);
  EXPECT_EQ(render_grid(MetricsGrid(), GridFormat::kCsv), "model,task,f1\n");
}

TEST(RenderTest, SupervisedModelsAfterUnsupervised) {
  MetricsGrid g;
  g.set("LSTM", TaskKind::kLength, 0.9);
  g.set("BOW", TaskKind::kLength, 0.4);
  const std::string md = render_grid(g, GridFormat::kMarkdown);
  EXPECT_LT(md.find("| BOW |"), md.find("| LSTM |"));
}

TEST(RenderTest, CsvRoundTripAndFixedPoint) {
  const MetricsGrid ref = load_paper_reference();
  const std::string csv = render_grid(ref, GridFormat::kCsv);
  const MetricsGrid parsed = parse_grid_csv(csv);
  EXPECT_EQ(parsed, ref);
  EXPECT_EQ(render_grid(parsed, GridFormat::kCsv), csv);
  EXPECT_THROW(parse_grid_csv("model,task,f1\nA,nope,1\n"), Error);
  EXPECT_THROW(parse_grid_csv("bad header\n"), Error);
}

TEST(PaperReferenceTest, SpotCells) {
  const MetricsGrid g = load_paper_reference();
  EXPECT_EQ(g.size(), 169u);
  EXPECT_EQ(g.models().size(), 13u);
  EXPECT_NEAR(*g.get("BOW", TaskKind::kLength), 0.3783, 1e-12);
  EXPECT_NEAR(*g.get("STV", TaskKind::kContent), 0.9885, 1e-12);
  EXPECT_NEAR(*g.get("BLSTM", TaskKind::kSlangWords), 0.8052, 1e-12);
  EXPECT_NEAR(*g.get("LSTM", TaskKind::kLength), 0.9979, 1e-12);
  EXPECT_NEAR(*g.get("STV", TaskKind::kMentionCount), 0.9894, 1e-12);
  EXPECT_EQ(g.metadata.at("checksum"), std::string(kPaperReferenceChecksum));
}

TEST(PaperReferenceTest, BoldfaceSet) {
  const std::set<std::pair<std::string, TaskKind>> bold = {
      {"LSTM", TaskKind::kLength},         {"STV", TaskKind::kContent},
      {"BOM", TaskKind::kWordOrder},       {"BLSTM", TaskKind::kSlangWords},
      {"LDA", TaskKind::kHashtag},         {"CDSSM", TaskKind::kHashtag},
      {"SCBOW", TaskKind::kHashtag},       {"BOM", TaskKind::kNamedEntity},
      {"BLSTM", TaskKind::kCapCount},      {"CNN", TaskKind::kInformativeCap},
      {"STV", TaskKind::kMentionCount},    {"BLSTM", TaskKind::kMentionPosition},
      {"STV", TaskKind::kIsReply},         {"BOW", TaskKind::kReplyTime},
      {"STV", TaskKind::kWordRepetition}};
  EXPECT_EQ(column_maxima(load_paper_reference()), bold);
  const std::string md = render_grid(load_paper_reference(), GridFormat::kMarkdown);
  size_t count = 0;
  for (size_t pos = md.find("**"); pos != std::string::npos; pos = md.find("**", pos + 2)) ++count;
  EXPECT_EQ(count, 2 * bold.size());
}

TEST(PaperReferenceTest, ChecksumMismatchRejected) {
  testing::TempDir dir("paper_ref");
  std::string text = read_file(paper_reference_path());
  text.replace(text.find("37.83"), 5, "37.84");
  write_file(dir / "table.csv", text);
  try {
    load_paper_reference(dir / "table.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformed);
  }
  EXPECT_EQ(hex64(fnv1a64(read_file(paper_reference_path()))), kPaperReferenceChecksum);
}

double brute_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = i + 1; j < x.size(); ++j) {
      const int sx = (x[i] > x[j]) - (x[i] < x[j]);
      const int sy = (y[i] > y[j]) - (y[i] < y[j]);
      if (sx == 0 && sy == 0) continue;
      if (sx == 0) {
        ++ties_x;
      } else if (sy == 0) {
        ++ties_y;
      } else if (sx == sy) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  return (concordant - discordant) /
         std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
}

TEST(KendallTest, MatchesPairCounting) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 2 + rng.uniform(9);
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.uniform(4));
      y[i] = static_cast<double>(rng.uniform(4));
    }
    const auto tau = kendall_tau(x, y);
    const bool constant = std::equal(x.begin() + 1, x.end(), x.begin()) ||
                          std::equal(y.begin() + 1, y.end(), y.begin());
    if (constant) {
      EXPECT_FALSE(tau.has_value());
    } else {
      ASSERT_TRUE(tau.has_value());
      EXPECT_NEAR(*tau, brute_tau_b(x, y), 1e-12);
    }
  }
  EXPECT_EQ(kendall_tau({1, 2, 3}, {1, 2, 3}), 1.0);
  EXPECT_EQ(kendall_tau({1, 2, 3}, {3, 2, 1}), -1.0);
}

TEST(DiffTest, IdenticalGridsAgreeFully) {
  const MetricsGrid ref = load_paper_reference();
  const GridDiff diff = diff_grids(ref, ref);
  EXPECT_EQ(diff.cells.size(), 169u);
  for (const CellDelta& c : diff.cells) EXPECT_EQ(c.delta, 0.0);
  ASSERT_EQ(diff.tasks.size(), 13u);
  for (const TaskAgreement& t : diff.tasks) {
    EXPECT_EQ(t.models, 13u);
    EXPECT_NEAR(*t.kendall_tau, 1.0, 1e-12);
  }
  EXPECT_TRUE(diff.warnings.empty());
}

TEST(DiffTest, DisjointModelsWarn) {
  MetricsGrid ours;
  ours.set("Mine", TaskKind::kLength, 0.5);
  const GridDiff diff = diff_grids(ours, load_paper_reference());
  EXPECT_TRUE(diff.cells.empty());
  ASSERT_EQ(diff.warnings.size(), 1u);
  EXPECT_NE(render_diff(diff).find("warning:"), std::string::npos);
}

}  // namespace
}  // namespace tweetprobe
