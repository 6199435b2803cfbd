#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

TEST(HashTest, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(NumberFormatTest, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal() * std::pow(10.0, static_cast<double>(rng.uniform(40)) - 20);
    EXPECT_EQ(*parse_double(format_double(x)), x);
  }
  EXPECT_FALSE(parse_double("1.5x"));
  EXPECT_FALSE(parse_double(""));
  EXPECT_EQ(parse_int("-42"), -42);
  EXPECT_FALSE(parse_int("4.2"));
}

TEST(StringTest, SplitTrimLower) {
  const auto parts = split("a,,b", ',');
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[1], "");
  EXPECT_EQ(trim("  x y \t"), "x y");
  EXPECT_EQ(to_lower_ascii("HeLLo Ü"), "hello Ü");
}

TEST(RngTest, DeterministicStreams) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
  Rng r(7);
  std::vector<size_t> counts(6, 0);
  for (int i = 0; i < 60000; ++i) ++counts[r.uniform(6)];
  for (size_t c : counts) EXPECT_NEAR(static_cast<double>(c), 10000.0, 400.0);
  double sum = 0, sq = 0;
  for (int i = 0; i < 100000; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / 1e5, 0.0, 0.02);
  EXPECT_NEAR(sq / 1e5, 1.0, 0.02);
}

TEST(ErrorTest, ValidationCodes) {
  EXPECT_TRUE(is_validation_error(ErrorCode::kInvalidConfig));
  EXPECT_TRUE(is_validation_error(ErrorCode::kDuplicateId));
  EXPECT_FALSE(is_validation_error(ErrorCode::kNonFiniteLoss));
  EXPECT_FALSE(is_validation_error(ErrorCode::kIo));
  const Error e(ErrorCode::kMalformed, "line 3");
  EXPECT_EQ(std::string(e.what()), "Malformed: line 3");
}

}  // namespace
}  // namespace tweetprobe
