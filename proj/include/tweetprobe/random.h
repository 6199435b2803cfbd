#ifndef TWEETPROBE_RANDOM_H_
#define TWEETPROBE_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace tweetprobe {

// splitmix64 finalizer; used to derive independent stream seeds.
uint64_t mix_seed(uint64_t x);
uint64_t derive_seed(uint64_t base, uint64_t tag);

// Deterministic across platforms: std::mt19937_64 output is fixed by the
// standard, and every distribution below is implemented here rather than
// taken from <random>, whose distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t uniform(uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  double normal();

  double exponential(double mean);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tweetprobe

#endif  // TWEETPROBE_RANDOM_H_
