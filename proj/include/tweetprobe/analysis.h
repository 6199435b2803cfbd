#ifndef TWEETPROBE_ANALYSIS_H_
#define TWEETPROBE_ANALYSIS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tweetprobe/corpus.h"
#include "tweetprobe/probe.h"
#include "tweetprobe/tasks.h"

namespace tweetprobe {

enum class ModelCategory { kUnsupervised, kSupervised };

// Category of the paper's models and of the native ones (case-insensitive).
// Unknown names are treated as unsupervised.
ModelCategory model_category(std::string_view model);

// Macro-F1 per (model, task), values in [0, 1].
class MetricsGrid {
 public:
  // Throws InvalidConfig on a duplicate cell or a value outside [0, 1].
  void set(const std::string& model, TaskKind task, double f1);
  std::optional<double> get(const std::string& model, TaskKind task) const;
  bool empty() const { return cells_.empty(); }
  size_t size() const { return cells_.size(); }

  // Models in first-insertion order.
  const std::vector<std::string>& models() const { return models_; }
  const std::map<std::pair<std::string, TaskKind>, double>& cells() const { return cells_; }

  std::map<std::string, std::string> metadata;

  bool operator==(const MetricsGrid& other) const {
    return cells_ == other.cells_ && models_ == other.models_;
  }

 private:
  std::vector<std::string> models_;
  std::map<std::pair<std::string, TaskKind>, double> cells_;
};

struct LengthBin {
  size_t bin = 0;
  size_t support = 0;
  double f1 = 0.0;
  bool reported = false;  // support >= min_support
};

// Groups test records by floor(word_count / bin_width) of their tweet and
// recomputes macro-F1 per bin. Every non-empty bin appears with its support;
// only bins with support >= min_support are flagged as reported.
std::vector<LengthBin> slice_by_length(const Metrics& metrics, const Corpus& corpus,
                                       size_t bin_width = 4, size_t min_support = 50);

struct SizePoint {
  size_t size = 0;
  double f1 = 0.0;
};

const std::vector<size_t>& default_sizes();

// Runs `cell(size)` for each size, on up to `jobs` threads. Results follow
// the order of `sizes` regardless of completion order. Exceptions propagate.
std::vector<SizePoint> size_sweep(const std::function<double(size_t)>& cell,
                                  const std::vector<size_t>& sizes = default_sizes(),
                                  size_t jobs = 1);

enum class TrendLabel { kPositive, kNegative, kUncorrelated, kInvariant };
std::string_view trend_name(TrendLabel label);

struct TrendConfig {
  double invariance_band = 0.02;
  double rho_threshold = 0.5;
};

// Ranks with ties sharing their mean rank (1-based).
std::vector<double> midranks(const std::vector<double>& values);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Needs at least three values; throws InvalidConfig otherwise.
TrendLabel classify_trend(const std::vector<double>& values, const TrendConfig& cfg = {});

struct Ranking {
  std::vector<std::string> order;  // macro-F1 descending, ties alphabetical
  std::optional<std::string> best_unsupervised;
  std::optional<std::string> best_supervised;
};

Ranking rank_models(const MetricsGrid& grid, TaskKind task,
                    const std::function<ModelCategory(std::string_view)>& category =
                        model_category);

// CSV with header "model,task,bin,f1,support" (bins) or
// "model,task,size,f1,support" (sizes; support is the test size).
std::string length_slices_csv(const std::string& model, TaskKind task,
                              const std::vector<LengthBin>& bins);
std::string size_sweep_csv(const std::string& model, TaskKind task,
                           const std::vector<SizePoint>& points, size_t support);

}  // namespace tweetprobe

#endif  // TWEETPROBE_ANALYSIS_H_
