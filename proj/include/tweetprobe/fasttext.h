#ifndef TWEETPROBE_FASTTEXT_H_
#define TWEETPROBE_FASTTEXT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tweetprobe/corpus.h"
#include "tweetprobe/probe.h"
#include "tweetprobe/tasks.h"

namespace tweetprobe {

// Averaged hashed n-gram embeddings followed by a linear softmax, trained
// end to end.
struct FtConfig {
  size_t buckets = size_t{1} << 16;
  size_t dim = 10;
  size_t max_n = 2;
  double learning_rate = 1e-2;
  size_t batch_size = 64;
  size_t max_epochs = 100;
  size_t patience = 5;
  double l2 = 1e-5;  // output layer only
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  uint64_t seed = 1;

  std::string hash() const;
};

// Throws InvalidConfig.
void validate(const FtConfig& cfg);

struct FtModel {
  size_t buckets = 0;
  size_t dim = 0;
  size_t max_n = 0;
  size_t class_count = 0;
  std::vector<double> embeddings;  // buckets x dim
  std::vector<double> output;      // class_count x dim
  std::vector<double> bias;        // class_count
  uint64_t seed = 0;
  std::string config_hash;

  bool operator==(const FtModel&) const = default;
};

// Bucket of a feature string: FNV-1a 64 of the string, passed through the
// splitmix64 finalizer (mix_seed), modulo `buckets`.
uint32_t ft_bucket(std::string_view feature, size_t buckets);

// Feature strings: "w:" + each lowercased n-gram (n = 1..max_n) of the
// tweet's lexical units, then "a<slot>:" + each lowercased aux item (member
// words joined by single spaces).
std::vector<std::string> ft_feature_strings(const Tweet& tweet, const std::vector<AuxItem>& aux,
                                            size_t max_n);
std::vector<uint32_t> featurize_ft(const Tweet& tweet, const std::vector<AuxItem>& aux,
                                   size_t max_n, size_t buckets);

// Hidden vector = mean of the feature rows (zeros when there are none).
std::vector<double> ft_hidden(const FtModel& model, std::span<const uint32_t> features);
Prediction predict_ft(const FtModel& model, std::span<const uint32_t> features);
Prediction predict_ft(const FtModel& model, const Tweet& tweet, const std::vector<AuxItem>& aux);

// Per-instance feature lists of a dataset. Throws MissingTweetEmbedding.
std::vector<std::vector<uint32_t>> featurize_dataset(const TaskDataset& dataset,
                                                     const Corpus& corpus, size_t max_n,
                                                     size_t buckets);

// Mean cross-entropy over `rows` plus 0.5 * l2 * ||output||^2. Gradients
// are dense and match the model's shapes.
double ft_objective(const FtModel& model, const std::vector<std::vector<uint32_t>>& features,
                    std::span<const int> labels, std::span<const size_t> rows, double l2,
                    FtModel* grad);

// Same optimizer contract as train(); embedding rows receive lazy Adam
// updates (only rows touched by the batch move). Throws DegenerateLabels or
// NonFiniteLoss.
FtModel train_ft(const TaskDataset& dataset, const Corpus& corpus, const FtConfig& cfg,
                 std::vector<EpochRecord>* history = nullptr);
FtModel train_ft(const std::vector<std::vector<uint32_t>>& features, std::span<const int> labels,
                 size_t class_count, std::span<const size_t> train_rows,
                 std::span<const size_t> val_rows, const FtConfig& cfg,
                 std::vector<EpochRecord>* history = nullptr);

Metrics evaluate_ft(const FtModel& model, const std::vector<std::vector<uint32_t>>& features,
                    const TaskDataset& dataset, std::span<const size_t> rows);

// Same protocol as probe_gradient_check, on a model with 3 classes, 13
// buckets, dim 4 and 20 random feature lists.
double ft_gradient_check(const GradientCheckOptions& options);

// JSON header line, then one line per embedding row, output row and the
// bias row.
void save_ft(const FtModel& model, const std::filesystem::path& path);
FtModel load_ft(const std::filesystem::path& path);

}  // namespace tweetprobe

#endif  // TWEETPROBE_FASTTEXT_H_
