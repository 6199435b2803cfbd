#ifndef TWEETPROBE_PROBE_H_
#define TWEETPROBE_PROBE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tweetprobe/corpus.h"
#include "tweetprobe/embedders.h"
#include "tweetprobe/tasks.h"

namespace tweetprobe {

// Row-compressed feature matrix. Column indices within a row are strictly
// increasing.
struct FeatureMatrix {
  size_t dim = 0;
  std::vector<size_t> row_ptr = {0};
  std::vector<uint32_t> col;
  std::vector<double> val;

  size_t rows() const { return row_ptr.size() - 1; }
  std::span<const uint32_t> row_cols(size_t r) const {
    return {col.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }
  std::span<const double> row_vals(size_t r) const {
    return {val.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
  }
  void append(const SparseVector& row);
  std::vector<double> dense_row(size_t r) const;
};

FeatureMatrix dense_to_features(const std::vector<std::vector<double>>& rows);

struct FeatureSpec {
  std::shared_ptr<const TweetEncoder> tweet;
  std::shared_ptr<const AuxEncoder> aux;  // may be null for arity-0 tasks

  // tweet_dim + arity * aux_dim.
  size_t dim(size_t arity) const;
};

// Row i = concat(tweet embedding, aux embeddings in order). Throws
// MissingTweetEmbedding when a tweet id is absent from the corpus or from
// an external table, and InvalidConfig when aux inputs have no encoder.
FeatureMatrix assemble_features(const TaskDataset& dataset, const Corpus& corpus,
                                const FeatureSpec& spec);

std::vector<int> dataset_labels(const TaskDataset& dataset);

struct TrainConfig {
  double learning_rate = 1e-3;
  size_t batch_size = 64;
  size_t max_epochs = 100;
  size_t patience = 5;
  double l2 = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  uint64_t seed = 1;

  std::string hash() const;
};

// Throws InvalidConfig.
void validate(const TrainConfig& cfg);

struct ProbeModel {
  size_t class_count = 0;
  size_t dim = 0;
  std::vector<double> weights;  // class_count x dim, row-major
  std::vector<double> bias;     // class_count
  uint64_t seed = 0;
  std::string config_hash;

  ProbeModel() = default;
  ProbeModel(size_t classes, size_t features);

  // Logits of row r of `x`, written to `out` (size class_count).
  void logits(const FeatureMatrix& x, size_t r, std::span<double> out) const;
  bool operator==(const ProbeModel&) const = default;
};

struct EpochRecord {
  size_t epoch = 0;
  double train_loss = 0.0;  // full-batch objective at epoch end
  double val_macro_f1 = 0.0;
};

// Mean cross-entropy over `rows` plus 0.5 * l2 * ||weights||^2 (bias
// unpenalized). Fills `grad` (same shape as the model) when non-null.
double probe_objective(const ProbeModel& model, const FeatureMatrix& x,
                       std::span<const int> labels, std::span<const size_t> rows, double l2,
                       ProbeModel* grad);

// Adam on mini-batches, early stopping on validation macro-F1 (train
// macro-F1 when the validation split is empty); returns the best epoch's
// parameters. Throws DegenerateLabels or NonFiniteLoss.
ProbeModel train(const FeatureMatrix& x, std::span<const int> labels, size_t class_count,
                 std::span<const size_t> train_rows, std::span<const size_t> val_rows,
                 const TrainConfig& cfg, std::vector<EpochRecord>* history = nullptr);

struct Prediction {
  int label = 0;
  std::vector<double> probabilities;
};

// Numerically stable softmax; argmax ties go to the lowest class index.
std::vector<double> softmax(std::span<const double> logits);
int argmax(std::span<const double> values);

Prediction predict(const ProbeModel& model, const FeatureMatrix& x, size_t row);
std::vector<int> predict_labels(const ProbeModel& model, const FeatureMatrix& x,
                                std::span<const size_t> rows);

struct InstanceRecord {
  std::string tweet_id;
  int predicted = 0;
  int gold = 0;

  bool operator==(const InstanceRecord&) const = default;
};

struct Metrics {
  size_t class_count = 0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<size_t> support;
  std::vector<std::vector<size_t>> confusion;  // [gold][predicted]
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;  // equals accuracy
  std::vector<InstanceRecord> records;

  bool operator==(const Metrics&) const = default;
};

// Macro-F1 averages over the classes that occur in gold or predictions;
// per-class scores with a zero denominator are 0.
Metrics compute_metrics(std::span<const int> gold, std::span<const int> predicted,
                        size_t class_count);

// Scores the given rows and attaches instance records (tweet ids from the
// dataset).
Metrics evaluate(const ProbeModel& model, const FeatureMatrix& x, const TaskDataset& dataset,
                 std::span<const size_t> rows);

// Central-difference check (step 1e-5) on a random problem of 3 classes,
// dimension 7 and 20 samples. Returns the max relative error
// |a - n| / max(|a| + |n|, 1e-6). `corrupt`, when set, edits the analytic
// gradient before comparison (fault injection for tests).
struct GradientCheckOptions {
  uint64_t seed = 1;
  bool zero_weights = false;
  double l2 = 1e-2;
  std::function<void(std::vector<double>&)> corrupt;
};
double probe_gradient_check(const GradientCheckOptions& options);

// Negates the largest-magnitude component.
void negate_largest(std::vector<double>& grad);

// Text artifact: one JSON header line, then one line per class holding the
// bias followed by the weights.
void save_probe(const ProbeModel& model, const std::filesystem::path& path);
ProbeModel load_probe(const std::filesystem::path& path);

std::string metrics_to_json(const Metrics& metrics);
Metrics metrics_from_json(std::string_view text);
// Columns: class,precision,recall,f1,support followed by macro and micro rows.
std::string metrics_to_csv(const Metrics& metrics);

}  // namespace tweetprobe

#endif  // TWEETPROBE_PROBE_H_
