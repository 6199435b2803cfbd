#include "tweetprobe/probe.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/util.h"

namespace tweetprobe {

void FeatureMatrix::append(const SparseVector& row) {
  for (size_t i = 0; i < row.nnz(); ++i) {
    if (row.index[i] >= dim) {
      throw Error(ErrorCode::kDimMismatch, "feature index " + std::to_string(row.index[i]) +
                                               " out of range for dim " + std::to_string(dim));
    }
    col.push_back(row.index[i]);
    val.push_back(row.value[i]);
  }
  row_ptr.push_back(col.size());
}

std::vector<double> FeatureMatrix::dense_row(size_t r) const {
  std::vector<double> out(dim, 0.0);
  const auto cols = row_cols(r);
  const auto vals = row_vals(r);
  for (size_t i = 0; i < cols.size(); ++i) out[cols[i]] = vals[i];
  return out;
}

FeatureMatrix dense_to_features(const std::vector<std::vector<double>>& rows) {
  FeatureMatrix x;
  x.dim = rows.empty() ? 0 : rows.front().size();
  SparseVector sv;
  for (const auto& row : rows) {
    if (row.size() != x.dim) throw Error(ErrorCode::kDimMismatch, "ragged dense rows");
    sv.index.clear();
    sv.value.clear();
    for (size_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0.0) sv.push(static_cast<uint32_t>(j), row[j]);
    }
    x.append(sv);
  }
  return x;
}

size_t FeatureSpec::dim(size_t arity) const {
  size_t d = tweet ? tweet->dim() : 0;
  if (arity > 0 && aux) d += arity * aux->dim();
  return d;
}

FeatureMatrix assemble_features(const TaskDataset& dataset, const Corpus& corpus,
                                const FeatureSpec& spec) {
  if (!spec.tweet) throw Error(ErrorCode::kInvalidConfig, "feature spec has no tweet encoder");
  const size_t arity = aux_arity(dataset.kind);
  if (arity > 0 && !spec.aux) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("task ") + std::string(task_name(dataset.kind)) +
                    " needs an aux encoder");
  }
  FeatureMatrix x;
  x.dim = spec.dim(arity);
  x.row_ptr.reserve(dataset.instances.size() + 1);
  const auto tweet_dim = static_cast<uint32_t>(spec.tweet->dim());
  SparseVector row;
  for (const TaskInstance& inst : dataset.instances) {
    const Tweet* tweet = corpus.find(inst.tweet_id);
    if (tweet == nullptr) {
      throw Error(ErrorCode::kMissingTweetEmbedding, "tweet '" + inst.tweet_id + "' not in corpus");
    }
    if (inst.aux.size() != arity) {
      throw Error(ErrorCode::kMalformed, "instance for '" + inst.tweet_id + "' has aux arity " +
                                             std::to_string(inst.aux.size()));
    }
    row.index.clear();
    row.value.clear();
    spec.tweet->encode(*tweet, row, 0);
    for (size_t s = 0; s < arity; ++s) {
      const auto offset = static_cast<uint32_t>(tweet_dim + s * spec.aux->dim());
      spec.aux->encode(inst.aux[s], inst.tweet_id, s, row, offset);
    }
    x.append(row);
  }
  return x;
}

std::vector<int> dataset_labels(const TaskDataset& dataset) {
  std::vector<int> labels;
  labels.reserve(dataset.instances.size());
  for (const TaskInstance& inst : dataset.instances) labels.push_back(inst.label);
  return labels;
}

std::string TrainConfig::hash() const {
  nlohmann::ordered_json j;
  j["learning_rate"] = learning_rate;
  j["batch_size"] = batch_size;
  j["max_epochs"] = max_epochs;
  j["patience"] = patience;
  j["l2"] = l2;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["epsilon"] = epsilon;
  j["seed"] = seed;
  return hex64(fnv1a64(j.dump()));
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || cfg.batch_size == 0 || cfg.max_epochs == 0 ||
      cfg.patience == 0 || !(cfg.l2 >= 0.0) ||
      !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) ||
      !(cfg.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "invalid training configuration");
  }
}

ProbeModel::ProbeModel(size_t classes, size_t features)
    : class_count(classes), dim(features), weights(classes * features, 0.0), bias(classes, 0.0) {}

void ProbeModel::logits(const FeatureMatrix& x, size_t r, std::span<double> out) const {
  const auto cols = x.row_cols(r);
  const auto vals = x.row_vals(r);
  for (size_t c = 0; c < class_count; ++c) {
    const double* w = weights.data() + c * dim;
    double z = bias[c];
    for (size_t i = 0; i < cols.size(); ++i) z += w[cols[i]] * vals[i];
    out[c] = z;
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double m = *std::max_element(p.begin(), p.end());
  double total = 0.0;
  for (double& v : p) {
    v = std::exp(v - m);
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

int argmax(std::span<const double> values) {
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<int>(best);
}

namespace {

void check_labels(std::span<const int> labels, size_t class_count) {
  for (int y : labels) {
    if (y < 0 || static_cast<size_t>(y) >= class_count) {
      throw Error(ErrorCode::kMalformed, "label " + std::to_string(y) + " outside [0, " +
                                             std::to_string(class_count) + ")");
    }
  }
}

// Accumulates the summed (not averaged) cross-entropy gradient of the rows
// into grad and returns the summed loss.
double accumulate(const ProbeModel& model, const FeatureMatrix& x, std::span<const int> labels,
                  std::span<const size_t> rows, ProbeModel* grad) {
  const size_t c_count = model.class_count;
  std::vector<double> z(c_count);
  double loss = 0.0;
  for (size_t r : rows) {
    model.logits(x, r, z);
    const double m = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& v : z) {
      v = std::exp(v - m);
      total += v;
    }
    const int y = labels[r];
    loss += std::log(total) - std::log(z[y]);
    if (grad == nullptr) continue;
    const auto cols = x.row_cols(r);
    const auto vals = x.row_vals(r);
    for (size_t c = 0; c < c_count; ++c) {
      const double d = z[c] / total - (static_cast<int>(c) == y ? 1.0 : 0.0);
      grad->bias[c] += d;
      double* g = grad->weights.data() + c * model.dim;
      for (size_t i = 0; i < cols.size(); ++i) g[cols[i]] += d * vals[i];
    }
  }
  return loss;
}

double l2_term(const std::vector<double>& w, double l2) {
  if (l2 == 0.0) return 0.0;
  double s = 0.0;
  for (double v : w) s += v * v;
  return 0.5 * l2 * s;
}

double macro_f1_of(const ProbeModel& model, const FeatureMatrix& x, std::span<const int> labels,
                   std::span<const size_t> rows) {
  std::vector<int> gold;
  gold.reserve(rows.size());
  for (size_t r : rows) gold.push_back(labels[r]);
  return compute_metrics(gold, predict_labels(model, x, rows), model.class_count).macro_f1;
}

struct Adam {
  double lr, beta1, beta2, epsilon;
  size_t step = 0;
  std::vector<double> m, v;

  Adam(const TrainConfig& cfg, size_t n)
      : lr(cfg.learning_rate), beta1(cfg.beta1), beta2(cfg.beta2), epsilon(cfg.epsilon),
        m(n, 0.0), v(n, 0.0) {}

  // Parameters laid out as [weights..., bias...].
  void update(std::vector<double>& w, std::vector<double>& b, const std::vector<double>& gw,
              const std::vector<double>& gb) {
    ++step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    const auto apply = [&](std::vector<double>& p, const std::vector<double>& g, size_t base) {
      for (size_t i = 0; i < p.size(); ++i) {
        double& mi = m[base + i];
        double& vi = v[base + i];
        mi = beta1 * mi + (1.0 - beta1) * g[i];
        vi = beta2 * vi + (1.0 - beta2) * g[i] * g[i];
        p[i] -= lr * (mi / c1) / (std::sqrt(vi / c2) + epsilon);
      }
    };
    apply(w, gw, 0);
    apply(b, gb, w.size());
  }
};

}  // namespace

double probe_objective(const ProbeModel& model, const FeatureMatrix& x,
                       std::span<const int> labels, std::span<const size_t> rows, double l2,
                       ProbeModel* grad) {
  if (grad != nullptr) *grad = ProbeModel(model.class_count, model.dim);
  if (rows.empty()) return l2_term(model.weights, l2);
  const double n = static_cast<double>(rows.size());
  const double loss = accumulate(model, x, labels, rows, grad) / n;
  if (grad != nullptr) {
    for (size_t i = 0; i < grad->weights.size(); ++i) {
      grad->weights[i] = grad->weights[i] / n + l2 * model.weights[i];
    }
    for (double& g : grad->bias) g /= n;
  }
  return loss + l2_term(model.weights, l2);
}

ProbeModel train(const FeatureMatrix& x, std::span<const int> labels, size_t class_count,
                 std::span<const size_t> train_rows, std::span<const size_t> val_rows,
                 const TrainConfig& cfg, std::vector<EpochRecord>* history) {
  validate(cfg);
  if (labels.size() != x.rows()) {
    throw Error(ErrorCode::kDimMismatch, "label count does not match feature rows");
  }
  check_labels(labels, class_count);
  {
    bool seen_two = false;
    for (size_t r : train_rows) {
      if (labels[r] != labels[train_rows.front()]) {
        seen_two = true;
        break;
      }
    }
    if (class_count < 2 || !seen_two) {
      throw Error(ErrorCode::kDegenerateLabels, "training split needs at least two labels");
    }
  }
  if (history != nullptr) history->clear();

  ProbeModel model(class_count, x.dim);
  model.seed = cfg.seed;
  model.config_hash = cfg.hash();
  ProbeModel best = model;
  ProbeModel grad(class_count, x.dim);
  Adam adam(cfg, model.weights.size() + model.bias.size());
  Rng rng(derive_seed(cfg.seed, 0x70be));
  std::vector<size_t> order(train_rows.begin(), train_rows.end());
  const std::span<const size_t> select = val_rows.empty() ? train_rows : val_rows;

  double best_f1 = -1.0;
  size_t stale = 0;
  for (size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<size_t>(order));
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::span<const size_t> batch(order.data() + start, end - start);
      const double loss = probe_objective(model, x, labels, batch, cfg.l2, &grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kNonFiniteLoss, "loss became non-finite in epoch " +
                                                   std::to_string(epoch));
      }
      adam.update(model.weights, model.bias, grad.weights, grad.bias);
    }
    const double train_loss = probe_objective(model, x, labels, train_rows, cfg.l2, nullptr);
    if (!std::isfinite(train_loss)) {
      throw Error(ErrorCode::kNonFiniteLoss, "loss became non-finite in epoch " +
                                                 std::to_string(epoch));
    }
    const double f1 = macro_f1_of(model, x, labels, select);
    if (history != nullptr) history->push_back({epoch, train_loss, f1});
    if (f1 > best_f1) {
      best_f1 = f1;
      best.weights = model.weights;
      best.bias = model.bias;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return best;
}

Prediction predict(const ProbeModel& model, const FeatureMatrix& x, size_t row) {
  std::vector<double> z(model.class_count);
  model.logits(x, row, z);
  Prediction p;
  p.label = argmax(z);
  p.probabilities = softmax(z);
  return p;
}

std::vector<int> predict_labels(const ProbeModel& model, const FeatureMatrix& x,
                                std::span<const size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  std::vector<double> z(model.class_count);
  for (size_t r : rows) {
    model.logits(x, r, z);
    out.push_back(argmax(z));
  }
  return out;
}

Metrics compute_metrics(std::span<const int> gold, std::span<const int> predicted,
                        size_t class_count) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorCode::kDimMismatch, "gold and predicted lengths differ");
  }
  check_labels(gold, class_count);
  check_labels(predicted, class_count);
  Metrics m;
  m.class_count = class_count;
  m.confusion.assign(class_count, std::vector<size_t>(class_count, 0));
  for (size_t i = 0; i < gold.size(); ++i) ++m.confusion[gold[i]][predicted[i]];
  m.precision.assign(class_count, 0.0);
  m.recall.assign(class_count, 0.0);
  m.f1.assign(class_count, 0.0);
  m.support.assign(class_count, 0);
  size_t correct = 0;
  double f1_sum = 0.0;
  size_t present = 0;
  for (size_t c = 0; c < class_count; ++c) {
    size_t tp = m.confusion[c][c];
    size_t row = 0;
    size_t column = 0;
    for (size_t k = 0; k < class_count; ++k) {
      row += m.confusion[c][k];
      column += m.confusion[k][c];
    }
    correct += tp;
    m.support[c] = row;
    m.precision[c] = column == 0 ? 0.0 : static_cast<double>(tp) / column;
    m.recall[c] = row == 0 ? 0.0 : static_cast<double>(tp) / row;
    const double pr = m.precision[c] + m.recall[c];
    m.f1[c] = pr == 0.0 ? 0.0 : 2.0 * m.precision[c] * m.recall[c] / pr;
    if (row > 0 || column > 0) {
      f1_sum += m.f1[c];
      ++present;
    }
  }
  m.macro_f1 = present == 0 ? 0.0 : f1_sum / static_cast<double>(present);
  m.micro_f1 = gold.empty() ? 0.0 : static_cast<double>(correct) / gold.size();
  return m;
}

Metrics evaluate(const ProbeModel& model, const FeatureMatrix& x, const TaskDataset& dataset,
                 std::span<const size_t> rows) {
  const std::vector<int> predicted = predict_labels(model, x, rows);
  std::vector<int> gold;
  gold.reserve(rows.size());
  for (size_t r : rows) gold.push_back(dataset.instances.at(r).label);
  Metrics m = compute_metrics(gold, predicted, model.class_count);
  m.records.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    m.records.push_back({dataset.instances[rows[i]].tweet_id, predicted[i], gold[i]});
  }
  return m;
}

void negate_largest(std::vector<double>& grad) {
  if (grad.empty()) return;
  size_t k = 0;
  for (size_t i = 1; i < grad.size(); ++i) {
    if (std::abs(grad[i]) > std::abs(grad[k])) k = i;
  }
  grad[k] = -grad[k];
}

double probe_gradient_check(const GradientCheckOptions& options) {
  constexpr size_t kClasses = 3;
  constexpr size_t kDim = 7;
  constexpr size_t kSamples = 20;
  constexpr double kStep = 1e-5;
  Rng rng(options.seed);
  std::vector<std::vector<double>> dense(kSamples, std::vector<double>(kDim));
  for (auto& row : dense) {
    for (double& v : row) v = rng.normal();
  }
  const FeatureMatrix x = dense_to_features(dense);
  std::vector<int> labels(kSamples);
  for (int& y : labels) y = static_cast<int>(rng.uniform(kClasses));
  std::vector<size_t> rows(kSamples);
  for (size_t i = 0; i < kSamples; ++i) rows[i] = i;

  ProbeModel model(kClasses, kDim);
  if (!options.zero_weights) {
    for (double& w : model.weights) w = 0.5 * rng.normal();
    for (double& b : model.bias) b = 0.5 * rng.normal();
  }
  ProbeModel grad;
  probe_objective(model, x, labels, rows, options.l2, &grad);
  std::vector<double> analytic = grad.weights;
  analytic.insert(analytic.end(), grad.bias.begin(), grad.bias.end());
  if (options.corrupt) options.corrupt(analytic);

  double worst = 0.0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    double& p = i < model.weights.size() ? model.weights[i] : model.bias[i - model.weights.size()];
    const double saved = p;
    p = saved + kStep;
    const double up = probe_objective(model, x, labels, rows, options.l2, nullptr);
    p = saved - kStep;
    const double down = probe_objective(model, x, labels, rows, options.l2, nullptr);
    p = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double rel = std::abs(analytic[i] - numeric) /
                       std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-6);
    worst = std::max(worst, rel);
  }
  return worst;
}

void save_probe(const ProbeModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json header;
  header["format"] = "tweetprobe-probe-v1";
  header["class_count"] = model.class_count;
  header["dim"] = model.dim;
  header["seed"] = model.seed;
  header["config_hash"] = model.config_hash;
  std::ostringstream out;
  out << header.dump() << '\n';
  for (size_t c = 0; c < model.class_count; ++c) {
    out << format_double(model.bias[c]);
    for (size_t j = 0; j < model.dim; ++j) out << ' ' << format_double(model.weights[c * model.dim + j]);
    out << '\n';
  }
  write_file(path, out.str());
}

ProbeModel load_probe(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  auto header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object() ||
      header.value("format", "") != "tweetprobe-probe-v1") {
    throw Error(ErrorCode::kMalformed, "not a probe model: " + path.string());
  }
  ProbeModel model(header["class_count"].get<size_t>(), header["dim"].get<size_t>());
  model.seed = header["seed"].get<uint64_t>();
  model.config_hash = header["config_hash"].get<std::string>();
  for (size_t c = 0; c < model.class_count; ++c) {
    if (!std::getline(in, line)) throw Error(ErrorCode::kMalformed, "missing row " + std::to_string(c));
    const auto parts = split(line, ' ');
    if (parts.size() != model.dim + 1) {
      throw Error(ErrorCode::kDimMismatch, "row " + std::to_string(c) + " has " +
                                               std::to_string(parts.size()) + " values");
    }
    for (size_t j = 0; j <= model.dim; ++j) {
      auto v = parse_double(parts[j]);
      if (!v) throw Error(ErrorCode::kMalformed, "row " + std::to_string(c));
      (j == 0 ? model.bias[c] : model.weights[c * model.dim + j - 1]) = *v;
    }
  }
  return model;
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["metric"] = "macro_f1";
  j["class_count"] = m.class_count;
  j["macro_f1"] = m.macro_f1;
  j["micro_f1"] = m.micro_f1;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  j["support"] = m.support;
  j["confusion"] = m.confusion;
  auto records = nlohmann::ordered_json::array();
  for (const InstanceRecord& r : m.records) {
    records.push_back({r.tweet_id, r.predicted, r.gold});
  }
  j["records"] = std::move(records);
  return j.dump(1) + "\n";
}

Metrics metrics_from_json(std::string_view text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("macro_f1")) {
    throw Error(ErrorCode::kMalformed, "not a metrics document");
  }
  Metrics m;
  m.class_count = j["class_count"].get<size_t>();
  m.macro_f1 = j["macro_f1"].get<double>();
  m.micro_f1 = j["micro_f1"].get<double>();
  m.precision = j["precision"].get<std::vector<double>>();
  m.recall = j["recall"].get<std::vector<double>>();
  m.f1 = j["f1"].get<std::vector<double>>();
  m.support = j["support"].get<std::vector<size_t>>();
  m.confusion = j["confusion"].get<std::vector<std::vector<size_t>>>();
  for (const auto& r : j["records"]) {
    m.records.push_back({r[0].get<std::string>(), r[1].get<int>(), r[2].get<int>()});
  }
  return m;
}

std::string metrics_to_csv(const Metrics& m) {
  std::ostringstream out;
  out << "class,precision,recall,f1,support\n";
  size_t total = 0;
  for (size_t c = 0; c < m.class_count; ++c) {
    out << c << ',' << format_double(m.precision[c]) << ',' << format_double(m.recall[c]) << ','
        << format_double(m.f1[c]) << ',' << m.support[c] << '\n';
    total += m.support[c];
  }
  out << "macro,,," << format_double(m.macro_f1) << ',' << total << '\n';
  out << "micro,,," << format_double(m.micro_f1) << ',' << total << '\n';
  return out.str();
}

}  // namespace tweetprobe
