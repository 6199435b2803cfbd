#include "tweetprobe/fasttext.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "tweetprobe/embedders.h"
#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/util.h"

namespace tweetprobe {

std::string FtConfig::hash() const {
  nlohmann::ordered_json j;
  j["buckets"] = buckets;
  j["dim"] = dim;
  j["max_n"] = max_n;
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

void validate(const FtConfig& cfg) {
  if (cfg.buckets == 0 || cfg.buckets > (size_t{1} << 32) || cfg.dim == 0 || cfg.max_n == 0 ||
      !(cfg.learning_rate > 0.0) || cfg.batch_size == 0 || cfg.max_epochs == 0 ||
      cfg.patience == 0 || !(cfg.l2 >= 0.0) ||
      !(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) ||
      !(cfg.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "invalid FastText configuration");
  }
}

uint32_t ft_bucket(std::string_view feature, size_t buckets) {
  return static_cast<uint32_t>(mix_seed(fnv1a64(feature)) % buckets);
}

std::vector<std::string> ft_feature_strings(const Tweet& tweet, const std::vector<AuxItem>& aux,
                                            size_t max_n) {
  std::vector<std::string> out;
  for (const std::string& g : ngrams(lexical_units(tweet), max_n)) out.push_back("w:" + g);
  for (size_t s = 0; s < aux.size(); ++s) {
    std::string f = "a" + std::to_string(s) + ":";
    for (size_t i = 0; i < aux[s].size(); ++i) {
      if (i > 0) f.push_back(' ');
      f += to_lower_ascii(aux[s][i]);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<uint32_t> featurize_ft(const Tweet& tweet, const std::vector<AuxItem>& aux,
                                   size_t max_n, size_t buckets) {
  std::vector<uint32_t> out;
  for (const std::string& f : ft_feature_strings(tweet, aux, max_n)) {
    out.push_back(ft_bucket(f, buckets));
  }
  return out;
}

std::vector<double> ft_hidden(const FtModel& model, std::span<const uint32_t> features) {
  std::vector<double> h(model.dim, 0.0);
  if (features.empty()) return h;
  for (uint32_t f : features) {
    const double* e = model.embeddings.data() + static_cast<size_t>(f) * model.dim;
    for (size_t d = 0; d < model.dim; ++d) h[d] += e[d];
  }
  const double n = static_cast<double>(features.size());
  for (double& v : h) v /= n;
  return h;
}

namespace {

std::vector<double> ft_logits(const FtModel& model, const std::vector<double>& h) {
  std::vector<double> z(model.class_count);
  for (size_t c = 0; c < model.class_count; ++c) {
    const double* u = model.output.data() + c * model.dim;
    double s = model.bias[c];
    for (size_t d = 0; d < model.dim; ++d) s += u[d] * h[d];
    z[c] = s;
  }
  return z;
}

FtModel zero_like(const FtModel& m) {
  FtModel g;
  g.buckets = m.buckets;
  g.dim = m.dim;
  g.max_n = m.max_n;
  g.class_count = m.class_count;
  g.embeddings.assign(m.embeddings.size(), 0.0);
  g.output.assign(m.output.size(), 0.0);
  g.bias.assign(m.bias.size(), 0.0);
  return g;
}

// Adds the summed cross-entropy gradient of one instance. `touched`
// collects embedding rows receiving gradient when non-null.
double accumulate_one(const FtModel& model, std::span<const uint32_t> feats, int y,
                      FtModel* grad, std::vector<uint32_t>* touched) {
  const std::vector<double> h = ft_hidden(model, feats);
  std::vector<double> z = ft_logits(model, h);
  const double m = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    total += v;
  }
  const double loss = std::log(total) - std::log(z[y]);
  if (grad == nullptr) return loss;
  std::vector<double> gh(model.dim, 0.0);
  for (size_t c = 0; c < model.class_count; ++c) {
    const double d = z[c] / total - (static_cast<int>(c) == y ? 1.0 : 0.0);
    grad->bias[c] += d;
    double* gu = grad->output.data() + c * model.dim;
    const double* u = model.output.data() + c * model.dim;
    for (size_t k = 0; k < model.dim; ++k) {
      gu[k] += d * h[k];
      gh[k] += d * u[k];
    }
  }
  if (!feats.empty()) {
    const double inv = 1.0 / static_cast<double>(feats.size());
    for (uint32_t f : feats) {
      double* ge = grad->embeddings.data() + static_cast<size_t>(f) * model.dim;
      for (size_t k = 0; k < model.dim; ++k) ge[k] += gh[k] * inv;
      if (touched != nullptr) touched->push_back(f);
    }
  }
  return loss;
}

double output_l2(const FtModel& model, double l2) {
  if (l2 == 0.0) return 0.0;
  double s = 0.0;
  for (double v : model.output) s += v * v;
  return 0.5 * l2 * s;
}

FtModel init_model(const FtConfig& cfg, size_t class_count) {
  FtModel model;
  model.buckets = cfg.buckets;
  model.dim = cfg.dim;
  model.max_n = cfg.max_n;
  model.class_count = class_count;
  model.seed = cfg.seed;
  model.config_hash = cfg.hash();
  model.embeddings.resize(cfg.buckets * cfg.dim);
  Rng rng(derive_seed(cfg.seed, 0xf7e));
  const double bound = 1.0 / static_cast<double>(cfg.dim);
  for (double& e : model.embeddings) e = rng.uniform(-bound, bound);
  model.output.assign(class_count * cfg.dim, 0.0);
  model.bias.assign(class_count, 0.0);
  return model;
}

}  // namespace

Prediction predict_ft(const FtModel& model, std::span<const uint32_t> features) {
  const std::vector<double> z = ft_logits(model, ft_hidden(model, features));
  Prediction p;
  p.label = argmax(z);
  p.probabilities = softmax(z);
  return p;
}

Prediction predict_ft(const FtModel& model, const Tweet& tweet, const std::vector<AuxItem>& aux) {
  return predict_ft(model, featurize_ft(tweet, aux, model.max_n, model.buckets));
}

std::vector<std::vector<uint32_t>> featurize_dataset(const TaskDataset& dataset,
                                                     const Corpus& corpus, size_t max_n,
                                                     size_t buckets) {
  std::vector<std::vector<uint32_t>> out;
  out.reserve(dataset.instances.size());
  for (const TaskInstance& inst : dataset.instances) {
    const Tweet* tweet = corpus.find(inst.tweet_id);
    if (tweet == nullptr) {
      throw Error(ErrorCode::kMissingTweetEmbedding, "tweet '" + inst.tweet_id + "' not in corpus");
    }
    out.push_back(featurize_ft(*tweet, inst.aux, max_n, buckets));
  }
  return out;
}

double ft_objective(const FtModel& model, const std::vector<std::vector<uint32_t>>& features,
                    std::span<const int> labels, std::span<const size_t> rows, double l2,
                    FtModel* grad) {
  if (grad != nullptr) *grad = zero_like(model);
  double loss = 0.0;
  for (size_t r : rows) loss += accumulate_one(model, features[r], labels[r], grad, nullptr);
  const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
  if (grad != nullptr) {
    for (double& g : grad->embeddings) g /= n;
    for (double& g : grad->bias) g /= n;
    for (size_t i = 0; i < grad->output.size(); ++i) {
      grad->output[i] = grad->output[i] / n + l2 * model.output[i];
    }
  }
  return loss / n + output_l2(model, l2);
}

FtModel train_ft(const std::vector<std::vector<uint32_t>>& features, std::span<const int> labels,
                 size_t class_count, std::span<const size_t> train_rows,
                 std::span<const size_t> val_rows, const FtConfig& cfg,
                 std::vector<EpochRecord>* history) {
  validate(cfg);
  if (labels.size() != features.size()) {
    throw Error(ErrorCode::kDimMismatch, "label count does not match feature rows");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<size_t>(y) >= class_count) {
      throw Error(ErrorCode::kMalformed, "label " + std::to_string(y) + " out of range");
    }
  }
  for (const auto& feats : features) {
    for (uint32_t f : feats) {
      if (f >= cfg.buckets) throw Error(ErrorCode::kDimMismatch, "bucket index out of range");
    }
  }
  bool seen_two = false;
  for (size_t r : train_rows) seen_two = seen_two || labels[r] != labels[train_rows.front()];
  if (class_count < 2 || !seen_two) {
    throw Error(ErrorCode::kDegenerateLabels, "training split needs at least two labels");
  }
  if (history != nullptr) history->clear();

  FtModel model = init_model(cfg, class_count);
  FtModel best = model;
  FtModel grad = zero_like(model);
  const size_t dim = cfg.dim;
  std::vector<double> m_e(model.embeddings.size(), 0.0), v_e(model.embeddings.size(), 0.0);
  std::vector<double> m_u(model.output.size(), 0.0), v_u(model.output.size(), 0.0);
  std::vector<double> m_b(class_count, 0.0), v_b(class_count, 0.0);
  size_t step = 0;

  const auto adam = [&](double& p, double& m, double& v, double g, double c1, double c2) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
    p -= cfg.learning_rate * (m / c1) / (std::sqrt(v / c2) + cfg.epsilon);
  };

  const auto macro_f1 = [&](std::span<const size_t> rows) {
    std::vector<int> gold, pred;
    for (size_t r : rows) {
      gold.push_back(labels[r]);
      pred.push_back(predict_ft(model, features[r]).label);
    }
    return compute_metrics(gold, pred, class_count).macro_f1;
  };

  Rng rng(derive_seed(cfg.seed, 0x70be));
  std::vector<size_t> order(train_rows.begin(), train_rows.end());
  const std::span<const size_t> select = val_rows.empty() ? train_rows : val_rows;
  std::vector<uint32_t> touched;
  double best_f1 = -1.0;
  size_t stale = 0;
  for (size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<size_t>(order));
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      const double n = static_cast<double>(end - start);
      touched.clear();
      std::fill(grad.output.begin(), grad.output.end(), 0.0);
      std::fill(grad.bias.begin(), grad.bias.end(), 0.0);
      double loss = 0.0;
      for (size_t i = start; i < end; ++i) {
        loss += accumulate_one(model, features[order[i]], labels[order[i]], &grad, &touched);
      }
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kNonFiniteLoss, "loss became non-finite in epoch " +
                                                   std::to_string(epoch));
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

      ++step;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (size_t i = 0; i < model.output.size(); ++i) {
        adam(model.output[i], m_u[i], v_u[i], grad.output[i] / n + cfg.l2 * model.output[i], c1, c2);
      }
      for (size_t c = 0; c < class_count; ++c) adam(model.bias[c], m_b[c], v_b[c], grad.bias[c] / n, c1, c2);
      for (uint32_t f : touched) {
        const size_t base = static_cast<size_t>(f) * dim;
        for (size_t k = 0; k < dim; ++k) {
          double& g = grad.embeddings[base + k];
          adam(model.embeddings[base + k], m_e[base + k], v_e[base + k], g / n, c1, c2);
          g = 0.0;
        }
      }
    }
    const double train_loss = ft_objective(model, features, labels, train_rows, cfg.l2, nullptr);
    if (!std::isfinite(train_loss)) {
      throw Error(ErrorCode::kNonFiniteLoss, "loss became non-finite in epoch " +
                                                 std::to_string(epoch));
    }
    const double f1 = macro_f1(select);
    if (history != nullptr) history->push_back({epoch, train_loss, f1});
    if (f1 > best_f1) {
      best_f1 = f1;
      best.embeddings = model.embeddings;
      best.output = model.output;
      best.bias = model.bias;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return best;
}

FtModel train_ft(const TaskDataset& dataset, const Corpus& corpus, const FtConfig& cfg,
                 std::vector<EpochRecord>* history) {
  validate(cfg);
  const auto features = featurize_dataset(dataset, corpus, cfg.max_n, cfg.buckets);
  const std::vector<int> labels = dataset_labels(dataset);
  return train_ft(features, labels, dataset.class_count, dataset.train, dataset.val, cfg, history);
}

Metrics evaluate_ft(const FtModel& model, const std::vector<std::vector<uint32_t>>& features,
                    const TaskDataset& dataset, std::span<const size_t> rows) {
  std::vector<int> gold, pred;
  for (size_t r : rows) {
    gold.push_back(dataset.instances.at(r).label);
    pred.push_back(predict_ft(model, features.at(r)).label);
  }
  Metrics m = compute_metrics(gold, pred, model.class_count);
  for (size_t i = 0; i < rows.size(); ++i) {
    m.records.push_back({dataset.instances[rows[i]].tweet_id, pred[i], gold[i]});
  }
  return m;
}

double ft_gradient_check(const GradientCheckOptions& options) {
  constexpr size_t kClasses = 3;
  constexpr size_t kBuckets = 13;
  constexpr size_t kDim = 4;
  constexpr size_t kSamples = 20;
  constexpr double kStep = 1e-5;
  Rng rng(options.seed);
  FtConfig cfg;
  cfg.buckets = kBuckets;
  cfg.dim = kDim;
  cfg.seed = options.seed;
  FtModel model = init_model(cfg, kClasses);
  for (double& e : model.embeddings) e = rng.normal();
  if (!options.zero_weights) {
    for (double& u : model.output) u = 0.5 * rng.normal();
    for (double& b : model.bias) b = 0.5 * rng.normal();
  }
  std::vector<std::vector<uint32_t>> features(kSamples);
  for (auto& f : features) {
    const size_t n = rng.uniform(6);  // includes empty lists
    for (size_t i = 0; i < n; ++i) f.push_back(static_cast<uint32_t>(rng.uniform(kBuckets)));
  }
  std::vector<int> labels(kSamples);
  for (int& y : labels) y = static_cast<int>(rng.uniform(kClasses));
  std::vector<size_t> rows(kSamples);
  for (size_t i = 0; i < kSamples; ++i) rows[i] = i;

  FtModel grad;
  ft_objective(model, features, labels, rows, options.l2, &grad);
  std::vector<double> analytic = grad.embeddings;
  analytic.insert(analytic.end(), grad.output.begin(), grad.output.end());
  analytic.insert(analytic.end(), grad.bias.begin(), grad.bias.end());
  if (options.corrupt) options.corrupt(analytic);

  std::vector<double*> params;
  for (double& p : model.embeddings) params.push_back(&p);
  for (double& p : model.output) params.push_back(&p);
  for (double& p : model.bias) params.push_back(&p);
  double worst = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    const double saved = *params[i];
    *params[i] = saved + kStep;
    const double up = ft_objective(model, features, labels, rows, options.l2, nullptr);
    *params[i] = saved - kStep;
    const double down = ft_objective(model, features, labels, rows, options.l2, nullptr);
    *params[i] = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double rel = std::abs(analytic[i] - numeric) /
                       std::max(std::abs(analytic[i]) + std::abs(numeric), 1e-6);
    worst = std::max(worst, rel);
  }
  return worst;
}

namespace {

void write_rows(std::ostringstream& out, const std::vector<double>& values, size_t width) {
  for (size_t start = 0; start < values.size(); start += width) {
    for (size_t k = 0; k < width; ++k) {
      if (k > 0) out << ' ';
      out << format_double(values[start + k]);
    }
    out << '\n';
  }
}

void read_rows(std::istringstream& in, std::vector<double>& values, size_t rows, size_t width,
               const char* what) {
  values.assign(rows * width, 0.0);
  std::string line;
  for (size_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::kMalformed, std::string("truncated ") + what + " rows");
    }
    const auto parts = split(line, ' ');
    if (parts.size() != width) {
      throw Error(ErrorCode::kDimMismatch, std::string(what) + " row " + std::to_string(r));
    }
    for (size_t k = 0; k < width; ++k) {
      auto v = parse_double(parts[k]);
      if (!v) throw Error(ErrorCode::kMalformed, std::string(what) + " row " + std::to_string(r));
      values[r * width + k] = *v;
    }
  }
}

}  // namespace

void save_ft(const FtModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json header;
  header["format"] = "tweetprobe-fasttext-v1";
  header["hash"] = "fnv1a64+splitmix64";
  header["buckets"] = model.buckets;
  header["dim"] = model.dim;
  header["max_n"] = model.max_n;
  header["class_count"] = model.class_count;
  header["seed"] = model.seed;
  header["config_hash"] = model.config_hash;
  std::ostringstream out;
  out << header.dump() << '\n';
  write_rows(out, model.embeddings, model.dim);
  write_rows(out, model.output, model.dim);
  write_rows(out, model.bias, model.class_count);
  write_file(path, out.str());
}

FtModel load_ft(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  auto header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object() ||
      header.value("format", "") != "tweetprobe-fasttext-v1") {
    throw Error(ErrorCode::kMalformed, "not a FastText model: " + path.string());
  }
  if (header.value("hash", "") != "fnv1a64+splitmix64") {
    throw Error(ErrorCode::kMalformed, "unsupported feature hash in " + path.string());
  }
  FtModel model;
  model.buckets = header["buckets"].get<size_t>();
  model.dim = header["dim"].get<size_t>();
  model.max_n = header["max_n"].get<size_t>();
  model.class_count = header["class_count"].get<size_t>();
  model.seed = header["seed"].get<uint64_t>();
  model.config_hash = header["config_hash"].get<std::string>();
  read_rows(in, model.embeddings, model.buckets, model.dim, "embedding");
  read_rows(in, model.output, model.class_count, model.dim, "output");
  read_rows(in, model.bias, 1, model.class_count, "bias");
  return model;
}

}  // namespace tweetprobe
