#include "tweetprobe/analysis.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "tweetprobe/error.h"
#include "tweetprobe/util.h"

namespace tweetprobe {

ModelCategory model_category(std::string_view model) {
  const std::string m = to_lower_ascii(model);
  if (m == "cnn" || m == "lstm" || m == "blstm" || m == "fasttext" || m == "ft") {
    return ModelCategory::kSupervised;
  }
  return ModelCategory::kUnsupervised;
}

void MetricsGrid::set(const std::string& model, TaskKind task, double f1) {
  if (!(f1 >= 0.0 && f1 <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "F1 for (" + model + ", " +
                                               std::string(task_name(task)) +
                                               ") outside [0, 1]");
  }
  auto [it, inserted] = cells_.emplace(std::make_pair(model, task), f1);
  if (!inserted) {
    throw Error(ErrorCode::kInvalidConfig, "duplicate cell (" + model + ", " +
                                               std::string(task_name(task)) + ")");
  }
  if (std::find(models_.begin(), models_.end(), model) == models_.end()) models_.push_back(model);
}

std::optional<double> MetricsGrid::get(const std::string& model, TaskKind task) const {
  auto it = cells_.find({model, task});
  if (it == cells_.end()) return std::nullopt;
  return it->second;
}

std::vector<LengthBin> slice_by_length(const Metrics& metrics, const Corpus& corpus,
                                       size_t bin_width, size_t min_support) {
  if (bin_width == 0) throw Error(ErrorCode::kInvalidConfig, "bin width must be >= 1");
  if (metrics.records.empty()) return {};
  std::map<size_t, std::pair<std::vector<int>, std::vector<int>>> bins;
  for (const InstanceRecord& r : metrics.records) {
    const Tweet* tweet = corpus.find(r.tweet_id);
    if (tweet == nullptr) {
      throw Error(ErrorCode::kMissingTweetEmbedding, "tweet '" + r.tweet_id + "' not in corpus");
    }
    auto& [gold, pred] = bins[word_count(*tweet) / bin_width];
    gold.push_back(r.gold);
    pred.push_back(r.predicted);
  }
  std::vector<LengthBin> out;
  for (const auto& [bin, pair] : bins) {
    LengthBin b;
    b.bin = bin;
    b.support = pair.first.size();
    b.f1 = compute_metrics(pair.first, pair.second, metrics.class_count).macro_f1;
    b.reported = b.support >= min_support;
    out.push_back(b);
  }
  return out;
}

const std::vector<size_t>& default_sizes() {
  static const std::vector<size_t> sizes = {10, 25, 50, 100, 200};
  return sizes;
}

std::vector<SizePoint> size_sweep(const std::function<double(size_t)>& cell,
                                  const std::vector<size_t>& sizes, size_t jobs) {
  std::vector<SizePoint> out(sizes.size());
  std::vector<std::exception_ptr> errors(sizes.size());
  std::mutex mu;
  size_t next = 0;
  const auto worker = [&] {
    for (;;) {
      size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= sizes.size()) return;
        i = next++;
      }
      try {
        out[i] = {sizes[i], cell(sizes[i])};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const size_t n_threads = std::max<size_t>(1, std::min(jobs, sizes.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string_view trend_name(TrendLabel label) {
  switch (label) {
    case TrendLabel::kPositive: return "positive";
    case TrendLabel::kNegative: return "negative";
    case TrendLabel::kUncorrelated: return "uncorrelated";
    case TrendLabel::kInvariant: return "invariant";
  }
  return "unknown";
}

std::vector<double> midranks(const std::vector<double>& values) {
  std::vector<size_t> order(values.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidConfig, "spearman needs two equal-length series of >= 2");
  }
  const std::vector<double> rx = midranks(x);
  const std::vector<double> ry = midranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

TrendLabel classify_trend(const std::vector<double>& values, const TrendConfig& cfg) {
  if (values.size() < 3) throw Error(ErrorCode::kInvalidConfig, "trend needs >= 3 points");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo <= cfg.invariance_band + 1e-12) return TrendLabel::kInvariant;
  std::vector<double> index(values.size());
  for (size_t i = 0; i < index.size(); ++i) index[i] = static_cast<double>(i);
  const double rho = spearman(index, values);
  if (rho >= cfg.rho_threshold) return TrendLabel::kPositive;
  if (rho <= -cfg.rho_threshold) return TrendLabel::kNegative;
  return TrendLabel::kUncorrelated;
}

Ranking rank_models(const MetricsGrid& grid, TaskKind task,
                    const std::function<ModelCategory(std::string_view)>& category) {
  std::vector<std::pair<std::string, double>> scored;
  for (const std::string& m : grid.models()) {
    if (auto v = grid.get(m, task)) scored.emplace_back(m, *v);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Ranking r;
  for (const auto& [m, v] : scored) {
    r.order.push_back(m);
    auto& slot = category(m) == ModelCategory::kSupervised ? r.best_supervised
                                                           : r.best_unsupervised;
    if (!slot) slot = m;
  }
  return r;
}

std::string length_slices_csv(const std::string& model, TaskKind task,
                              const std::vector<LengthBin>& bins) {
  std::ostringstream out;
  out << "model,task,bin,f1,support\n";
  for (const LengthBin& b : bins) {
    out << model << ',' << task_name(task) << ',' << b.bin << ','
        << (b.reported ? format_double(b.f1) : std::string()) << ',' << b.support << '\n';
  }
  return out.str();
}

std::string size_sweep_csv(const std::string& model, TaskKind task,
                           const std::vector<SizePoint>& points, size_t support) {
  std::ostringstream out;
  out << "model,task,size,f1,support\n";
  for (const SizePoint& p : points) {
    out << model << ',' << task_name(task) << ',' << p.size << ',' << format_double(p.f1) << ','
        << support << '\n';
  }
  return out.str();
}

}  // namespace tweetprobe
