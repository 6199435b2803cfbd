#include <cmath>

#include "json.hpp"
#include "tweetprobe/embedders.h"
#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

std::vector<uint32_t> word_ids(const LdaModel& model, const Tweet& tweet) {
  std::vector<uint32_t> ids;
  for (const std::string& u : lexical_units(tweet)) {
    if (auto it = model.index.find(u); it != model.index.end()) ids.push_back(it->second);
  }
  return ids;
}

uint32_t sample(std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double& w : weights) {
    total += w;
    w = total;
  }
  const double r = rng.uniform01() * total;
  size_t lo = 0;
  size_t hi = weights.size() - 1;
  while (lo < hi) {
    const size_t mid = (lo + hi) / 2;
    if (weights[mid] > r) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return static_cast<uint32_t>(lo);
}

}  // namespace

std::vector<double> LdaModel::training_theta(size_t doc) const {
  std::vector<double> theta(topics, alpha);
  for (uint32_t z : assignments.at(doc)) theta[z] += 1.0;
  const double denom = static_cast<double>(assignments[doc].size()) + alpha * topics;
  for (double& t : theta) t /= denom;
  return theta;
}

std::vector<double> LdaModel::phi(size_t topic) const {
  const size_t v_count = vocab.size();
  std::vector<double> p(v_count);
  const double denom = static_cast<double>(topic_total.at(topic)) + beta * v_count;
  for (size_t w = 0; w < v_count; ++w) p[w] = (word_topic[w * topics + topic] + beta) / denom;
  return p;
}

LdaModel fit_lda(const Corpus& corpus, const LdaConfig& cfg) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot fit LDA on an empty corpus");
  if (cfg.topics == 0) throw Error(ErrorCode::kInvalidConfig, "LDA needs at least one topic");
  const double alpha = cfg.alpha.value_or(50.0 / static_cast<double>(cfg.topics));
  if (!(alpha > 0.0) || !(cfg.beta > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "LDA alpha and beta must be positive");
  }

  LdaModel model;
  model.topics = cfg.topics;
  model.alpha = alpha;
  model.beta = cfg.beta;
  model.inference_sweeps = cfg.inference_sweeps;
  model.seed = cfg.seed;

  std::vector<std::vector<uint32_t>> docs(corpus.size());
  for (size_t d = 0; d < corpus.size(); ++d) {
    for (std::string& u : lexical_units(corpus[d])) {
      auto [it, inserted] = model.index.emplace(u, static_cast<uint32_t>(model.vocab.size()));
      if (inserted) model.vocab.push_back(std::move(u));
      docs[d].push_back(it->second);
    }
  }

  const size_t k_count = cfg.topics;
  const size_t v_count = model.vocab.size();
  model.word_topic.assign(v_count * k_count, 0);
  model.topic_total.assign(k_count, 0);
  model.assignments.resize(docs.size());
  std::vector<std::vector<uint32_t>> doc_topic(docs.size(), std::vector<uint32_t>(k_count, 0));

  Rng rng(derive_seed(cfg.seed, 0x1da));
  for (size_t d = 0; d < docs.size(); ++d) {
    model.assignments[d].resize(docs[d].size());
    for (size_t i = 0; i < docs[d].size(); ++i) {
      const auto z = static_cast<uint32_t>(rng.uniform(k_count));
      model.assignments[d][i] = z;
      ++model.word_topic[docs[d][i] * k_count + z];
      ++model.topic_total[z];
      ++doc_topic[d][z];
    }
  }

  const double v_beta = cfg.beta * static_cast<double>(v_count);
  std::vector<double> weights(k_count);
  for (size_t iter = 0; iter < cfg.iterations; ++iter) {
    for (size_t d = 0; d < docs.size(); ++d) {
      for (size_t i = 0; i < docs[d].size(); ++i) {
        const uint32_t w = docs[d][i];
        uint32_t& z = model.assignments[d][i];
        uint32_t* row = &model.word_topic[w * k_count];
        --row[z];
        --model.topic_total[z];
        --doc_topic[d][z];
        for (size_t k = 0; k < k_count; ++k) {
          weights[k] = (doc_topic[d][k] + alpha) * (row[k] + cfg.beta) /
                       (static_cast<double>(model.topic_total[k]) + v_beta);
        }
        z = sample(weights, rng);
        ++row[z];
        ++model.topic_total[z];
        ++doc_topic[d][z];
      }
    }
  }
  return model;
}

std::vector<double> embed_lda(const LdaModel& model, const Tweet& tweet,
                              std::optional<uint64_t> seed) {
  const size_t k_count = model.topics;
  const std::vector<uint32_t> ids = word_ids(model, tweet);
  std::vector<double> theta(k_count, 1.0 / static_cast<double>(k_count));
  if (ids.empty()) return theta;

  Rng rng(seed.value_or(derive_seed(model.seed, fnv1a64(tweet.text))));
  std::vector<uint32_t> z(ids.size());
  std::vector<uint32_t> counts(k_count, 0);
  for (uint32_t& t : z) {
    t = static_cast<uint32_t>(rng.uniform(k_count));
    ++counts[t];
  }
  const double v_beta = model.beta * static_cast<double>(model.vocab.size());
  std::vector<double> weights(k_count);
  for (size_t sweep = 0; sweep < model.inference_sweeps; ++sweep) {
    for (size_t i = 0; i < ids.size(); ++i) {
      --counts[z[i]];
      const uint32_t* row = &model.word_topic[ids[i] * k_count];
      for (size_t k = 0; k < k_count; ++k) {
        weights[k] = (counts[k] + model.alpha) * (row[k] + model.beta) /
                     (static_cast<double>(model.topic_total[k]) + v_beta);
      }
      z[i] = sample(weights, rng);
      ++counts[z[i]];
    }
  }
  const double denom = static_cast<double>(ids.size()) + model.alpha * k_count;
  for (size_t k = 0; k < k_count; ++k) theta[k] = (counts[k] + model.alpha) / denom;
  return theta;
}

void save_lda(const LdaModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "tweetprobe-lda-v1";
  j["topics"] = model.topics;
  j["alpha"] = model.alpha;
  j["beta"] = model.beta;
  j["inference_sweeps"] = model.inference_sweeps;
  j["seed"] = model.seed;
  j["vocab"] = model.vocab;
  j["word_topic"] = model.word_topic;
  j["topic_total"] = model.topic_total;
  j["assignments"] = model.assignments;
  write_file(path, j.dump() + "\n");
}

LdaModel load_lda(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != "tweetprobe-lda-v1") {
    throw Error(ErrorCode::kMalformed, "not an LDA model: " + path.string());
  }
  LdaModel model;
  model.topics = j["topics"].get<size_t>();
  model.alpha = j["alpha"].get<double>();
  model.beta = j["beta"].get<double>();
  model.inference_sweeps = j["inference_sweeps"].get<size_t>();
  model.seed = j["seed"].get<uint64_t>();
  model.vocab = j["vocab"].get<std::vector<std::string>>();
  model.word_topic = j["word_topic"].get<std::vector<uint32_t>>();
  model.topic_total = j["topic_total"].get<std::vector<uint64_t>>();
  model.assignments = j["assignments"].get<std::vector<std::vector<uint32_t>>>();
  if (model.word_topic.size() != model.vocab.size() * model.topics ||
      model.topic_total.size() != model.topics) {
    throw Error(ErrorCode::kMalformed, "inconsistent LDA model: " + path.string());
  }
  for (size_t i = 0; i < model.vocab.size(); ++i) {
    model.index.emplace(model.vocab[i], static_cast<uint32_t>(i));
  }
  return model;
}

}  // namespace tweetprobe
