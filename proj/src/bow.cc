#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "tweetprobe/embedders.h"
#include "tweetprobe/error.h"
#include "tweetprobe/util.h"

namespace tweetprobe {

std::vector<std::string> lexical_units(const Tweet& tweet) {
  std::vector<std::string> units;
  for (const Token& t : tweet.tokens) {
    if (counts_as_word(t.kind)) units.push_back(to_lower_ascii(t.surface));
  }
  return units;
}

std::vector<std::string> ngrams(const std::vector<std::string>& units, size_t max_n) {
  std::vector<std::string> grams;
  for (size_t i = 0; i < units.size(); ++i) {
    std::string g;
    for (size_t n = 1; n <= max_n && i + n <= units.size(); ++n) {
      if (n > 1) g.push_back(' ');
      g += units[i + n - 1];
      grams.push_back(g);
    }
  }
  return grams;
}

std::optional<uint32_t> BowVocab::find(std::string_view gram) const {
  auto it = index.find(std::string(gram));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

BowVocab fit_bow(const Corpus& corpus, size_t top_k, size_t max_n) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot fit BOW on an empty corpus");
  if (max_n < 1 || top_k < 1) throw Error(ErrorCode::kInvalidConfig, "need max_n >= 1 and K >= 1");
  struct Stats {
    uint64_t frequency = 0;
    uint32_t df = 0;
    size_t last_doc = static_cast<size_t>(-1);
  };
  std::unordered_map<std::string, Stats> stats;
  for (size_t d = 0; d < corpus.size(); ++d) {
    for (std::string& g : ngrams(lexical_units(corpus[d]), max_n)) {
      Stats& s = stats[std::move(g)];
      ++s.frequency;
      if (s.last_doc != d) {
        ++s.df;
        s.last_doc = d;
      }
    }
  }
  std::vector<std::pair<const std::string*, const Stats*>> order;
  order.reserve(stats.size());
  for (const auto& [g, s] : stats) order.emplace_back(&g, &s);
  const auto better = [](const auto& a, const auto& b) {
    if (a.second->frequency != b.second->frequency) return a.second->frequency > b.second->frequency;
    return *a.first < *b.first;
  };
  const size_t keep = std::min(top_k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), better);

  BowVocab vocab;
  vocab.max_n = max_n;
  vocab.documents = corpus.size();
  for (size_t i = 0; i < keep; ++i) {
    vocab.index.emplace(*order[i].first, static_cast<uint32_t>(i));
    vocab.ngrams.push_back(*order[i].first);
    vocab.frequency.push_back(order[i].second->frequency);
    vocab.df.push_back(order[i].second->df);
  }
  return vocab;
}

SparseVector embed_bow_units(const BowVocab& vocab, const std::vector<std::string>& units) {
  std::unordered_map<uint32_t, uint32_t> tf;
  for (const std::string& g : ngrams(units, vocab.max_n)) {
    if (auto i = vocab.find(g)) ++tf[*i];
  }
  std::vector<std::pair<uint32_t, uint32_t>> entries(tf.begin(), tf.end());
  std::sort(entries.begin(), entries.end());
  SparseVector out;
  const double n_docs = static_cast<double>(vocab.documents);
  for (const auto& [i, count] : entries) {
    const double w = count * std::log(n_docs / vocab.df[i]);
    if (w != 0.0) out.push(i, w);
  }
  return out;
}

SparseVector embed_bow(const BowVocab& vocab, const Tweet& tweet) {
  return embed_bow_units(vocab, lexical_units(tweet));
}

void save_bow(const BowVocab& vocab, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format"] = "tweetprobe-bow-v1";
  j["max_n"] = vocab.max_n;
  j["documents"] = vocab.documents;
  j["ngrams"] = vocab.ngrams;
  j["frequency"] = vocab.frequency;
  j["df"] = vocab.df;
  write_file(path, j.dump() + "\n");
}

BowVocab load_bow(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || j.value("format", "") != "tweetprobe-bow-v1") {
    throw Error(ErrorCode::kMalformed, "not a BOW vocabulary: " + path.string());
  }
  BowVocab vocab;
  vocab.max_n = j["max_n"].get<size_t>();
  vocab.documents = j["documents"].get<size_t>();
  vocab.ngrams = j["ngrams"].get<std::vector<std::string>>();
  vocab.frequency = j["frequency"].get<std::vector<uint64_t>>();
  vocab.df = j["df"].get<std::vector<uint32_t>>();
  if (vocab.frequency.size() != vocab.ngrams.size() || vocab.df.size() != vocab.ngrams.size()) {
    throw Error(ErrorCode::kMalformed, "inconsistent BOW vocabulary: " + path.string());
  }
  for (size_t i = 0; i < vocab.ngrams.size(); ++i) {
    vocab.index.emplace(vocab.ngrams[i], static_cast<uint32_t>(i));
  }
  return vocab;
}

}  // namespace tweetprobe
