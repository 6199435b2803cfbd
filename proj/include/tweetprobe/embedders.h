#ifndef TWEETPROBE_EMBEDDERS_H_
#define TWEETPROBE_EMBEDDERS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tweetprobe/corpus.h"
#include "tweetprobe/tasks.h"

namespace tweetprobe {

// Sorted by index; zero components omitted.
struct SparseVector {
  std::vector<uint32_t> index;
  std::vector<double> value;

  size_t nnz() const { return index.size(); }
  void push(uint32_t i, double v) {
    index.push_back(i);
    value.push_back(v);
  }
};

// ---------------------------------------------------------------------------
// Word vectors

class WordVecStore {
 public:
  explicit WordVecStore(size_t dim);

  size_t dim() const { return dim_; }
  size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  // First occurrence of a word wins. Throws DimMismatch.
  void add(std::string word, std::vector<double> vec);
  const std::vector<double>* find(std::string_view word) const;

  // Exact lookup, then lowercase lookup, then the hashed OOV vector.
  std::vector<double> lookup(std::string_view word) const;
  // Mean of member lookups; an empty item embeds as zeros.
  std::vector<double> embed_item(const AuxItem& item) const;

  // Unit vector from a normal draw seeded by the FNV-1a hash of the word.
  static std::vector<double> oov_vector(std::string_view word, size_t dim);

 private:
  size_t dim_;
  std::vector<std::string> words_;
  std::vector<std::vector<double>> vectors_;
  std::unordered_map<std::string, size_t> exact_;
  std::unordered_map<std::string, size_t> folded_;
};

// GloVe text format: "word v1 ... vd" per line. Dimension comes from the
// first row. Throws DimMismatch(line) or Malformed(line).
WordVecStore load_word_vectors(const std::filesystem::path& path);
WordVecStore parse_word_vectors(std::istream& in);
void save_word_vectors(const WordVecStore& store, const std::filesystem::path& path);

// Mean of the Word, Hashtag ('#' stripped) and Number token vectors.
std::vector<double> embed_bom(const WordVecStore& store, const Tweet& tweet);

// ---------------------------------------------------------------------------
// Bag of n-grams with TF-IDF weights

// Lowercased surfaces of the word-like tokens; hashtags keep their '#'.
std::vector<std::string> lexical_units(const Tweet& tweet);
// All n-grams (n = 1..max_n) of the units, joined by single spaces.
std::vector<std::string> ngrams(const std::vector<std::string>& units, size_t max_n);

struct BowVocab {
  size_t max_n = 5;
  size_t documents = 0;
  // Sorted by (frequency desc, n-gram asc).
  std::vector<std::string> ngrams;
  std::vector<uint64_t> frequency;
  std::vector<uint32_t> df;
  std::unordered_map<std::string, uint32_t> index;

  size_t size() const { return ngrams.size(); }
  std::optional<uint32_t> find(std::string_view gram) const;
};

// Throws EmptyCorpus.
BowVocab fit_bow(const Corpus& corpus, size_t top_k = 50000, size_t max_n = 5);
// tf(g) * ln(N / df(g)); n-grams outside the vocabulary are ignored.
SparseVector embed_bow(const BowVocab& vocab, const Tweet& tweet);
SparseVector embed_bow_units(const BowVocab& vocab, const std::vector<std::string>& units);

void save_bow(const BowVocab& vocab, const std::filesystem::path& path);
BowVocab load_bow(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// LDA (collapsed Gibbs sampling)

struct LdaConfig {
  size_t topics = 200;
  size_t iterations = 200;
  std::optional<double> alpha;  // defaults to 50 / topics
  double beta = 0.01;
  size_t inference_sweeps = 50;
  uint64_t seed = 1;
};

struct LdaModel {
  size_t topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  size_t inference_sweeps = 50;
  uint64_t seed = 0;
  std::vector<std::string> vocab;
  std::unordered_map<std::string, uint32_t> index;
  std::vector<uint32_t> word_topic;   // vocab x topics, row-major
  std::vector<uint64_t> topic_total;  // topics
  // Final token-topic assignments of the training documents, in corpus order.
  std::vector<std::vector<uint32_t>> assignments;

  size_t vocab_size() const { return vocab.size(); }
  // Smoothed topic distribution of a training document.
  std::vector<double> training_theta(size_t doc) const;
  // Smoothed topic-word distribution of one topic (sums to 1).
  std::vector<double> phi(size_t topic) const;
};

// Throws EmptyCorpus or InvalidConfig.
LdaModel fit_lda(const Corpus& corpus, const LdaConfig& cfg);
// Fold-in inference with frozen topic-word counts; result lies on the
// simplex. Uses the model seed mixed with the tweet text unless `seed` is
// given.
std::vector<double> embed_lda(const LdaModel& model, const Tweet& tweet,
                              std::optional<uint64_t> seed = std::nullopt);

void save_lda(const LdaModel& model, const std::filesystem::path& path);
LdaModel load_lda(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Interchange format for externally computed embeddings

class EmbeddingTable {
 public:
  explicit EmbeddingTable(size_t dim) : dim_(dim) {}

  size_t dim() const { return dim_; }
  size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

  // Throws DuplicateId or DimMismatch.
  void add(std::string id, std::span<const double> vec);
  std::optional<std::span<const double>> find(std::string_view id) const;

 private:
  size_t dim_;
  std::vector<std::string> ids_;
  std::vector<double> values_;
  std::unordered_map<std::string, size_t> index_;
};

// First line "count dim", then "id v1 ... vd". Throws HeaderMismatch,
// DimMismatch(line), DuplicateId or Malformed(line).
EmbeddingTable load_external(const std::filesystem::path& path);
EmbeddingTable parse_external(std::istream& in);
void write_external(const EmbeddingTable& table, std::ostream& out);
void save_external(const EmbeddingTable& table, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Encoders feeding the probe

class TweetEncoder {
 public:
  virtual ~TweetEncoder() = default;
  virtual size_t dim() const = 0;
  // Appends the tweet's non-zero components, shifted by `offset`, in
  // increasing index order.
  virtual void encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const = 0;
};

class AuxEncoder {
 public:
  virtual ~AuxEncoder() = default;
  virtual size_t dim() const = 0;
  // Same contract as TweetEncoder::encode. `slot` is the aux position.
  virtual void encode(const AuxItem& item, std::string_view tweet_id, size_t slot,
                      SparseVector& out, uint32_t offset) const = 0;
};

class BowEncoder : public TweetEncoder {
 public:
  explicit BowEncoder(std::shared_ptr<const BowVocab> vocab) : vocab_(std::move(vocab)) {}
  size_t dim() const override { return vocab_->size(); }
  void encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const override;

 private:
  std::shared_ptr<const BowVocab> vocab_;
};

class BomEncoder : public TweetEncoder {
 public:
  explicit BomEncoder(std::shared_ptr<const WordVecStore> store) : store_(std::move(store)) {}
  size_t dim() const override { return store_->dim(); }
  void encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const override;

 private:
  std::shared_ptr<const WordVecStore> store_;
};

class LdaEncoder : public TweetEncoder {
 public:
  explicit LdaEncoder(std::shared_ptr<const LdaModel> model) : model_(std::move(model)) {}
  size_t dim() const override { return model_->topics; }
  void encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const override;

 private:
  std::shared_ptr<const LdaModel> model_;
};

// Looks tweets up by id; throws MissingTweetEmbedding.
class TableEncoder : public TweetEncoder {
 public:
  explicit TableEncoder(std::shared_ptr<const EmbeddingTable> table) : table_(std::move(table)) {}
  size_t dim() const override { return table_->dim(); }
  void encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const override;

 private:
  std::shared_ptr<const EmbeddingTable> table_;
};

// One component: the tweet's word count.
class LengthOracleEncoder : public TweetEncoder {
 public:
  size_t dim() const override { return 1; }
  void encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const override;
};

// Gaussian vector keyed by a hash of the tweet id: carries no information
// about the tweet.
class RandomEncoder : public TweetEncoder {
 public:
  RandomEncoder(size_t dim, uint64_t seed) : dim_(dim), seed_(seed) {}
  size_t dim() const override { return dim_; }
  void encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const override;

 private:
  size_t dim_;
  uint64_t seed_;
};

// Aux items through a shared word-vector store.
class StoreAuxEncoder : public AuxEncoder {
 public:
  explicit StoreAuxEncoder(std::shared_ptr<const WordVecStore> store) : store_(std::move(store)) {}
  size_t dim() const override { return store_->dim(); }
  void encode(const AuxItem& item, std::string_view tweet_id, size_t slot, SparseVector& out,
              uint32_t offset) const override;

 private:
  std::shared_ptr<const WordVecStore> store_;
};

// Aux items as TF-IDF vectors over the BOW vocabulary (lowercased members as
// units), so the BOW model encodes aux words the way it encodes tweets.
class BowAuxEncoder : public AuxEncoder {
 public:
  explicit BowAuxEncoder(std::shared_ptr<const BowVocab> vocab) : vocab_(std::move(vocab)) {}
  size_t dim() const override { return vocab_->size(); }
  void encode(const AuxItem& item, std::string_view tweet_id, size_t slot, SparseVector& out,
              uint32_t offset) const override;

 private:
  std::shared_ptr<const BowVocab> vocab_;
};

// Gaussian vector keyed by (tweet id, slot, item): a null control whose aux
// inputs carry no reusable word identity.
class RandomAuxEncoder : public AuxEncoder {
 public:
  RandomAuxEncoder(size_t dim, uint64_t seed) : dim_(dim), seed_(seed) {}
  size_t dim() const override { return dim_; }
  void encode(const AuxItem& item, std::string_view tweet_id, size_t slot, SparseVector& out,
              uint32_t offset) const override;

 private:
  size_t dim_;
  uint64_t seed_;
};

}  // namespace tweetprobe

#endif  // TWEETPROBE_EMBEDDERS_H_
