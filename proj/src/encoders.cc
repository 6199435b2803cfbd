#include "tweetprobe/embedders.h"
#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

void append_dense(std::span<const double> values, SparseVector& out, uint32_t offset) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) out.push(offset + static_cast<uint32_t>(i), values[i]);
  }
}

std::vector<double> gaussian(size_t dim, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace

void BowEncoder::encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const {
  const SparseVector v = embed_bow(*vocab_, tweet);
  for (size_t i = 0; i < v.nnz(); ++i) out.push(offset + v.index[i], v.value[i]);
}

void BomEncoder::encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const {
  append_dense(embed_bom(*store_, tweet), out, offset);
}

void LdaEncoder::encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const {
  append_dense(embed_lda(*model_, tweet), out, offset);
}

void TableEncoder::encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const {
  auto row = table_->find(tweet.id);
  if (!row) {
    throw Error(ErrorCode::kMissingTweetEmbedding, "no embedding for tweet '" + tweet.id + "'");
  }
  append_dense(*row, out, offset);
}

void LengthOracleEncoder::encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const {
  const double n = static_cast<double>(word_count(tweet));
  if (n != 0.0) out.push(offset, n);
}

void RandomEncoder::encode(const Tweet& tweet, SparseVector& out, uint32_t offset) const {
  append_dense(gaussian(dim_, derive_seed(seed_, fnv1a64(tweet.id))), out, offset);
}

void StoreAuxEncoder::encode(const AuxItem& item, std::string_view, size_t, SparseVector& out,
                             uint32_t offset) const {
  append_dense(store_->embed_item(item), out, offset);
}

void BowAuxEncoder::encode(const AuxItem& item, std::string_view, size_t, SparseVector& out,
                           uint32_t offset) const {
  std::vector<std::string> units;
  units.reserve(item.size());
  for (const std::string& w : item) units.push_back(to_lower_ascii(w));
  const SparseVector v = embed_bow_units(*vocab_, units);
  for (size_t i = 0; i < v.nnz(); ++i) out.push(offset + v.index[i], v.value[i]);
}

void RandomAuxEncoder::encode(const AuxItem& item, std::string_view tweet_id, size_t slot,
                              SparseVector& out, uint32_t offset) const {
  uint64_t h = fnv1a64(tweet_id);
  h = fnv1a64(std::to_string(slot), h);
  for (const std::string& w : item) h = fnv1a64(w, fnv1a64(" ", h));
  append_dense(gaussian(dim_, derive_seed(seed_, h)), out, offset);
}

}  // namespace tweetprobe
