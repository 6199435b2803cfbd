#include <cmath>
#include <fstream>
#include <sstream>

#include "tweetprobe/embedders.h"
#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/util.h"

namespace tweetprobe {

WordVecStore::WordVecStore(size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::kInvalidConfig, "word vector dimension must be >= 1");
}

void WordVecStore::add(std::string word, std::vector<double> vec) {
  if (vec.size() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "vector for '" + word + "' has dim " +
                                             std::to_string(vec.size()) + ", expected " +
                                             std::to_string(dim_));
  }
  if (exact_.count(word)) return;
  const size_t i = words_.size();
  exact_.emplace(word, i);
  folded_.emplace(to_lower_ascii(word), i);
  words_.push_back(std::move(word));
  vectors_.push_back(std::move(vec));
}

const std::vector<double>* WordVecStore::find(std::string_view word) const {
  auto it = exact_.find(std::string(word));
  return it == exact_.end() ? nullptr : &vectors_[it->second];
}

std::vector<double> WordVecStore::lookup(std::string_view word) const {
  if (const auto* v = find(word)) return *v;
  if (auto it = folded_.find(to_lower_ascii(word)); it != folded_.end()) return vectors_[it->second];
  return oov_vector(word, dim_);
}

std::vector<double> WordVecStore::embed_item(const AuxItem& item) const {
  std::vector<double> mean(dim_, 0.0);
  if (item.empty()) return mean;
  for (const std::string& w : item) {
    const std::vector<double> v = lookup(w);
    for (size_t d = 0; d < dim_; ++d) mean[d] += v[d];
  }
  for (double& x : mean) x /= static_cast<double>(item.size());
  return mean;
}

std::vector<double> WordVecStore::oov_vector(std::string_view word, size_t dim) {
  Rng rng(fnv1a64(word));
  std::vector<double> v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

WordVecStore parse_word_vectors(std::istream& in) {
  std::optional<WordVecStore> store;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> parts = split(line, ' ');
    while (parts.size() > 1 && parts.back().empty()) parts.pop_back();
    if (parts.size() < 2 || parts[0].empty()) {
      throw Error(ErrorCode::kMalformed, "line " + std::to_string(line_no));
    }
    if (!store) store.emplace(parts.size() - 1);
    if (parts.size() - 1 != store->dim()) {
      throw Error(ErrorCode::kDimMismatch, "line " + std::to_string(line_no));
    }
    std::vector<double> vec;
    vec.reserve(parts.size() - 1);
    for (size_t i = 1; i < parts.size(); ++i) {
      auto v = parse_double(parts[i]);
      if (!v) throw Error(ErrorCode::kMalformed, "line " + std::to_string(line_no));
      vec.push_back(*v);
    }
    store->add(std::string(parts[0]), std::move(vec));
  }
  if (!store) throw Error(ErrorCode::kMalformed, "word vector file is empty");
  return std::move(*store);
}

WordVecStore load_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_word_vectors(in);
}

void save_word_vectors(const WordVecStore& store, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const std::string& w : store.words()) {
    out << w;
    for (double x : *store.find(w)) out << ' ' << format_double(x);
    out << '\n';
  }
  write_file(path, out.str());
}

std::vector<double> embed_bom(const WordVecStore& store, const Tweet& tweet) {
  std::vector<double> mean(store.dim(), 0.0);
  size_t n = 0;
  for (const Token& t : tweet.tokens) {
    std::string_view surface = t.surface;
    if (t.kind == TokenKind::kHashtag) {
      surface.remove_prefix(1);
    } else if (t.kind != TokenKind::kWord && t.kind != TokenKind::kNumber) {
      continue;
    }
    const std::vector<double> v = store.lookup(surface);
    for (size_t d = 0; d < mean.size(); ++d) mean[d] += v[d];
    ++n;
  }
  if (n > 0) {
    for (double& x : mean) x /= static_cast<double>(n);
  }
  return mean;
}

}  // namespace tweetprobe
