#include <fstream>
#include <ostream>
#include <sstream>

#include "tweetprobe/embedders.h"
#include "tweetprobe/error.h"
#include "tweetprobe/util.h"

namespace tweetprobe {

void EmbeddingTable::add(std::string id, std::span<const double> vec) {
  if (vec.size() != dim_) {
    throw Error(ErrorCode::kDimMismatch, "embedding for '" + id + "' has dim " +
                                             std::to_string(vec.size()) + ", expected " +
                                             std::to_string(dim_));
  }
  if (index_.count(id)) throw Error(ErrorCode::kDuplicateId, "duplicate embedding id '" + id + "'");
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  values_.insert(values_.end(), vec.begin(), vec.end());
}

std::optional<std::span<const double>> EmbeddingTable::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return std::span<const double>(values_.data() + it->second * dim_, dim_);
}

EmbeddingTable parse_external(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kHeaderMismatch, "missing header line");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(trim(line), ' ');
  std::optional<long long> count;
  std::optional<long long> dim;
  if (header.size() == 2) {
    count = parse_int(header[0]);
    dim = parse_int(header[1]);
  }
  if (!count || !dim || *count < 0 || *dim < 1) {
    throw Error(ErrorCode::kHeaderMismatch, "header must be '<count> <dim>'");
  }
  EmbeddingTable table(static_cast<size_t>(*dim));
  size_t line_no = 1;
  std::vector<double> vec;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string_view> parts = split(line, ' ');
    while (parts.size() > 1 && parts.back().empty()) parts.pop_back();
    if (parts.size() < 2 || parts[0].empty()) {
      throw Error(ErrorCode::kMalformed, "line " + std::to_string(line_no));
    }
    if (parts.size() - 1 != table.dim()) {
      throw Error(ErrorCode::kDimMismatch, "line " + std::to_string(line_no) + ": expected " +
                                               std::to_string(table.dim()) + " values, got " +
                                               std::to_string(parts.size() - 1));
    }
    vec.clear();
    for (size_t i = 1; i < parts.size(); ++i) {
      auto v = parse_double(parts[i]);
      if (!v) throw Error(ErrorCode::kMalformed, "line " + std::to_string(line_no));
      vec.push_back(*v);
    }
    table.add(std::string(parts[0]), vec);
  }
  if (table.size() != static_cast<size_t>(*count)) {
    throw Error(ErrorCode::kHeaderMismatch, "header declares " + std::to_string(*count) +
                                                " rows, found " + std::to_string(table.size()));
  }
  return table;
}

EmbeddingTable load_external(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_external(in);
}

void write_external(const EmbeddingTable& table, std::ostream& out) {
  out << table.size() << ' ' << table.dim() << '\n';
  for (const std::string& id : table.ids()) {
    out << id;
    const std::span<const double> row = *table.find(id);
    for (double x : row) out << ' ' << format_double(x);
    out << '\n';
  }
}

void save_external(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ostringstream out;
  write_external(table, out);
  write_file(path, out.str());
}

}  // namespace tweetprobe
