#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "tweetprobe/corpus.h"
#include "tweetprobe/error.h"
#include "tweetprobe/util.h"

namespace tweetprobe {

using json = nlohmann::ordered_json;

size_t word_count(const Tweet& tweet) {
  return static_cast<size_t>(std::count_if(tweet.tokens.begin(), tweet.tokens.end(),
                                           [](const Token& t) { return counts_as_word(t.kind); }));
}

std::vector<size_t> informative_cap_indices(const Tweet& tweet) {
  if (tweet.informative_caps) {
    std::vector<size_t> out = *tweet.informative_caps;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  std::vector<size_t> out;
  for (const NeSpan& span : tweet.ne_spans) {
    for (size_t i = span.begin; i < span.end; ++i) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Corpus::Corpus(std::vector<Tweet> tweets) : tweets_(std::move(tweets)) {
  index_.reserve(tweets_.size());
  for (size_t i = 0; i < tweets_.size(); ++i) {
    if (!index_.emplace(tweets_[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId, tweets_[i].id);
    }
  }
  fingerprint_ = hex64(fnv1a64(corpus_to_jsonl(*this)));
}

const Tweet* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &tweets_[it->second];
}

// ---------------------------------------------------------------------------
// Timestamps

namespace {

std::optional<int> digits(std::string_view s, size_t pos, size_t n) {
  if (pos + n > s.size()) return std::nullopt;
  int v = 0;
  for (size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

std::optional<Timestamp> make_timestamp(int y, int mo, int d, int h, int mi, int s) {
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS[.fff][Z|+hh:mm|-hh:mm|+hhmm]
  auto y = digits(text, 0, 4), mo = digits(text, 5, 2), d = digits(text, 8, 2);
  auto h = digits(text, 11, 2), mi = digits(text, 14, 2), s = digits(text, 17, 2);
  if (!y || !mo || !d || !h || !mi || !s) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  auto ts = make_timestamp(*y, *mo, *d, *h, *mi, *s);
  if (!ts) return std::nullopt;
  size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    size_t begin = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == begin) return std::nullopt;
  }
  if (pos == text.size()) return ts;
  if (text[pos] == 'Z' && pos + 1 == text.size()) return ts;
  if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '+' ? 1 : -1;
    auto oh = digits(text, pos + 1, 2);
    std::optional<int> om;
    size_t end;
    if (pos + 3 < text.size() && text[pos + 3] == ':') {
      om = digits(text, pos + 4, 2);
      end = pos + 6;
    } else {
      om = digits(text, pos + 3, 2);
      end = pos + 5;
    }
    if (!oh || !om || end != text.size()) return std::nullopt;
    return *ts - std::chrono::minutes(sign * (*oh * 60 + *om));
  }
  return std::nullopt;
}

std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  const sys_days day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{ts - day_point};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<Timestamp> parse_twitter_date(std::string_view text) {
  static constexpr std::string_view kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  static const std::pair<std::string_view, int> kZones[] = {
      {"UTC", 0},   {"GMT", 0},   {"EDT", -4}, {"EST", -5}, {"CDT", -5},
      {"CST", -6},  {"MDT", -6},  {"MST", -7}, {"PDT", -7}, {"PST", -8}};
  std::vector<std::string_view> parts;
  for (auto p : split(trim(text), ' ')) {
    if (!p.empty()) parts.push_back(p);
  }
  if (parts.size() != 6) return std::nullopt;
  int month = 0;
  for (int i = 0; i < 12; ++i) {
    if (parts[1] == kMonths[i]) month = i + 1;
  }
  auto day = parse_int(parts[2]);
  auto year = parse_int(parts[5]);
  const std::string_view hms = parts[3];
  if (month == 0 || !day || !year || hms.size() != 8 || hms[2] != ':' || hms[5] != ':') {
    return std::nullopt;
  }
  auto h = digits(hms, 0, 2), mi = digits(hms, 3, 2), s = digits(hms, 6, 2);
  if (!h || !mi || !s) return std::nullopt;
  std::optional<int> offset;
  for (const auto& [name, hours] : kZones) {
    if (parts[4] == name) offset = hours;
  }
  if (!offset) return std::nullopt;
  auto ts = make_timestamp(static_cast<int>(*year), month, static_cast<int>(*day), *h, *mi, *s);
  if (!ts) return std::nullopt;
  return *ts - std::chrono::hours(*offset);
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

[[noreturn]] void malformed(size_t line, const std::string& why) {
  throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(line) + ": " + why);
}

size_t as_index(const json& v, size_t line, const char* field) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    malformed(line, std::string(field) + " expects non-negative integers");
  }
  return v.get<size_t>();
}

Tweet tweet_from_json(const json& obj, size_t line) {
  if (!obj.is_object()) malformed(line, "record is not an object");
  Tweet tweet;
  auto id = obj.find("id");
  auto text = obj.find("text");
  if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
    malformed(line, "missing string field 'id'");
  }
  if (text == obj.end() || !text->is_string()) malformed(line, "missing string field 'text'");
  tweet.id = id->get<std::string>();
  tweet.text = text->get<std::string>();
  if (tweet.text.size() > kMaxTweetBytes) malformed(line, "text exceeds 560 bytes");
  tweet.tokens = tokenize(tweet.text);
  const size_t n = tweet.tokens.size();

  if (auto ts = obj.find("timestamp"); ts != obj.end() && !ts->is_null()) {
    if (!ts->is_string()) malformed(line, "timestamp must be a string");
    tweet.timestamp = parse_iso8601(ts->get<std::string>());
    if (!tweet.timestamp) malformed(line, "unparsable timestamp");
  }
  if (auto r = obj.find("reply_to"); r != obj.end() && !r->is_null()) {
    if (!r->is_string()) malformed(line, "reply_to must be a string or null");
    tweet.reply_to = r->get<std::string>();
  }
  if (auto spans = obj.find("ne_spans"); spans != obj.end() && !spans->is_null()) {
    if (!spans->is_array()) malformed(line, "ne_spans must be an array");
    for (const auto& s : *spans) {
      if (!s.is_array() || s.size() != 2) malformed(line, "ne_spans entries are [start,end) pairs");
      NeSpan span{as_index(s[0], line, "ne_spans"), as_index(s[1], line, "ne_spans")};
      if (span.begin >= span.end || span.end > n) malformed(line, "ne_span out of range");
      tweet.ne_spans.push_back(span);
    }
  }
  if (auto slang = obj.find("slang"); slang != obj.end() && !slang->is_null()) {
    if (!slang->is_array()) malformed(line, "slang must be an array");
    for (const auto& s : *slang) {
      if (!s.is_object() || !s.contains("index") || !s.contains("canonical") ||
          !s["canonical"].is_string()) {
        malformed(line, "slang entries are {index, canonical}");
      }
      SlangPair pair{as_index(s["index"], line, "slang"), s["canonical"].get<std::string>()};
      if (pair.index >= n) malformed(line, "slang index out of range");
      tweet.slang.push_back(std::move(pair));
    }
  }
  if (auto caps = obj.find("informative_caps"); caps != obj.end() && !caps->is_null()) {
    if (!caps->is_array()) malformed(line, "informative_caps must be an array");
    std::vector<size_t> idx;
    for (const auto& c : *caps) {
      size_t i = as_index(c, line, "informative_caps");
      if (i >= n) malformed(line, "informative_caps index out of range");
      idx.push_back(i);
    }
    tweet.informative_caps = std::move(idx);
  }
  return tweet;
}

json tweet_to_json(const Tweet& tweet) {
  json obj;
  obj["id"] = tweet.id;
  obj["text"] = tweet.text;
  obj["timestamp"] = tweet.timestamp ? json(format_iso8601(*tweet.timestamp)) : json(nullptr);
  obj["reply_to"] = tweet.reply_to ? json(*tweet.reply_to) : json(nullptr);
  json spans = json::array();
  for (const NeSpan& s : tweet.ne_spans) spans.push_back({s.begin, s.end});
  obj["ne_spans"] = std::move(spans);
  json slang = json::array();
  for (const SlangPair& p : tweet.slang) slang.push_back({{"index", p.index}, {"canonical", p.canonical}});
  obj["slang"] = std::move(slang);
  if (tweet.informative_caps) obj["informative_caps"] = *tweet.informative_caps;
  return obj;
}

// Minimal RFC 4180 reader: quoted fields may contain separators, doubled
// quotes and newlines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Returns false at end of input. `line` is the 1-based start line.
  bool next(std::vector<std::string>& fields, size_t& line) {
    fields.clear();
    int c = in_.peek();
    while (c == '\n' || c == '\r') {
      in_.get();
      if (c == '\n') ++line_;
      c = in_.peek();
    }
    if (c == EOF) return false;
    line = line_;
    std::string field;
    bool quoted = false;
    bool any = false;
    while (true) {
      c = in_.get();
      if (c == EOF) {
        if (quoted) malformed(line, "unterminated quoted field");
        break;
      }
      any = true;
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(static_cast<char>(c));
        }
        continue;
      }
      if (c == '"' && field.empty()) {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        ++line_;
        break;
      } else if (c != '\r') {
        field.push_back(static_cast<char>(c));
      }
    }
    if (any) fields.push_back(std::move(field));
    return true;
  }

 private:
  std::istream& in_;
  size_t line_ = 1;
};

}  // namespace

Corpus parse_corpus(std::istream& in, CorpusFormat format) {
  std::vector<Tweet> tweets;
  if (format == CorpusFormat::kJsonl) {
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      json obj = json::parse(line, nullptr, false);
      if (obj.is_discarded()) malformed(line_no, "invalid JSON");
      tweets.push_back(tweet_from_json(obj, line_no));
    }
  } else {
    CsvReader reader(in);
    std::vector<std::string> fields;
    size_t line_no = 0;
    while (reader.next(fields, line_no)) {
      if (fields.size() != 6) malformed(line_no, "expected 6 columns");
      Tweet tweet;
      tweet.id = std::string(trim(fields[1]));
      if (tweet.id.empty()) malformed(line_no, "empty id");
      tweet.text = fields[5];
      if (tweet.text.size() > kMaxTweetBytes) malformed(line_no, "text exceeds 560 bytes");
      tweet.timestamp = parse_twitter_date(fields[2]);
      tweet.tokens = tokenize(tweet.text);
      tweets.push_back(std::move(tweet));
    }
  }
  return Corpus(std::move(tweets));
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_corpus(in, format);
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const Tweet& tweet : corpus.tweets()) {
    out << tweet_to_json(tweet).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::ostringstream ss;
  write_corpus_jsonl(corpus, ss);
  return ss.str();
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  write_file(path, corpus_to_jsonl(corpus));
}

// ---------------------------------------------------------------------------
// Threading

Threading thread_conversations(const Corpus& corpus) {
  const auto& tweets = corpus.tweets();
  const size_t n = tweets.size();
  constexpr size_t kNone = static_cast<size_t>(-1);
  std::unordered_map<std::string_view, size_t> index;
  for (size_t i = 0; i < n; ++i) index.emplace(tweets[i].id, i);

  // root[i]: index of the chain's starter, or kNone if the chain is broken
  // (unresolvable reply_to, or a cycle).
  std::vector<size_t> parent(n, kNone), root(n, kNone);
  std::vector<char> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
  for (size_t i = 0; i < n; ++i) {
    if (tweets[i].reply_to) {
      auto it = index.find(*tweets[i].reply_to);
      if (it != index.end()) parent[i] = it->second;
    }
  }
  for (size_t i = 0; i < n; ++i) {
    if (state[i] == 2) continue;
    std::vector<size_t> path;
    size_t cur = i;
    size_t resolved = kNone;
    while (true) {
      if (state[cur] == 2) {
        resolved = root[cur];
        break;
      }
      if (state[cur] == 1) break;  // cycle
      state[cur] = 1;
      path.push_back(cur);
      if (!tweets[cur].reply_to) {
        resolved = cur;
        break;
      }
      if (parent[cur] == kNone) break;  // dangling
      cur = parent[cur];
    }
    for (size_t p : path) {
      root[p] = resolved;
      state[p] = 2;
    }
  }

  // Effective timestamp: own timestamp, else inherited from the parent.
  using Key = std::tuple<long long, std::string_view>;
  std::vector<long long> eff(n, 0);
  std::vector<char> eff_done(n, 0);
  auto effective = [&](size_t i) {
    std::vector<size_t> chain;
    size_t cur = i;
    while (!eff_done[cur] && !tweets[cur].timestamp && parent[cur] != kNone &&
           root[cur] != kNone && cur != root[cur]) {
      chain.push_back(cur);
      cur = parent[cur];
    }
    if (!eff_done[cur]) {
      eff[cur] = tweets[cur].timestamp ? tweets[cur].timestamp->time_since_epoch().count()
                                       : std::numeric_limits<long long>::min();
      eff_done[cur] = 1;
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      eff[*it] = eff[cur];
      eff_done[*it] = 1;
    }
    return eff[i];
  };

  std::unordered_map<size_t, std::vector<size_t>> children;
  std::unordered_map<size_t, size_t> group_size;
  Threading result;
  for (size_t i = 0; i < n; ++i) {
    if (root[i] == kNone) {
      result.dangling.push_back(tweets[i].id);
      continue;
    }
    ++group_size[root[i]];
    if (i != root[i]) children[parent[i]].push_back(i);
  }
  std::sort(result.dangling.begin(), result.dangling.end());

  std::vector<size_t> starters;
  for (const auto& [r, count] : group_size) {
    if (count >= 2) starters.push_back(r);
  }
  std::sort(starters.begin(), starters.end(), [&](size_t a, size_t b) {
    return Key{effective(a), tweets[a].id} < Key{effective(b), tweets[b].id};
  });

  for (size_t s : starters) {
    Conversation conv;
    conv.starter = tweets[s].id;
    using Entry = std::pair<Key, size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
    frontier.push({Key{effective(s), tweets[s].id}, s});
    while (!frontier.empty()) {
      size_t cur = frontier.top().second;
      frontier.pop();
      conv.tweets.push_back(tweets[cur].id);
      if (auto it = children.find(cur); it != children.end()) {
        for (size_t c : it->second) frontier.push({Key{effective(c), tweets[c].id}, c});
      }
    }
    result.conversations.push_back(std::move(conv));
  }
  return result;
}

}  // namespace tweetprobe
