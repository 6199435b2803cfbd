#ifndef TWEETPROBE_TASKS_H_
#define TWEETPROBE_TASKS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tweetprobe/corpus.h"

namespace tweetprobe {

// Paper order: eight textual tasks followed by five social tasks.
enum class TaskKind {
  kLength,
  kContent,
  kWordOrder,
  kSlangWords,
  kHashtag,
  kNamedEntity,
  kCapCount,
  kInformativeCap,
  kMentionCount,
  kMentionPosition,
  kIsReply,
  kReplyTime,
  kWordRepetition,
};

constexpr std::array<TaskKind, 13> kAllTasks = {
    TaskKind::kLength,       TaskKind::kContent,        TaskKind::kWordOrder,
    TaskKind::kSlangWords,   TaskKind::kHashtag,        TaskKind::kNamedEntity,
    TaskKind::kCapCount,     TaskKind::kInformativeCap, TaskKind::kMentionCount,
    TaskKind::kMentionPosition, TaskKind::kIsReply,     TaskKind::kReplyTime,
    TaskKind::kWordRepetition};

// snake_case identifier used in files and on the command line.
std::string_view task_name(TaskKind kind);
// Column title used in rendered tables.
std::string_view task_title(TaskKind kind);
std::optional<TaskKind> parse_task(std::string_view name);

// Number of auxiliary inputs (0, 1 or 2) each task pairs with the tweet.
size_t aux_arity(TaskKind kind);
bool is_binary(TaskKind kind);

struct TaskConfig {
  size_t length_bin_width = 4;
  size_t length_max_bin = 7;
  size_t cap_max_class = 10;
  size_t mention_max_class = 10;
  size_t mention_position_max_class = 19;
  size_t reply_bin_minutes = 10;
  std::array<double, 3> split_ratios = {0.7, 0.1, 0.2};

  // Hash of the canonical JSON form, for provenance.
  std::string hash() const;
};

// Throws InvalidConfig.
void validate(const TaskConfig& cfg);
size_t class_count(TaskKind kind, const TaskConfig& cfg);

// A single word, or the member words of an n-gram.
using AuxItem = std::vector<std::string>;

struct TaskInstance {
  std::string tweet_id;
  std::vector<AuxItem> aux;
  int label = 0;

  bool operator==(const TaskInstance&) const = default;
};

struct Provenance {
  std::string corpus_id;
  uint64_t seed = 0;
  std::string config_hash;

  bool operator==(const Provenance&) const = default;
};

struct TaskDataset {
  TaskKind kind = TaskKind::kLength;
  std::vector<TaskInstance> instances;
  size_t class_count = 0;
  std::vector<size_t> train;
  std::vector<size_t> val;
  std::vector<size_t> test;
  Provenance provenance;

  bool operator==(const TaskDataset&) const = default;
};

// Instance constructors. They return instances in construction order with
// no split; build_task balances, shuffles and splits.
TaskDataset build_length(const Corpus& corpus, size_t bin_width = 4, size_t max_bin = 7);
TaskDataset build_content(const Corpus& corpus, uint64_t seed);
TaskDataset build_word_order(const Corpus& corpus, uint64_t seed);
TaskDataset build_slang(const Corpus& corpus, uint64_t seed);
TaskDataset build_hashtag(const Corpus& corpus, uint64_t seed);
TaskDataset build_named_entity(const Corpus& corpus, uint64_t seed);
TaskDataset build_cap_count(const Corpus& corpus, size_t max_class = 10);
TaskDataset build_informative_cap(const Corpus& corpus, uint64_t seed);
TaskDataset build_mention_count(const Corpus& corpus, size_t max_class = 10);
TaskDataset build_mention_position(const Corpus& corpus, size_t max_class = 19);
TaskDataset build_is_reply(const Corpus& corpus, uint64_t seed);
TaskDataset build_reply_time(const Corpus& corpus, size_t bin_minutes = 10);
TaskDataset build_word_repetition(const Corpus& corpus, uint64_t seed);

// Downsamples binary datasets to an exact 1:1 class ratio.
void balance(TaskDataset& dataset, uint64_t seed);

// Stratified split that keeps all instances of a tweet in one split (groups
// are stratified by their label multiset). Throws InvalidRatios unless the ratios are
// non-negative and sum to 1 within 1e-9.
void split(TaskDataset& dataset, const std::array<double, 3>& ratios, uint64_t seed);

// Dispatcher: construct, balance (binary tasks), shuffle and split.
// Throws NoInstances when the corpus yields nothing for the task.
TaskDataset build_task(TaskKind kind, const Corpus& corpus, const TaskConfig& cfg, uint64_t seed);

// Words (lowercased) of a tweet's Word tokens, in order.
std::vector<std::string> content_words(const Tweet& tweet);

// Minutes until the earliest direct reply of each conversation starter.
struct ReplyDelay {
  std::string starter;
  double minutes;
};
std::vector<ReplyDelay> first_reply_delays(const Corpus& corpus);

// JSONL instance file (tweet_id, aux, label, split) plus a sidecar metadata
// JSON (kind, class_count, seed, config hash, corpus id).
void save_task_dataset(const TaskDataset& dataset, const std::filesystem::path& instances_path,
                       const std::filesystem::path& meta_path);
TaskDataset load_task_dataset(const std::filesystem::path& instances_path,
                              const std::filesystem::path& meta_path);

}  // namespace tweetprobe

#endif  // TWEETPROBE_TASKS_H_
