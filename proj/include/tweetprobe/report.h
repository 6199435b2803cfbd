#ifndef TWEETPROBE_REPORT_H_
#define TWEETPROBE_REPORT_H_

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tweetprobe/analysis.h"

namespace tweetprobe {

enum class GridFormat { kMarkdown, kCsv };

// Markdown: rows are models (unsupervised block, then supervised), columns
// the 13 tasks in paper order, cells in percent with two decimals, column
// maxima in bold, missing cells as "-". CSV: header "model,task,f1", one row
// per cell, f1 in percent with two decimals.
std::string render_grid(const MetricsGrid& grid, GridFormat format);

// Inverse of the CSV rendering. Throws Malformed(line).
MetricsGrid parse_grid_csv(std::string_view text);

// Cells holding their column's maximum.
std::set<std::pair<std::string, TaskKind>> column_maxima(const MetricsGrid& grid);

// Path of the bundled reference table: $TWEETPROBE_DATA_DIR/table_iv.csv,
// falling back to the source tree's data directory.
std::filesystem::path paper_reference_path();

// FNV-1a 64 of the bundled table, as shipped.
inline constexpr std::string_view kPaperReferenceChecksum = "b7a9a7aad1986cde";

// Loads the published F1 grid (13 models x 13 tasks). Throws Malformed when
// the file's checksum differs from kPaperReferenceChecksum.
MetricsGrid load_paper_reference(const std::optional<std::filesystem::path>& path = std::nullopt);

struct CellDelta {
  std::string model;
  TaskKind task;
  double ours;
  double reference;
  double delta;  // ours - reference
};

struct TaskAgreement {
  TaskKind task;
  size_t models = 0;
  std::optional<double> kendall_tau;  // needs >= 2 shared models
};

struct GridDiff {
  std::vector<CellDelta> cells;
  std::vector<TaskAgreement> tasks;
  std::vector<std::string> warnings;
};

// Kendall tau-b; nullopt when either side is constant.
std::optional<double> kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

GridDiff diff_grids(const MetricsGrid& ours, const MetricsGrid& reference);
std::string render_diff(const GridDiff& diff);

}  // namespace tweetprobe

#endif  // TWEETPROBE_REPORT_H_
