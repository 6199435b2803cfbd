#include "tweetprobe/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "tweetprobe/error.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

std::string percent(double f1) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", f1 * 100.0);
  return buf;
}

std::vector<std::string> ordered_models(const MetricsGrid& grid) {
  std::vector<std::string> out;
  for (ModelCategory cat : {ModelCategory::kUnsupervised, ModelCategory::kSupervised}) {
    for (const std::string& m : grid.models()) {
      if (model_category(m) == cat) out.push_back(m);
    }
  }
  return out;
}

}  // namespace

std::set<std::pair<std::string, TaskKind>> column_maxima(const MetricsGrid& grid) {
  std::set<std::pair<std::string, TaskKind>> best;
  for (TaskKind task : kAllTasks) {
    std::optional<double> top;
    for (const std::string& m : grid.models()) {
      if (auto v = grid.get(m, task); v && (!top || *v > *top)) top = v;
    }
    if (!top) continue;
    for (const std::string& m : grid.models()) {
      if (auto v = grid.get(m, task); v && *v == *top) best.emplace(m, task);
    }
  }
  return best;
}

std::string render_grid(const MetricsGrid& grid, GridFormat format) {
  std::ostringstream out;
  if (format == GridFormat::kCsv) {
    out << "model,task,f1\n";
    for (const std::string& m : ordered_models(grid)) {
      for (TaskKind task : kAllTasks) {
        if (auto v = grid.get(m, task)) out << m << ',' << task_name(task) << ',' << percent(*v) << '\n';
      }
    }
    return out.str();
  }
  const auto best = column_maxima(grid);
  out << "| Model |";
  for (TaskKind task : kAllTasks) out << ' ' << task_title(task) << " |";
  out << "\n|---|";
  for (size_t i = 0; i < kAllTasks.size(); ++i) out << "---:|";
  out << '\n';
  for (const std::string& m : ordered_models(grid)) {
    out << "| " << m << " |";
    for (TaskKind task : kAllTasks) {
      auto v = grid.get(m, task);
      if (!v) {
        out << " - |";
      } else if (best.count({m, task})) {
        out << " **" << percent(*v) << "** |";
      } else {
        out << ' ' << percent(*v) << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

MetricsGrid parse_grid_csv(std::string_view text) {
  MetricsGrid grid;
  size_t line_no = 0;
  bool header = true;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (header) {
      if (line != "model,task,f1") throw Error(ErrorCode::kMalformed, where + ": bad header");
      header = false;
      continue;
    }
    const auto parts = split(line, ',');
    if (parts.size() != 3 || parts[0].empty()) throw Error(ErrorCode::kMalformed, where);
    const auto task = parse_task(parts[1]);
    const auto value = parse_double(parts[2]);
    if (!task || !value) throw Error(ErrorCode::kMalformed, where);
    try {
      grid.set(std::string(parts[0]), *task, *value / 100.0);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformed, where + ": " + e.what());
    }
  }
  if (header) throw Error(ErrorCode::kMalformed, "missing header");
  return grid;
}

std::filesystem::path paper_reference_path() {
  if (const char* dir = std::getenv("TWEETPROBE_DATA_DIR"); dir != nullptr && *dir != '\0') {
    return std::filesystem::path(dir) / "table_iv.csv";
  }
  return std::filesystem::path(TWEETPROBE_DATA_DIR) / "table_iv.csv";
}

MetricsGrid load_paper_reference(const std::optional<std::filesystem::path>& path) {
  const std::filesystem::path p = path.value_or(paper_reference_path());
  const std::string text = read_file(p);
  const std::string sum = hex64(fnv1a64(text));
  if (sum != kPaperReferenceChecksum) {
    throw Error(ErrorCode::kMalformed, "reference table " + p.string() + " has checksum " + sum +
                                           ", expected " + std::string(kPaperReferenceChecksum));
  }
  MetricsGrid grid = parse_grid_csv(text);
  grid.metadata["source"] = "published table (reference, not reproduction target)";
  grid.metadata["checksum"] = sum;
  return grid;
}

std::optional<double> kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kDimMismatch, "kendall_tau length mismatch");
  long long concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++tie_x;
      } else if (dy == 0.0) {
        ++tie_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n1 = static_cast<double>(concordant + discordant + tie_x);
  const double n2 = static_cast<double>(concordant + discordant + tie_y);
  if (n1 == 0.0 || n2 == 0.0) return std::nullopt;
  return static_cast<double>(concordant - discordant) / std::sqrt(n1 * n2);
}

GridDiff diff_grids(const MetricsGrid& ours, const MetricsGrid& reference) {
  GridDiff diff;
  std::vector<std::string> shared;
  for (const std::string& m : ours.models()) {
    if (std::find(reference.models().begin(), reference.models().end(), m) !=
        reference.models().end()) {
      shared.push_back(m);
    }
  }
  if (shared.empty()) {
    diff.warnings.push_back("no models in common; nothing to compare");
    return diff;
  }
  for (TaskKind task : kAllTasks) {
    std::vector<double> a, b;
    for (const std::string& m : shared) {
      auto x = ours.get(m, task);
      auto y = reference.get(m, task);
      if (!x || !y) continue;
      diff.cells.push_back({m, task, *x, *y, *x - *y});
      a.push_back(*x);
      b.push_back(*y);
    }
    if (a.empty()) continue;
    TaskAgreement t{task, a.size(), std::nullopt};
    if (a.size() >= 2) t.kendall_tau = kendall_tau(a, b);
    diff.tasks.push_back(t);
  }
  return diff;
}

std::string render_diff(const GridDiff& diff) {
  std::ostringstream out;
  for (const std::string& w : diff.warnings) out << "warning: " << w << '\n';
  out << "model,task,ours,reference,delta\n";
  for (const CellDelta& c : diff.cells) {
    out << c.model << ',' << task_name(c.task) << ',' << percent(c.ours) << ','
        << percent(c.reference) << ',' << percent(c.delta) << '\n';
  }
  out << "\ntask,models,kendall_tau\n";
  for (const TaskAgreement& t : diff.tasks) {
    out << task_name(t.task) << ',' << t.models << ','
        << (t.kendall_tau ? format_double(*t.kendall_tau) : std::string()) << '\n';
  }
  return out.str();
}

}  // namespace tweetprobe
