#include "counterplan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace counterplan {

void TaskOutcome::validate() const {
  if (subtasks_total < 1) throw InvalidValue("task " + task_id + ": subtasks_total must be at least 1");
  if (subtasks_achieved > subtasks_total)
    throw InvalidValue("task " + task_id + ": more subtasks achieved than exist");
  if (success && subtasks_achieved != subtasks_total)
    throw InvalidValue("task " + task_id + ": success requires every subtask achieved");
}

namespace {

void require_outcomes(std::span<const TaskOutcome> outcomes, const char* metric) {
  if (outcomes.empty()) throw InvalidValue(std::string(metric) + " is undefined for an empty outcome list");
  for (const auto& o : outcomes) o.validate();
}

}  // namespace

double success_rate(std::span<const TaskOutcome> outcomes) {
  require_outcomes(outcomes, "SR");
  std::size_t n = 0;
  for (const auto& o : outcomes) n += o.success ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(outcomes.size());
}

double goal_condition(std::span<const TaskOutcome> outcomes) {
  require_outcomes(outcomes, "GC");
  double sum = 0.0;
  for (const auto& o : outcomes)
    sum += static_cast<double>(o.subtasks_achieved) / static_cast<double>(o.subtasks_total);
  return sum / static_cast<double>(outcomes.size());
}

namespace {

double normalized_deviation(const TaskOutcome& o) {
  const auto longest = std::max(o.demo_sequence.size(), o.adapted_sequence.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(edit_distance(o.adapted_sequence, o.demo_sequence)) / static_cast<double>(longest);
}

}  // namespace

std::optional<double> procedure_deviation(std::span<const TaskOutcome> outcomes) {
  require_outcomes(outcomes, "PD");
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& o : outcomes) {
    if (!o.success) continue;
    sum += normalized_deviation(o);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return edit_distance(std::span<const std::string>(a), std::span<const std::string>(b));
}

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  out.n = values.size();
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.n - 1));
  out.se = sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

MetricsRow summarize(std::string factor, std::string complexity, std::span<const TaskOutcome> outcomes,
                     const MetricsConfig& config) {
  if (config.lambda < 0) throw InvalidValue("lambda must be non-negative");
  require_outcomes(outcomes, "metrics");
  MetricsRow row;
  row.factor = std::move(factor);
  row.complexity = std::move(complexity);
  row.tasks = outcomes.size();
  std::vector<double> sr, gc, pd;
  for (const auto& o : outcomes) {
    sr.push_back(o.success ? 1.0 : 0.0);
    gc.push_back(static_cast<double>(o.subtasks_achieved) / static_cast<double>(o.subtasks_total));
    if (o.success) pd.push_back(normalized_deviation(o));
  }
  row.sr = mean_se(sr);
  row.gc = mean_se(gc);
  if (!pd.empty()) {
    row.pd = mean_se(pd);
    row.composite = row.sr.mean - config.lambda * row.pd->mean;
  }
  return row;
}

std::string format_percent(const MeanSe& v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f\xC2\xB1%.2f", 100.0 * v.mean, 100.0 * v.se);
  return buf;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Display width, counting UTF-8 continuation bytes as zero.
std::size_t width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

}  // namespace

std::string metrics_csv(std::span<const MetricsRow> rows) {
  std::string out =
      "factor,complexity,tasks,SR,GC,PD,SR_mean,SR_se,GC_mean,GC_se,PD_mean,PD_se,composite\n";
  for (const auto& r : rows) {
    out += csv_field(r.factor) + "," + csv_field(r.complexity) + "," + std::to_string(r.tasks) + ",";
    out += format_percent(r.sr) + "," + format_percent(r.gc) + ",";
    out += (r.pd ? format_percent(*r.pd) : std::string(kAbsent)) + ",";
    out += fixed(r.sr.mean, 6) + "," + fixed(r.sr.se, 6) + "," + fixed(r.gc.mean, 6) + "," + fixed(r.gc.se, 6) + ",";
    if (r.pd) {
      out += fixed(r.pd->mean, 6) + "," + fixed(r.pd->se, 6) + ",";
    } else {
      out += std::string(kAbsent) + "," + std::string(kAbsent) + ",";
    }
    out += r.composite ? fixed(*r.composite, 6) : std::string(kAbsent);
    out += "\n";
  }
  return out;
}

std::string metrics_table(std::span<const MetricsRow> rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"factor", "complexity", "tasks", "SR (%)", "GC (%)", "PD (%)"});
  for (const auto& r : rows)
    cells.push_back({r.factor, r.complexity, std::to_string(r.tasks), format_percent(r.sr), format_percent(r.gc),
                     r.pd ? format_percent(*r.pd) : std::string(kAbsent)});
  std::vector<std::size_t> widths(cells.front().size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], width(row[c]));
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c) out += "  ";
      const auto pad = widths[c] - width(cells[r][c]);
      if (c < 2) {
        out += cells[r][c] + std::string(pad, ' ');
      } else {
        out += std::string(pad, ' ') + cells[r][c];
      }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : widths) total += w;
      out += std::string(total + 2 * (widths.size() - 1), '-') + "\n";
    }
  }
  return out;
}

}  // namespace counterplan
