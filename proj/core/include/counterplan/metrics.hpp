#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "counterplan/errors.hpp"

namespace counterplan {

struct TaskOutcome {
  std::string task_id;
  std::size_t subtasks_total = 1;
  std::size_t subtasks_achieved = 0;
  bool success = false;
  std::vector<std::string> demo_sequence;
  std::vector<std::string> adapted_sequence;

  // Throws InvalidValue when the counts are inconsistent.
  void validate() const;
};

struct MetricsConfig {
  double lambda = 0.0;  // weight of the SR - lambda * PD report column
};

// All three throw InvalidValue on an empty outcome list.
double success_rate(std::span<const TaskOutcome> outcomes);
double goal_condition(std::span<const TaskOutcome> outcomes);
// Absent when no task succeeded.
std::optional<double> procedure_deviation(std::span<const TaskOutcome> outcomes);

// Levenshtein distance with unit costs.
template <typename T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Mean and standard error (sample deviation over sqrt(n); zero for n < 2).
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> values);

struct MetricsRow {
  std::string factor;
  std::string complexity;
  std::size_t tasks = 0;
  MeanSe sr;                 // fractions in [0, 1]
  MeanSe gc;
  std::optional<MeanSe> pd;  // over successful tasks only
  std::optional<double> composite;  // sr.mean - lambda * pd.mean
};

MetricsRow summarize(std::string factor, std::string complexity, std::span<const TaskOutcome> outcomes,
                     const MetricsConfig& config = {});

// "−" (U+2212) marks an absent value in rendered tables.
inline constexpr std::string_view kAbsent = "\xE2\x88\x92";

// Percent columns are 100x the fraction, printed "mean±se" with two decimals;
// raw fraction columns follow.
std::string metrics_csv(std::span<const MetricsRow> rows);
std::string metrics_table(std::span<const MetricsRow> rows);
std::string format_percent(const MeanSe& v);

}  // namespace counterplan
