#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wove/evaluator.hpp"

namespace wove {

struct EvalReport {
  std::optional<AnalogyReport> analogy;
  std::vector<SimilarityReport> similarity;
};

/// Ordered `key=value` pairs.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Keys: analogy.{asked,answered,correct,accuracy,coverage},
/// analogy.section.<name>.{asked,answered,correct},
/// similarity.<name>.{pairs,avg_rank,found}, similarity.mean.{avg_rank,found}.
KeyValues to_key_values(const EvalReport& report);

/// Human-readable table as `#` comment lines, then the key=value dump.
void write_report(std::ostream& out, const EvalReport& report);

/// Reads key=value lines, skipping blanks and `#` comments.
KeyValues read_key_values(std::istream& in);

std::string format_fixed(double value, int decimals = 2);

struct ComparisonRow {
  std::string metric;
  double base = 0.0;
  double candidate = 0.0;
  /// Positive is better. Empty when the base is not positive.
  std::optional<double> improvement;
};

/// Relative improvement for every count/rank metric present in both
/// reports. Average ranks improve downward: 100 (base - new) / base.
std::vector<ComparisonRow> compare_reports(const KeyValues& base, const KeyValues& candidate);

/// Per-metric mean improvement across several comparisons, for metrics that
/// have an improvement in every one of them, in first-comparison order.
std::vector<std::pair<std::string, double>> mean_improvements(
    const std::vector<std::vector<ComparisonRow>>& comparisons);

void write_comparison_table(std::ostream& out, const std::string& title,
                            const std::vector<ComparisonRow>& rows);

}  // namespace wove
