#include "wove/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "wove/errors.hpp"

namespace wove {

namespace {

std::string count_str(std::size_t n) { return std::to_string(n); }

bool parse_double(const std::string& text, double& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

bool comparable(const std::string& key) {
  return key.ends_with(".correct") || key.ends_with(".found") || key.ends_with(".avg_rank");
}

bool lower_is_better(const std::string& key) { return key.ends_with(".avg_rank"); }

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

KeyValues to_key_values(const EvalReport& report) {
  KeyValues kv;
  if (report.analogy) {
    const auto& a = *report.analogy;
    kv.emplace_back("analogy.asked", count_str(a.total.asked));
    kv.emplace_back("analogy.answered", count_str(a.total.answered));
    kv.emplace_back("analogy.correct", count_str(a.total.correct));
    kv.emplace_back("analogy.accuracy", format_fixed(a.total.accuracy()));
    kv.emplace_back("analogy.coverage", format_fixed(a.total.coverage()));
    for (const auto& [name, t] : a.sections) {
      const std::string key = "analogy.section." + name;
      kv.emplace_back(key + ".asked", count_str(t.asked));
      kv.emplace_back(key + ".answered", count_str(t.answered));
      kv.emplace_back(key + ".correct", count_str(t.correct));
    }
  }
  if (!report.similarity.empty()) {
    double rank_sum = 0.0;
    double found_sum = 0.0;
    for (const auto& s : report.similarity) {
      const std::string key = "similarity." + s.name;
      kv.emplace_back(key + ".pairs", count_str(s.ranks.size()));
      kv.emplace_back(key + ".avg_rank", format_real(s.average_rank));
      kv.emplace_back(key + ".found", count_str(s.found));
      rank_sum += s.average_rank;
      found_sum += static_cast<double>(s.found);
    }
    const auto n = static_cast<double>(report.similarity.size());
    kv.emplace_back("similarity.mean.avg_rank", format_real(rank_sum / n));
    kv.emplace_back("similarity.mean.found", format_real(found_sum / n));
  }
  return kv;
}

void write_report(std::ostream& out, const EvalReport& report) {
  if (report.analogy) {
    const auto& a = *report.analogy;
    out << "# " << pad("analogy section", 32) << pad("asked", 10) << pad("answered", 10)
        << pad("correct", 10) << "accuracy\n";
    for (const auto& [name, t] : a.sections) {
      out << "# " << pad(name.empty() ? "(unnamed)" : name, 32) << pad(count_str(t.asked), 10)
          << pad(count_str(t.answered), 10) << pad(count_str(t.correct), 10)
          << format_fixed(t.accuracy()) << "%\n";
    }
    out << "# " << pad("total", 32) << pad(count_str(a.total.asked), 10)
        << pad(count_str(a.total.answered), 10) << pad(count_str(a.total.correct), 10)
        << format_fixed(a.total.accuracy()) << "% (coverage " << format_fixed(a.total.coverage())
        << "%)\n";
  }
  if (!report.similarity.empty()) {
    out << "# " << pad("similarity dataset", 32) << pad("pairs", 10) << pad("avg rank", 10)
        << "synonyms\n";
    for (const auto& s : report.similarity) {
      out << "# " << pad(s.name, 32) << pad(count_str(s.ranks.size()), 10)
          << pad(format_fixed(s.average_rank), 10) << s.found << '\n';
    }
  }
  for (const auto& [k, v] : to_key_values(report)) out << k << '=' << v << '\n';
}

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw DataError("line " + std::to_string(line_no) + ": expected key=value");
    }
    kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
  }
  return kv;
}

std::vector<ComparisonRow> compare_reports(const KeyValues& base, const KeyValues& candidate) {
  std::vector<ComparisonRow> rows;
  for (const auto& [key, base_text] : base) {
    if (!comparable(key)) continue;
    auto it = std::find_if(candidate.begin(), candidate.end(),
                           [&](const auto& kv) { return kv.first == key; });
    if (it == candidate.end()) continue;
    ComparisonRow row{key, 0.0, 0.0, std::nullopt};
    if (!parse_double(base_text, row.base) || !parse_double(it->second, row.candidate)) {
      throw DataError("non-numeric value for " + key);
    }
    if (row.base > 0.0) {
      const double rel = relative_improvement(row.candidate, row.base);
      row.improvement = lower_is_better(key) ? -rel : rel;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::pair<std::string, double>> mean_improvements(
    const std::vector<std::vector<ComparisonRow>>& comparisons) {
  std::vector<std::pair<std::string, double>> out;
  if (comparisons.empty()) return out;
  for (const auto& row : comparisons.front()) {
    double sum = 0.0;
    bool complete = true;
    for (const auto& rows : comparisons) {
      auto it = std::find_if(rows.begin(), rows.end(),
                             [&](const ComparisonRow& r) { return r.metric == row.metric; });
      if (it == rows.end() || !it->improvement) {
        complete = false;
        break;
      }
      sum += *it->improvement;
    }
    if (complete) out.emplace_back(row.metric, sum / static_cast<double>(comparisons.size()));
  }
  return out;
}

void write_comparison_table(std::ostream& out, const std::string& title,
                            const std::vector<ComparisonRow>& rows) {
  out << title << '\n';
  out << pad("metric", 48) << pad("base", 12) << pad("new", 12) << "relimprov\n";
  for (const auto& r : rows) {
    out << pad(r.metric, 48) << pad(format_real(r.base), 12) << pad(format_real(r.candidate), 12)
        << (r.improvement ? format_fixed(*r.improvement) + "%" : std::string("n/a")) << '\n';
  }
}

}  // namespace wove
