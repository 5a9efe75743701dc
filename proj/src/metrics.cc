#include "relnet/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "relnet/error.h"
#include "relnet/network.h"

namespace relnet {

namespace {

void check_finite(std::span<const ScoredExample> items) {
  for (const auto& it : items) {
    if (!std::isfinite(it.score)) throw NumericError("non-finite score");
  }
}

std::vector<ScoredExample> sorted_descending(std::span<const ScoredExample> items) {
  std::vector<ScoredExample> v(items.begin(), items.end());
  std::stable_sort(v.begin(), v.end(), [](const ScoredExample& a, const ScoredExample& b) {
    return a.score > b.score;
  });
  return v;
}

}  // namespace

double auc_roc(std::span<const ScoredExample> items) {
  check_finite(items);
  const auto v = sorted_descending(items);
  double pos = 0, neg = 0;
  for (const auto& it : v) (it.label == Label::kPositive ? pos : neg) += 1;
  if (pos == 0 || neg == 0) {
    throw UndefinedMetricError("AUC-ROC needs both positive and negative examples");
  }
  // For each tie group: positives in the group beat every negative below it
  // and split the negatives inside it.
  double wins = 0.0;
  double neg_below = neg;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    double gp = 0, gn = 0;
    while (j < v.size() && v[j].score == v[i].score) {
      (v[j].label == Label::kPositive ? gp : gn) += 1;
      ++j;
    }
    neg_below -= gn;
    wins += gp * (neg_below + 0.5 * gn);
    i = j;
  }
  return wins / (pos * neg);
}

double auc_pr(std::span<const ScoredExample> items) {
  check_finite(items);
  const auto v = sorted_descending(items);
  double pos = 0;
  for (const auto& it : v) pos += it.label == Label::kPositive;
  if (pos == 0) throw UndefinedMetricError("AUC-PR needs at least one positive example");
  double tp = 0, fp = 0, area = 0, prev_recall = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j].score == v[i].score) {
      (v[j].label == Label::kPositive ? tp : fp) += 1;
      ++j;
    }
    const double recall = tp / pos;
    area += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    i = j;
  }
  return area;
}

void write_scores(std::ostream& out, std::span<const ScoreRow> rows) {
  out << "# example_id\tscore\tlabel\n";
  for (const auto& r : rows) {
    out << r.example_id << '\t' << format_double(r.score) << '\t'
        << (r.label == Label::kPositive ? 1 : 0) << '\n';
  }
}

std::vector<ScoreRow> read_scores(std::istream& in, const std::string& source) {
  std::vector<ScoreRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw ParseError(source, line_no, 1, "expected three tab-separated fields");
    }
    ScoreRow row;
    row.example_id = line.substr(0, t1);
    const std::string_view score_text(line.data() + t1 + 1, t2 - t1 - 1);
    auto [ptr, ec] = std::from_chars(score_text.data(),
                                     score_text.data() + score_text.size(), row.score);
    if (ec != std::errc() || ptr != score_text.data() + score_text.size()) {
      throw ParseError(source, line_no, static_cast<int>(t1) + 2, "invalid score");
    }
    const std::string label = line.substr(t2 + 1);
    if (label == "1") {
      row.label = Label::kPositive;
    } else if (label == "0") {
      row.label = Label::kNegative;
    } else {
      throw ParseError(source, line_no, static_cast<int>(t2) + 2, "label must be 0 or 1");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace relnet
