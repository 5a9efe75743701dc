#ifndef RELNET_METRICS_H_
#define RELNET_METRICS_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relnet/grounder.h"

namespace relnet {

struct ScoredExample {
  double score = 0.0;
  Label label = Label::kNegative;
};

// Mann-Whitney statistic P(s+ > s-) + P(s+ = s-)/2. Throws
// UndefinedMetricError unless both classes are present.
double auc_roc(std::span<const ScoredExample> items);

// Area under the precision-recall step curve: sweep thresholds in
// descending score order, one point per group of tied scores, and sum
// precision * (recall increment). No interpolation between points. Throws
// UndefinedMetricError when there is no positive.
double auc_pr(std::span<const ScoredExample> items);

// Scores file: tab separated "example_id<TAB>score<TAB>label" with label 1/0
// and a '#' header line.
struct ScoreRow {
  std::string example_id;
  double score = 0.0;
  Label label = Label::kNegative;
};

void write_scores(std::ostream& out, std::span<const ScoreRow> rows);
std::vector<ScoreRow> read_scores(std::istream& in, const std::string& source = "<scores>");

}  // namespace relnet

#endif  // RELNET_METRICS_H_
