#pragma once

#include <string>
#include <vector>

#include "markit/model.hpp"
#include "markit/types.hpp"

namespace markit {

// Long CSV format: header exactly `t,row,col,value`; t is 1-based and the
// grid of (t, row, col) must be complete. Labels keep first-appearance order.
MatrixSeries load_series(const std::string& path);
MatrixSeries load_series_text(const std::string& text, const std::string& origin = "<memory>");
void save_series(const MatrixSeries& series, const std::string& path);
std::string series_to_csv(const MatrixSeries& series);

// 17-significant-digit text form, round-trippable for doubles.
std::string format_g17(double v);

struct PreprocessStep {
  enum class Kind { Diff, LogDiff, PctFromLast, SeasonalDemean, RowNormalize, Demean };

  Kind kind = Kind::Demean;
  int period = 0;                       // SeasonalDemean only, >= 2
  std::vector<std::string> applies_to;  // row labels; empty means all rows
};

// Steps applied in order. Differencing steps shorten the series by one;
// rows outside `applies_to` pass through aligned with the shortened index.
MatrixSeries preprocess(const MatrixSeries& series, const std::vector<PreprocessStep>& steps);

// Textual step list: comma-separated entries of
//   diff | logdiff | pct | seasonal:<period> | rownorm | demean
// each optionally filtered as `step@Label1|Label2`.
std::vector<PreprocessStep> parse_preprocess(const std::string& spec);

}  // namespace markit
