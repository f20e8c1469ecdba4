#include "markit/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace markit {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void parse_fail(const std::string& origin, size_t line_no, const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
}

int parse_time_index(const std::string& tok, const std::string& origin, size_t line_no) {
  int t = 0;
  const std::string s = trim(tok);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), t);
  if (ec != std::errc() || ptr != s.data() + s.size() || t < 1)
    parse_fail(origin, line_no, "bad time index '" + tok + "'");
  return t;
}

double parse_value(const std::string& tok, const std::string& origin, size_t line_no) {
  const std::string s = trim(tok);
  if (s.empty()) parse_fail(origin, line_no, "empty value field");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) parse_fail(origin, line_no, "bad value '" + tok + "'");
  if (!std::isfinite(v)) parse_fail(origin, line_no, "non-finite value '" + tok + "'");
  return v;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

MatrixSeries load_series_text(const std::string& text, const std::string& origin) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(origin + ": empty input");
  if (trim(lines[0]) != "t,row,col,value")
    parse_fail(origin, 1, "expected header 't,row,col,value', got '" + lines[0] + "'");

  std::vector<std::string> row_order, col_order;
  std::map<std::string, int> row_index, col_index;
  struct Cell {
    int t, r, c;
    double v;
  };
  std::vector<Cell> cells;
  int t_max = 0;
  for (size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) parse_fail(origin, li + 1, "blank line inside data");
    const std::vector<std::string> f = split(lines[li], ',');
    if (f.size() != 4)
      parse_fail(origin, li + 1,
                 "expected 4 fields, got " + std::to_string(f.size()));
    Cell cell;
    cell.t = parse_time_index(f[0], origin, li + 1);
    const std::string row = trim(f[1]), col = trim(f[2]);
    if (row.empty() || col.empty()) parse_fail(origin, li + 1, "empty label");
    auto [rit, rnew] = row_index.try_emplace(row, static_cast<int>(row_order.size()));
    if (rnew) row_order.push_back(row);
    auto [cit, cnew] = col_index.try_emplace(col, static_cast<int>(col_order.size()));
    if (cnew) col_order.push_back(col);
    cell.r = rit->second;
    cell.c = cit->second;
    cell.v = parse_value(f[3], origin, li + 1);
    t_max = std::max(t_max, cell.t);
    cells.push_back(cell);
  }

  const int m = static_cast<int>(row_order.size());
  const int n = static_cast<int>(col_order.size());
  if (m == 0 || n == 0 || t_max == 0) throw ParseError(origin + ": no data rows");
  if (cells.size() != static_cast<size_t>(t_max) * m * n)
    throw ParseError(origin + ": incomplete grid, expected " +
                     std::to_string(static_cast<size_t>(t_max) * m * n) + " cells for T=" +
                     std::to_string(t_max) + " m=" + std::to_string(m) + " n=" +
                     std::to_string(n) + ", got " + std::to_string(cells.size()));

  MatrixSeries s = MatrixSeries::create(m, n, t_max);
  s.row_labels = row_order;
  s.col_labels = col_order;
  std::vector<char> seen(cells.size(), 0);
  for (const Cell& cell : cells) {
    const size_t flat = (static_cast<size_t>(cell.t - 1) * m + cell.r) * n + cell.c;
    if (seen[flat])
      throw ParseError(origin + ": duplicate cell (t=" + std::to_string(cell.t) + ", " +
                       row_order[static_cast<size_t>(cell.r)] + ", " +
                       col_order[static_cast<size_t>(cell.c)] + ")");
    seen[flat] = 1;
    s.x[static_cast<size_t>(cell.t - 1)](cell.r, cell.c) = cell.v;
  }
  // count matched and no duplicates, so every cell is present
  return s;
}

MatrixSeries load_series(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_series_text(buf.str(), path);
}

std::string series_to_csv(const MatrixSeries& series) {
  series.validate();
  for (const auto& labels : {series.row_labels, series.col_labels})
    for (const std::string& label : labels)
      if (label.find_first_of(",\r\n") != std::string::npos)
        throw PreconditionError("label '" + label + "' contains a delimiter");
  std::string out = "t,row,col,value\n";
  for (int t = 0; t < series.T(); ++t)
    for (int i = 0; i < series.m; ++i)
      for (int j = 0; j < series.n; ++j) {
        out += std::to_string(t + 1);
        out += ',';
        out += series.row_labels[static_cast<size_t>(i)];
        out += ',';
        out += series.col_labels[static_cast<size_t>(j)];
        out += ',';
        out += format_g17(series.x[static_cast<size_t>(t)](i, j));
        out += '\n';
      }
  return out;
}

void save_series(const MatrixSeries& series, const std::string& path) {
  const std::string text = series_to_csv(series);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace {

std::vector<char> row_mask(const MatrixSeries& s, const PreprocessStep& step) {
  std::vector<char> mask(static_cast<size_t>(s.m), 1);
  if (step.applies_to.empty()) return mask;
  std::fill(mask.begin(), mask.end(), 0);
  for (const std::string& label : step.applies_to) {
    const auto it = std::find(s.row_labels.begin(), s.row_labels.end(), label);
    if (it == s.row_labels.end())
      throw PreconditionError("preprocess: unknown row label '" + label + "'");
    mask[static_cast<size_t>(it - s.row_labels.begin())] = 1;
  }
  return mask;
}

// One-step-shortening transforms; unfiltered rows carry the later value so
// the output stays aligned on the new index.
MatrixSeries shortened(const MatrixSeries& s, const std::vector<char>& mask,
                       PreprocessStep::Kind kind) {
  if (s.T() < 2) throw PreconditionError("preprocess: series too short to difference");
  MatrixSeries out = s;
  out.x.clear();
  out.x.reserve(static_cast<size_t>(s.T() - 1));
  for (int t = 1; t < s.T(); ++t) {
    Matrix cur = s.x[static_cast<size_t>(t)];
    const Matrix& prev = s.x[static_cast<size_t>(t - 1)];
    for (int i = 0; i < s.m; ++i) {
      if (!mask[static_cast<size_t>(i)]) continue;
      for (int j = 0; j < s.n; ++j) {
        const double a = prev(i, j), b = cur(i, j);
        switch (kind) {
          case PreprocessStep::Kind::Diff:
            cur(i, j) = b - a;
            break;
          case PreprocessStep::Kind::LogDiff:
            if (!(a > 0.0) || !(b > 0.0))
              throw NumericError("preprocess: logdiff requires positive values");
            cur(i, j) = std::log(b) - std::log(a);
            break;
          case PreprocessStep::Kind::PctFromLast:
            if (a == 0.0) throw NumericError("preprocess: pct change from a zero value");
            cur(i, j) = b / a - 1.0;
            break;
          default: break;
        }
      }
    }
    out.x.push_back(std::move(cur));
  }
  return out;
}

MatrixSeries seasonal_demean(const MatrixSeries& s, const std::vector<char>& mask, int period) {
  if (period < 2) throw PreconditionError("preprocess: seasonal period must be >= 2");
  MatrixSeries out = s;
  const int T = s.T();
  for (int i = 0; i < s.m; ++i) {
    if (!mask[static_cast<size_t>(i)]) continue;
    for (int j = 0; j < s.n; ++j) {
      std::vector<double> sum(static_cast<size_t>(period), 0.0);
      std::vector<int> count(static_cast<size_t>(period), 0);
      for (int t = 0; t < T; ++t) {
        sum[static_cast<size_t>(t % period)] += s.x[static_cast<size_t>(t)](i, j);
        ++count[static_cast<size_t>(t % period)];
      }
      for (int t = 0; t < T; ++t) {
        const size_t phase = static_cast<size_t>(t % period);
        out.x[static_cast<size_t>(t)](i, j) -= sum[phase] / count[phase];
      }
    }
  }
  return out;
}

MatrixSeries demean(const MatrixSeries& s, const std::vector<char>& mask) {
  MatrixSeries out = s;
  const int T = s.T();
  if (T == 0) return out;
  for (int i = 0; i < s.m; ++i) {
    if (!mask[static_cast<size_t>(i)]) continue;
    for (int j = 0; j < s.n; ++j) {
      double mean = 0.0;
      for (int t = 0; t < T; ++t) mean += s.x[static_cast<size_t>(t)](i, j);
      mean /= T;
      for (int t = 0; t < T; ++t) out.x[static_cast<size_t>(t)](i, j) -= mean;
    }
  }
  return out;
}

MatrixSeries row_normalize(const MatrixSeries& s, const std::vector<char>& mask) {
  MatrixSeries out = s;
  const int T = s.T();
  if (T == 0) return out;
  for (int i = 0; i < s.m; ++i) {
    if (!mask[static_cast<size_t>(i)]) continue;
    double mean = 0.0;
    for (int t = 0; t < T; ++t) mean += s.x[static_cast<size_t>(t)].row(i).sum();
    mean /= static_cast<double>(T) * s.n;
    double var = 0.0;
    for (int t = 0; t < T; ++t)
      var += (s.x[static_cast<size_t>(t)].row(i).array() - mean).square().sum();
    var /= static_cast<double>(T) * s.n;
    if (!(var > 0.0))
      throw NumericError("preprocess: rownorm on constant row '" +
                         s.row_labels[static_cast<size_t>(i)] + "'");
    const double sd = std::sqrt(var);
    for (int t = 0; t < T; ++t) out.x[static_cast<size_t>(t)].row(i) /= sd;
  }
  return out;
}

}  // namespace

MatrixSeries preprocess(const MatrixSeries& series, const std::vector<PreprocessStep>& steps) {
  series.validate();
  MatrixSeries cur = series;
  for (const PreprocessStep& step : steps) {
    const std::vector<char> mask = row_mask(cur, step);
    switch (step.kind) {
      case PreprocessStep::Kind::Diff:
      case PreprocessStep::Kind::LogDiff:
      case PreprocessStep::Kind::PctFromLast:
        cur = shortened(cur, mask, step.kind);
        break;
      case PreprocessStep::Kind::SeasonalDemean:
        cur = seasonal_demean(cur, mask, step.period);
        break;
      case PreprocessStep::Kind::RowNormalize:
        cur = row_normalize(cur, mask);
        break;
      case PreprocessStep::Kind::Demean:
        cur = demean(cur, mask);
        break;
    }
  }
  return cur;
}

std::vector<PreprocessStep> parse_preprocess(const std::string& spec) {
  std::vector<PreprocessStep> steps;
  if (trim(spec).empty()) return steps;
  for (const std::string& raw : split(spec, ',')) {
    const std::string entry = trim(raw);
    if (entry.empty()) throw ParseError("preprocess: empty step in '" + spec + "'");
    std::string head = entry;
    PreprocessStep step;
    const size_t at = entry.find('@');
    if (at != std::string::npos) {
      head = trim(entry.substr(0, at));
      for (const std::string& label : split(entry.substr(at + 1), '|')) {
        const std::string l = trim(label);
        if (l.empty()) throw ParseError("preprocess: empty label in '" + entry + "'");
        step.applies_to.push_back(l);
      }
      if (step.applies_to.empty())
        throw ParseError("preprocess: '@' with no labels in '" + entry + "'");
    }
    if (head == "diff") {
      step.kind = PreprocessStep::Kind::Diff;
    } else if (head == "logdiff") {
      step.kind = PreprocessStep::Kind::LogDiff;
    } else if (head == "pct") {
      step.kind = PreprocessStep::Kind::PctFromLast;
    } else if (head == "rownorm") {
      step.kind = PreprocessStep::Kind::RowNormalize;
    } else if (head == "demean") {
      step.kind = PreprocessStep::Kind::Demean;
    } else if (head.rfind("seasonal:", 0) == 0) {
      step.kind = PreprocessStep::Kind::SeasonalDemean;
      const std::string ptok = head.substr(9);
      int period = 0;
      const auto [ptr, ec] = std::from_chars(ptok.data(), ptok.data() + ptok.size(), period);
      if (ec != std::errc() || ptr != ptok.data() + ptok.size() || period < 2)
        throw ParseError("preprocess: bad seasonal period in '" + entry + "'");
      step.period = period;
    } else {
      throw ParseError("preprocess: unknown step '" + head + "'");
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace markit
