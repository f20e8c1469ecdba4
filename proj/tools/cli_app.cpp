#include "cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "markit.h"

namespace {

// Failures coming back from the library (bad data, singular systems, IO):
// reported on stderr and mapped to exit code 1. Argument problems are thrown
// as CLI::ValidationError instead so they follow the usage-error path (2).
struct CliFailure {
  std::string message;
};

void check(markit_status st) {
  if (st != MARKIT_OK) throw CliFailure{markit_last_error()};
}

template <typename T, void (*F)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { F(p); }
};
using SeriesPtr = std::unique_ptr<markit_series, HandleDeleter<markit_series, markit_series_free>>;
using ModelPtr = std::unique_ptr<markit_model, HandleDeleter<markit_model, markit_model_free>>;
using Var1Ptr = std::unique_ptr<markit_var1, HandleDeleter<markit_var1, markit_var1_free>>;
using FitPtr = std::unique_ptr<markit_fit, HandleDeleter<markit_fit, markit_fit_free>>;
using AcovPtr = std::unique_ptr<markit_acov, HandleDeleter<markit_acov, markit_acov_free>>;
using CiPtr = std::unique_ptr<markit_ci, HandleDeleter<markit_ci, markit_ci_free>>;
using IrfPtr = std::unique_ptr<markit_irf, HandleDeleter<markit_irf, markit_irf_free>>;
using ForecastPtr =
    std::unique_ptr<markit_forecast, HandleDeleter<markit_forecast, markit_forecast_free>>;
using TablePtr = std::unique_ptr<markit_table, HandleDeleter<markit_table, markit_table_free>>;

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string f3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliFailure{"cannot open output file: " + path};
  return out;
}

void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::json& flags) {
  if (path.empty()) return;
  nlohmann::json doc;
  doc["command"] = command;
  doc["flags"] = flags;
  doc["versions"] = {{"markit", markit_version()}};
  std::ofstream out = open_out(path);
  out << doc.dump(2) << "\n";
  if (!out) throw CliFailure{"failed while writing manifest: " + path};
}

int parse_setting(const std::string& text) {
  if (text == "I" || text == "1") return 1;
  if (text == "II" || text == "2") return 2;
  if (text == "III" || text == "3") return 3;
  throw CLI::ValidationError("--setting", "expected I, II or III, got '" + text + "'");
}

// Matrices on the command line are written row by row: rows separated by ';',
// entries by ','. Returns a column-major buffer.
std::vector<double> parse_square_matrix(const std::string& text, const std::string& flag,
                                        int& dim) {
  std::vector<std::vector<double>> rows;
  std::string row_text;
  std::stringstream stream(text);
  while (std::getline(stream, row_text, ';')) {
    std::vector<double> row;
    std::string cell;
    std::stringstream row_stream(row_text);
    while (std::getline(row_stream, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw CLI::ValidationError(flag, "bad matrix entry '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  dim = static_cast<int>(rows.size());
  if (dim == 0) throw CLI::ValidationError(flag, "empty matrix");
  for (const auto& row : rows)
    if (static_cast<int>(row.size()) != dim)
      throw CLI::ValidationError(flag, "matrix must be square with ';' separated rows");
  std::vector<double> colmajor(static_cast<size_t>(dim) * dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i)
      colmajor[static_cast<size_t>(j) * dim + i] = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return colmajor;
}

SeriesPtr load_input(const std::string& path, const std::string& steps) {
  markit_series* raw = nullptr;
  check(markit_series_load_csv(path.c_str(), &raw));
  SeriesPtr s(raw);
  if (!steps.empty()) {
    markit_series* cooked = nullptr;
    check(markit_series_preprocess(s.get(), steps.c_str(), &cooked));
    s.reset(cooked);
  }
  return s;
}

struct CoefRow {
  std::string entry;
  double est;
  double se;
  double lo;
  double hi;
};

const char* mark_of(const CoefRow& r) {
  if (r.lo > 0.0) return "+";
  if (r.hi < 0.0) return "-";
  return "0";
}

void write_coef_csv(const std::string& path, const std::vector<CoefRow>& rows) {
  std::ofstream out = open_out(path);
  out << "entry,estimate,stderr,lower,upper,mark\n";
  for (const CoefRow& r : rows)
    out << r.entry << ',' << g17(r.est) << ',' << g17(r.se) << ',' << g17(r.lo) << ','
        << g17(r.hi) << ',' << mark_of(r) << '\n';
  if (!out) throw CliFailure{"failed while writing: " + path};
}

void print_coef_table(const std::vector<CoefRow>& rows) {
  std::printf("%-10s %10s %10s %10s %10s %5s\n", "entry", "estimate", "stderr", "lower", "upper",
              "mark");
  for (const CoefRow& r : rows)
    std::printf("%-10s %10s %10s %10s %10s %5s\n", r.entry.c_str(), f3(r.est).c_str(),
                f3(r.se).c_str(), f3(r.lo).c_str(), f3(r.hi).c_str(), mark_of(r));
}

// Bracketed per-axis indices keep the names free of the CSV delimiter.
std::string entry_name(const char* base, int i, int j) {
  return std::string(base) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

// Stacked coefficient index -> A/B entry name. Layout 0 stacks (vec A, vec B),
// layout 1 stacks (vec A, vec B^T); both vecs are column-major.
std::string stacked_entry_name(int k, int m, int n, int layout) {
  if (k < m * m) return entry_name("A", k % m + 1, k / m + 1);
  const int l = k - m * m;
  if (layout == 0) return entry_name("B", l % n + 1, l / n + 1);
  return entry_name("B", l / n + 1, l % n + 1);
}

double z_for_level(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw CLI::ValidationError("--level", "confidence level must be in (0,1)");
  double z = 0.0;
  check(markit_normal_quantile(0.5 + level / 2.0, &z));
  return z;
}

markit_method parse_method(const std::string& text) {
  if (text == "proj") return MARKIT_METHOD_PROJ;
  if (text == "lse") return MARKIT_METHOD_LSE;
  if (text == "mle" || text == "mles") return MARKIT_METHOD_MLE;
  throw CLI::ValidationError("--method", "expected proj, lse or mle, got '" + text + "'");
}

markit_fc_method parse_fc_method(const std::string& text) {
  if (text == "proj") return MARKIT_FC_PROJ;
  if (text == "lse") return MARKIT_FC_LSE;
  if (text == "mle" || text == "mles") return MARKIT_FC_MLE;
  if (text == "var1") return MARKIT_FC_VAR1;
  if (text == "iar1") return MARKIT_FC_IAR1;
  if (text == "iar2") return MARKIT_FC_IAR2;
  throw CLI::ValidationError("--method",
                             "expected proj, lse, mle, var1, iar1 or iar2, got '" + text + "'");
}

/* ---- simulate ---- */

struct SimulateArgs {
  std::string setting;
  std::string a_text;
  std::string b_text;
  int m = 3;
  int n = 2;
  int T = 400;
  double rho = 0.5;
  int burn_in = 500;
  uint64_t seed = 1;
  std::string out;
  std::string manifest;
};

void run_simulate(const SimulateArgs& args) {
  ModelPtr model;
  if (!args.a_text.empty() || !args.b_text.empty()) {
    if (args.a_text.empty() || args.b_text.empty())
      throw CLI::ValidationError("--a", "--a and --b must be given together");
    int m = 0;
    int n = 0;
    const std::vector<double> a = parse_square_matrix(args.a_text, "--a", m);
    const std::vector<double> b = parse_square_matrix(args.b_text, "--b", n);
    markit_model* raw = nullptr;
    check(markit_model_new(m, n, a.data(), b.data(), &raw));
    model.reset(raw);
  } else {
    if (args.setting.empty())
      throw CLI::ValidationError("--setting", "give either --setting or explicit --a/--b");
    const int setting = parse_setting(args.setting);
    markit_model* raw = nullptr;
    check(markit_model_random(args.m, args.n, args.rho, args.seed + 1, &raw));
    model.reset(raw);
    check(markit_model_set_cov_random(model.get(), setting, args.seed + 2));
  }

  int stationary = 0;
  double rho_product = 0.0;
  check(markit_model_stationary(model.get(), &stationary, &rho_product));

  markit_series* raw_series = nullptr;
  check(markit_model_simulate(model.get(), args.T, args.burn_in, args.seed, &raw_series));
  SeriesPtr series(raw_series);
  check(markit_series_save_csv(series.get(), args.out.c_str()));

  int m = 0;
  int n = 0;
  check(markit_model_dims(model.get(), &m, &n));
  std::printf("simulated %dx%d series, T=%d, spectral radius product %s -> %s\n", m, n, args.T,
              f3(rho_product).c_str(), args.out.c_str());

  write_manifest(args.manifest, "simulate",
                 {{"setting", args.setting},
                  {"a", args.a_text},
                  {"b", args.b_text},
                  {"m", args.m},
                  {"n", args.n},
                  {"T", args.T},
                  {"rho", args.rho},
                  {"burn_in", args.burn_in},
                  {"seed", args.seed},
                  {"out", args.out}});
}

/* ---- fit ---- */

struct FitArgs {
  std::string data;
  std::string method = "lse";
  std::string preprocess;
  double level = 0.95;
  int max_iter = 0;
  double rel_tol = 0.0;
  std::string out;
  std::string kron_out;
  std::string manifest;
};

std::vector<CoefRow> var1_rows(const markit_var1* v, int mn, double z) {
  const size_t side = static_cast<size_t>(mn) * mn;
  std::vector<double> phi(side);
  check(markit_var1_get(v, phi.data(), nullptr, nullptr, nullptr));
  std::vector<double> cov(side * side);
  check(markit_var1_cov(v, cov.data()));
  std::vector<CoefRow> rows;
  rows.reserve(side);
  for (size_t k = 0; k < side; ++k) {
    CoefRow r;
    r.entry = entry_name("Phi", static_cast<int>(k) % mn + 1, static_cast<int>(k) / mn + 1);
    r.est = phi[k];
    r.se = std::sqrt(std::max(0.0, cov[k * side + k]));
    r.lo = r.est - z * r.se;
    r.hi = r.est + z * r.se;
    rows.push_back(std::move(r));
  }
  return rows;
}

void run_fit(const FitArgs& args) {
  SeriesPtr series = load_input(args.data, args.preprocess);
  int m = 0;
  int n = 0;
  int T = 0;
  check(markit_series_dims(series.get(), &m, &n, &T));
  const double z = z_for_level(args.level);

  std::vector<CoefRow> rows;
  std::vector<CoefRow> kron_rows;
  if (args.method == "var1") {
    markit_var1* raw = nullptr;
    check(markit_var1_fit(series.get(), &raw));
    Var1Ptr v(raw);
    int t_eff = 0;
    check(markit_var1_get(v.get(), nullptr, nullptr, nullptr, &t_eff));
    rows = var1_rows(v.get(), m * n, z);
    std::printf("method=var1 T=%d t_eff=%d level=%s\n", T, t_eff, f3(args.level).c_str());
  } else {
    const markit_method method = parse_method(args.method);
    markit_fit* raw_fit = nullptr;
    check(markit_estimate(series.get(), method, args.max_iter, args.rel_tol, &raw_fit));
    FitPtr fit(raw_fit);
    markit_acov* raw_acov = nullptr;
    check(markit_acov_compute(fit.get(), series.get(), nullptr, &raw_acov));
    AcovPtr acov(raw_acov);
    markit_ci* raw_ci = nullptr;
    check(markit_confidence_intervals(fit.get(), acov.get(), args.level, &raw_ci));
    CiPtr ci(raw_ci);

    int layout = 0;
    check(markit_acov_layout(acov.get(), &layout));
    int stacked_dim = 0;
    int kron_dim = 0;
    check(markit_ci_dims(ci.get(), &stacked_dim, &kron_dim));
    std::vector<double> est(static_cast<size_t>(stacked_dim));
    std::vector<double> lo(est.size());
    std::vector<double> hi(est.size());
    check(markit_ci_stacked(ci.get(), est.data(), lo.data(), hi.data()));
    for (int k = 0; k < stacked_dim; ++k) {
      CoefRow r;
      r.entry = stacked_entry_name(k, m, n, layout);
      r.est = est[static_cast<size_t>(k)];
      r.lo = lo[static_cast<size_t>(k)];
      r.hi = hi[static_cast<size_t>(k)];
      r.se = (r.hi - r.est) / z;
      rows.push_back(std::move(r));
    }

    if (!args.kron_out.empty()) {
      std::vector<double> kest(static_cast<size_t>(kron_dim));
      std::vector<double> klo(kest.size());
      std::vector<double> khi(kest.size());
      check(markit_ci_kron(ci.get(), kest.data(), klo.data(), khi.data()));
      for (int k = 0; k < kron_dim; ++k) {
        CoefRow r;
        r.entry = entry_name("AB", k % (m * n) + 1, k / (m * n) + 1);
        r.est = kest[static_cast<size_t>(k)];
        r.lo = klo[static_cast<size_t>(k)];
        r.hi = khi[static_cast<size_t>(k)];
        r.se = (r.hi - r.est) / z;
        kron_rows.push_back(std::move(r));
      }
    }

    int iterations = 0;
    int converged = 0;
    int ridge_events = 0;
    int stationary = 0;
    check(markit_fit_info(fit.get(), &iterations, &converged, &ridge_events, &stationary));
    double rss = 0.0;
    check(markit_fit_rss(fit.get(), &rss));
    std::printf("method=%s T=%d iterations=%d converged=%s stationary=%s rss=%s level=%s\n",
                args.method.c_str(), T, iterations, converged ? "yes" : "no",
                stationary ? "yes" : "no", f3(rss).c_str(), f3(args.level).c_str());
  }

  print_coef_table(rows);
  if (!args.out.empty()) write_coef_csv(args.out, rows);
  if (!kron_rows.empty()) write_coef_csv(args.kron_out, kron_rows);

  write_manifest(args.manifest, "fit",
                 {{"data", args.data},
                  {"method", args.method},
                  {"preprocess", args.preprocess},
                  {"level", args.level},
                  {"max_iter", args.max_iter},
                  {"rel_tol", args.rel_tol},
                  {"out", args.out},
                  {"kron_out", args.kron_out}});
}

/* ---- test ---- */

struct TestArgs {
  std::string data;
  std::string preprocess;
  std::string out;
  std::string manifest;
};

void run_test(const TestArgs& args) {
  SeriesPtr series = load_input(args.data, args.preprocess);
  double statistic = 0.0;
  int df = 0;
  double p_value = 0.0;
  int rank_warning = 0;
  check(markit_spec_test(series.get(), &statistic, &df, &p_value, &rank_warning));
  std::printf("statistic=%s df=%d p_value=%s%s\n", f3(statistic).c_str(), df,
              f3(p_value).c_str(), rank_warning ? " (rank warning)" : "");
  if (!args.out.empty()) {
    std::ofstream out = open_out(args.out);
    out << "stat,value\n";
    out << "statistic," << g17(statistic) << '\n';
    out << "df," << df << '\n';
    out << "p_value," << g17(p_value) << '\n';
    out << "rank_warning," << rank_warning << '\n';
    if (!out) throw CliFailure{"failed while writing: " + args.out};
  }
  write_manifest(args.manifest, "test",
                 {{"data", args.data}, {"preprocess", args.preprocess}, {"out", args.out}});
}

/* ---- irf ---- */

struct IrfArgs {
  std::string data;
  std::string method = "mle";
  std::string preprocess;
  std::string shock;
  int horizon = 12;
  std::string out;
  std::string manifest;
};

void run_irf(const IrfArgs& args) {
  int si = 0;
  int sj = 0;
  if (std::sscanf(args.shock.c_str(), "%d,%d", &si, &sj) != 2)
    throw CLI::ValidationError("--shock", "expected row,col such as 2,1");

  SeriesPtr series = load_input(args.data, args.preprocess);
  const markit_method method = parse_method(args.method);
  markit_fit* raw_fit = nullptr;
  check(markit_estimate(series.get(), method, 0, 0.0, &raw_fit));
  FitPtr fit(raw_fit);
  markit_model* raw_model = nullptr;
  check(markit_fit_model(fit.get(), &raw_model));
  ModelPtr model(raw_model);
  int m = 0;
  int n = 0;
  check(markit_model_dims(model.get(), &m, &n));

  markit_irf* raw_irf = nullptr;
  check(markit_irf_compute(model.get(), si, sj, args.horizon, &raw_irf));
  IrfPtr irf(raw_irf);
  int horizon = 0;
  int factored = 0;
  check(markit_irf_info(irf.get(), &horizon, &factored));

  std::printf("shock=(%d,%d) horizon=%d method=%s factored=%s\n", si, sj, horizon,
              args.method.c_str(), factored ? "yes" : "no");
  std::vector<double> resp(static_cast<size_t>(m) * n);
  std::vector<double> acc(resp.size());
  if (!args.out.empty()) {
    std::ofstream out = open_out(args.out);
    out << "lag,row,col,response,accumulated\n";
    for (int k = 0; k <= horizon; ++k) {
      check(markit_irf_response(irf.get(), k, resp.data()));
      check(markit_irf_accumulated(irf.get(), k, acc.data()));
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          out << k << ',' << (i + 1) << ',' << (j + 1) << ','
              << g17(resp[static_cast<size_t>(j) * m + i]) << ','
              << g17(acc[static_cast<size_t>(j) * m + i]) << '\n';
    }
    if (!out) throw CliFailure{"failed while writing: " + args.out};
  }
  for (int k = 0; k <= std::min(horizon, 5); ++k) {
    check(markit_irf_response(irf.get(), k, resp.data()));
    std::printf("lag %d:", k);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i)
        std::printf(" %s", f3(resp[static_cast<size_t>(j) * m + i]).c_str());
    std::printf("\n");
  }
  if (factored) {
    std::vector<double> row_resp(static_cast<size_t>(m));
    std::vector<double> col_resp(static_cast<size_t>(n));
    std::printf("factored row/col responses:\n");
    for (int k = 0; k <= std::min(horizon, 5); ++k) {
      check(markit_irf_factors(irf.get(), k, row_resp.data(), col_resp.data()));
      std::printf("lag %d: rows", k);
      for (int i = 0; i < m; ++i) std::printf(" %s", f3(row_resp[static_cast<size_t>(i)]).c_str());
      std::printf(" | cols");
      for (int j = 0; j < n; ++j) std::printf(" %s", f3(col_resp[static_cast<size_t>(j)]).c_str());
      std::printf("\n");
    }
  }

  write_manifest(args.manifest, "irf",
                 {{"data", args.data},
                  {"method", args.method},
                  {"preprocess", args.preprocess},
                  {"shock", args.shock},
                  {"horizon", args.horizon},
                  {"out", args.out}});
}

/* ---- forecast ---- */

struct ForecastArgs {
  std::string data;
  std::string method = "lse";
  std::string preprocess;
  int start = 0;
  bool refit = true;
  std::string out;
  std::string manifest;
};

void run_forecast(const ForecastArgs& args) {
  SeriesPtr series = load_input(args.data, args.preprocess);
  const markit_fc_method method = parse_fc_method(args.method);
  markit_forecast* raw = nullptr;
  check(markit_rolling_forecast(series.get(), args.start, method, args.refit ? 1 : 0, &raw));
  ForecastPtr fc(raw);
  int steps = 0;
  double total = 0.0;
  check(markit_forecast_info(fc.get(), &steps, &total));
  std::printf("method=%s start=%d steps=%d total_sqerr=%s mean_sqerr=%s\n", args.method.c_str(),
              args.start, steps, f3(total).c_str(),
              f3(steps > 0 ? total / steps : 0.0).c_str());
  if (!args.out.empty()) {
    std::ofstream out = open_out(args.out);
    out << "t,sqerr\n";
    for (int k = 0; k < steps; ++k) {
      double sqerr = 0.0;
      check(markit_forecast_step(fc.get(), k, &sqerr, nullptr));
      out << (args.start + k) << ',' << g17(sqerr) << '\n';
    }
    if (!out) throw CliFailure{"failed while writing: " + args.out};
  }
  write_manifest(args.manifest, "forecast",
                 {{"data", args.data},
                  {"method", args.method},
                  {"preprocess", args.preprocess},
                  {"start", args.start},
                  {"refit", args.refit},
                  {"out", args.out}});
}

/* ---- experiment ---- */

struct ExperimentArgs {
  std::string kind;
  std::string setting = "I";
  int m = 3;
  int n = 2;
  std::vector<int> Ts;
  int reps = 100;
  double level = 0.95;
  std::vector<double> etas;
  uint64_t seed = 1;
  std::string out;
  std::string manifest;
};

void run_experiment(const ExperimentArgs& args) {
  TablePtr table;
  if (args.kind == "compare") {
    if (args.Ts.empty()) throw CLI::ValidationError("--T", "compare needs at least one --T");
    markit_table* raw = nullptr;
    check(markit_experiment_compare(args.m, args.n, parse_setting(args.setting), args.Ts.data(),
                                    static_cast<int>(args.Ts.size()), args.reps, args.seed,
                                    &raw));
    table.reset(raw);
  } else if (args.kind == "coverage") {
    if (args.Ts.size() != 1)
      throw CLI::ValidationError("--T", "coverage needs exactly one --T");
    markit_table* raw = nullptr;
    check(markit_experiment_coverage(args.m, args.n, parse_setting(args.setting), args.Ts[0],
                                     args.reps, args.level, args.seed, &raw));
    table.reset(raw);
  } else if (args.kind == "power") {
    if (args.Ts.size() != 1) throw CLI::ValidationError("--T", "power needs exactly one --T");
    if (args.etas.empty())
      throw CLI::ValidationError("--eta", "power needs at least one --eta");
    markit_table* raw = nullptr;
    check(markit_experiment_power(args.m, args.n, args.Ts[0], args.etas.data(),
                                  static_cast<int>(args.etas.size()), args.reps, args.level,
                                  args.seed, &raw));
    table.reset(raw);
  } else {
    throw CLI::ValidationError("kind", "expected compare, coverage or power, got '" +
                                           args.kind + "'");
  }

  int n_rows = 0;
  check(markit_table_rows(table.get(), &n_rows));
  std::printf("%-8s %-10s %6s %-24s %12s\n", "setting", "method", "T", "stat", "value");
  for (int i = 0; i < n_rows; ++i) {
    const char* setting = nullptr;
    const char* method = nullptr;
    int T = 0;
    const char* stat = nullptr;
    double value = 0.0;
    check(markit_table_row(table.get(), i, &setting, &method, &T, &stat, &value));
    std::printf("%-8s %-10s %6d %-24s %12s\n", setting, method, T, stat, f3(value).c_str());
  }
  if (!args.out.empty()) {
    std::ofstream out = open_out(args.out);
    out << "setting,method,T,stat,value\n";
    for (int i = 0; i < n_rows; ++i) {
      const char* setting = nullptr;
      const char* method = nullptr;
      int T = 0;
      const char* stat = nullptr;
      double value = 0.0;
      check(markit_table_row(table.get(), i, &setting, &method, &T, &stat, &value));
      out << setting << ',' << method << ',' << T << ',' << stat << ',' << g17(value) << '\n';
    }
    if (!out) throw CliFailure{"failed while writing: " + args.out};
  }

  write_manifest(args.manifest, "experiment",
                 {{"kind", args.kind},
                  {"setting", args.setting},
                  {"m", args.m},
                  {"n", args.n},
                  {"T", args.Ts},
                  {"reps", args.reps},
                  {"level", args.level},
                  {"eta", args.etas},
                  {"seed", args.seed},
                  {"out", args.out}});
}

}  // namespace

int markit_cli_main(int argc, const char* const* argv) {
  CLI::App app{"matrix autoregression toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read option defaults from a key=value file");

  auto sim = std::make_shared<SimulateArgs>();
  CLI::App* sim_cmd = app.add_subcommand("simulate", "simulate a bilinear autoregression");
  sim_cmd->add_option("--setting", sim->setting, "noise setting I, II or III");
  sim_cmd->add_option("--a", sim->a_text, "explicit row coefficient matrix, rows ';' separated");
  sim_cmd->add_option("--b", sim->b_text, "explicit column coefficient matrix");
  sim_cmd->add_option("--m", sim->m, "matrix rows")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--n", sim->n, "matrix columns")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--T", sim->T, "observations")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--rho", sim->rho, "target spectral radius product");
  sim_cmd->add_option("--burn-in", sim->burn_in, "burn-in steps");
  sim_cmd->add_option("--seed", sim->seed, "random seed");
  sim_cmd->add_option("--out", sim->out, "output series CSV")->required();
  sim_cmd->add_option("--manifest", sim->manifest, "write a JSON run manifest");
  sim_cmd->callback([sim] { run_simulate(*sim); });

  auto fit = std::make_shared<FitArgs>();
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit coefficients with confidence intervals");
  fit_cmd->add_option("data", fit->data, "input series CSV")->required();
  fit_cmd->add_option("--method", fit->method, "proj, lse, mle or var1");
  fit_cmd->add_option("--preprocess", fit->preprocess, "comma separated preprocessing steps");
  fit_cmd->add_option("--level", fit->level, "confidence level");
  fit_cmd->add_option("--max-iter", fit->max_iter, "iteration cap (0 = default)");
  fit_cmd->add_option("--rel-tol", fit->rel_tol, "relative tolerance (0 = default)");
  fit_cmd->add_option("--out", fit->out, "coefficient table CSV");
  fit_cmd->add_option("--kron-out", fit->kron_out, "product coefficient table CSV");
  fit_cmd->add_option("--manifest", fit->manifest, "write a JSON run manifest");
  fit_cmd->callback([fit] { run_fit(*fit); });

  auto tst = std::make_shared<TestArgs>();
  CLI::App* tst_cmd = app.add_subcommand("test", "bilinear structure specification test");
  tst_cmd->add_option("data", tst->data, "input series CSV")->required();
  tst_cmd->add_option("--preprocess", tst->preprocess, "comma separated preprocessing steps");
  tst_cmd->add_option("--out", tst->out, "result CSV");
  tst_cmd->add_option("--manifest", tst->manifest, "write a JSON run manifest");
  tst_cmd->callback([tst] { run_test(*tst); });

  auto irf = std::make_shared<IrfArgs>();
  CLI::App* irf_cmd = app.add_subcommand("irf", "orthogonalized single-entry impulse responses");
  irf_cmd->add_option("data", irf->data, "input series CSV")->required();
  irf_cmd->add_option("--method", irf->method, "fitting method: proj, lse or mle");
  irf_cmd->add_option("--preprocess", irf->preprocess, "comma separated preprocessing steps");
  irf_cmd->add_option("--shock", irf->shock, "shocked entry as row,col")->required();
  irf_cmd->add_option("--horizon", irf->horizon, "number of lags")->check(CLI::PositiveNumber);
  irf_cmd->add_option("--out", irf->out, "response table CSV");
  irf_cmd->add_option("--manifest", irf->manifest, "write a JSON run manifest");
  irf_cmd->callback([irf] { run_irf(*irf); });

  auto fc = std::make_shared<ForecastArgs>();
  CLI::App* fc_cmd = app.add_subcommand("forecast", "rolling one-step-ahead evaluation");
  fc_cmd->add_option("data", fc->data, "input series CSV")->required();
  fc_cmd->add_option("--method", fc->method, "proj, lse, mle, var1, iar1 or iar2");
  fc_cmd->add_option("--preprocess", fc->preprocess, "comma separated preprocessing steps");
  fc_cmd->add_option("--start", fc->start, "first forecast target (1-based)")->required();
  fc_cmd->add_flag("--refit,!--no-refit", fc->refit, "refit at every step (default on)");
  fc_cmd->add_option("--out", fc->out, "per-step squared error CSV");
  fc_cmd->add_option("--manifest", fc->manifest, "write a JSON run manifest");
  fc_cmd->callback([fc] { run_forecast(*fc); });

  auto exp = std::make_shared<ExperimentArgs>();
  CLI::App* exp_cmd = app.add_subcommand("experiment", "simulation studies");
  exp_cmd->add_option("kind", exp->kind, "compare, coverage or power")->required();
  exp_cmd->add_option("--setting", exp->setting, "noise setting I, II or III");
  exp_cmd->add_option("--m", exp->m, "matrix rows")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--n", exp->n, "matrix columns")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--T", exp->Ts, "sample sizes (repeatable)");
  exp_cmd->add_option("--reps", exp->reps, "replications")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--level", exp->level, "confidence / test level");
  exp_cmd->add_option("--eta", exp->etas, "departure strengths for power (repeatable)");
  exp_cmd->add_option("--seed", exp->seed, "random seed");
  exp_cmd->add_option("--out", exp->out, "summary table CSV");
  exp_cmd->add_option("--manifest", exp->manifest, "write a JSON run manifest");
  exp_cmd->callback([exp] { run_experiment(*exp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << "\n";
    return 1;
  }
  return 0;
}
