#include "markit/experiment.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "markit/estimators.hpp"
#include "markit/inference.hpp"
#include "markit/io.hpp"
#include "markit/kron.hpp"
#include "markit/model.hpp"

namespace markit {

int experiment_threads() {
  if (const char* env = std::getenv("MAR_KIT_THREADS")) {
    int v = 0;
    const char* end = env;
    while (*end) ++end;
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec == std::errc() && ptr == end && v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? static_cast<int>(hw) : 1;
}

namespace {

void run_parallel(int count, const std::function<void(int)>& body) {
  const int nt = std::min(experiment_threads(), count);
  if (nt <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nt));
  for (int w = 0; w < nt; ++w) {
    pool.emplace_back([&] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

const char* setting_name(int setting) {
  switch (setting) {
    case 1: return "I";
    case 2: return "II";
    case 3: return "III";
  }
  throw PreconditionError("experiment: setting must be 1, 2, or 3");
}

// linear interpolation between order statistics on a sorted sample
double quantile_sorted(const std::vector<double>& v, double p) {
  const double idx = p * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(idx);
  const size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = idx - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

void push_summary(std::vector<ExperimentRow>& rows, const std::string& setting,
                  const std::string& method, int T, std::vector<double> values) {
  rows.push_back({setting, method, T, "reps_used", static_cast<double>(values.size())});
  if (values.empty()) return;
  std::sort(values.begin(), values.end());
  const std::pair<const char*, double> qs[] = {
      {"min", 0.0}, {"q25", 0.25}, {"median", 0.5}, {"q75", 0.75}, {"max", 1.0}};
  for (const auto& [name, p] : qs)
    rows.push_back({setting, method, T, name, quantile_sorted(values, p)});
  double mean = 0.0;
  for (const double v : values) mean += v;
  rows.push_back({setting, method, T, "mean", mean / static_cast<double>(values.size())});
}

MarModel draw_experiment_model(int m, int n, int setting, std::uint64_t seed) {
  MarModel model = random_model(m, n, 0.5, mix_seed(seed, 1));
  model.cov = random_covariance(setting, m, n, mix_seed(seed, 2));
  return model;
}

std::string fmt_eta(double eta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", eta);
  return buf;
}

}  // namespace

std::vector<ExperimentRow> experiment_compare(int m, int n, int setting,
                                              const std::vector<int>& Ts, int reps,
                                              std::uint64_t seed) {
  if (Ts.empty()) throw PreconditionError("experiment_compare: no sample sizes given");
  if (reps < 1) throw PreconditionError("experiment_compare: reps must be >= 1");
  const std::string sname = setting_name(setting);
  const MarModel model = draw_experiment_model(m, n, setting, seed);
  const Matrix k_true = kron(model.b, model.a);

  constexpr int kMethods = 4;  // proj, lse, mle, var1
  const char* method_names[kMethods] = {"proj", "lse", "mle", "var1"};

  std::vector<ExperimentRow> rows;
  for (const int T : Ts) {
    if (T < m * n + 2)
      throw PreconditionError("experiment_compare: T too small for the VAR baseline");
    std::vector<std::array<double, kMethods>> err(static_cast<size_t>(reps));
    std::vector<std::array<char, kMethods>> ok(static_cast<size_t>(reps));
    run_parallel(reps, [&](int r) {
      const MatrixSeries s = simulate(model, T, seed + static_cast<std::uint64_t>(r) + 1);
      for (int mi = 0; mi < kMethods; ++mi) {
        try {
          Matrix k_hat;
          switch (mi) {
            case 0: {
              const MarFit f = fit_proj(s);
              k_hat = kron(f.model.b, f.model.a);
              break;
            }
            case 1: {
              const MarFit f = fit_lse(s);
              k_hat = kron(f.model.b, f.model.a);
              break;
            }
            case 2: {
              const MarFit f = fit_mle(s);
              k_hat = kron(f.model.b, f.model.a);
              break;
            }
            case 3: k_hat = fit_var1(s).phi; break;
          }
          err[static_cast<size_t>(r)][static_cast<size_t>(mi)] =
              (k_hat - k_true).squaredNorm();
          ok[static_cast<size_t>(r)][static_cast<size_t>(mi)] = 1;
        } catch (const std::exception&) {
          ok[static_cast<size_t>(r)][static_cast<size_t>(mi)] = 0;
        }
      }
    });
    for (int mi = 0; mi < kMethods; ++mi) {
      std::vector<double> values;
      values.reserve(static_cast<size_t>(reps));
      for (int r = 0; r < reps; ++r)
        if (ok[static_cast<size_t>(r)][static_cast<size_t>(mi)])
          values.push_back(err[static_cast<size_t>(r)][static_cast<size_t>(mi)]);
      push_summary(rows, sname, method_names[mi], T, std::move(values));
    }
  }
  return rows;
}

namespace {

struct CoverageSlot {
  double stacked = 0.0;
  double kron_v = 0.0;
  char ok = 0;
};

double fraction_covered(const Vector& truth, const Vector& lower, const Vector& upper) {
  int covered = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i)
    if (lower(i) <= truth(i) && truth(i) <= upper(i)) ++covered;
  return static_cast<double>(covered) / static_cast<double>(truth.size());
}

}  // namespace

std::vector<ExperimentRow> experiment_coverage(int m, int n, int setting, int T, int reps,
                                               double level, std::uint64_t seed) {
  if (reps < 1) throw PreconditionError("experiment_coverage: reps must be >= 1");
  if (!(level > 0.0 && level < 1.0))
    throw PreconditionError("experiment_coverage: level must be in (0, 1)");
  const std::string sname = setting_name(setting);
  const MarModel model = draw_experiment_model(m, n, setting, seed);

  const Eigen::Index m2 = static_cast<Eigen::Index>(m) * m;
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  const Vector alpha = vec(model.a);
  const Vector beta_plain = vec(model.b);
  const Vector beta_t = vec(Matrix(model.b.transpose()));
  Vector truth_proj(m2 + n2), truth_iter(m2 + n2);
  truth_proj << alpha, beta_plain;
  truth_iter << alpha, beta_t;
  const Vector truth_kron_proj = kron(Matrix(beta_plain), Matrix(alpha));
  const Vector truth_kron_iter = kron(Matrix(beta_t), Matrix(alpha));

  constexpr int kMethods = 3;  // proj, lse, mle
  const char* method_names[kMethods] = {"proj", "lse", "mle"};
  std::vector<std::array<CoverageSlot, kMethods>> slots(static_cast<size_t>(reps));

  run_parallel(reps, [&](int r) {
    const MatrixSeries s = simulate(model, T, seed + static_cast<std::uint64_t>(r) + 1);
    for (int mi = 0; mi < kMethods; ++mi) {
      try {
        MarFit fit;
        AsymptoticCovariance cov;
        switch (mi) {
          case 0:
            fit = fit_proj(s);
            cov = asymp_cov_proj(fit, fit_var1(s));
            break;
          case 1:
            fit = fit_lse(s);
            cov = asymp_cov_lse(fit, s);
            break;
          case 2:
            fit = fit_mle(s);
            cov = asymp_cov_mle(fit, s);
            break;
        }
        const ConfidenceIntervals ci = confidence_intervals(fit, cov, level);
        CoverageSlot& slot = slots[static_cast<size_t>(r)][static_cast<size_t>(mi)];
        const bool proj = mi == 0;
        slot.stacked = fraction_covered(proj ? truth_proj : truth_iter, ci.stacked_lower,
                                        ci.stacked_upper);
        slot.kron_v = fraction_covered(proj ? truth_kron_proj : truth_kron_iter,
                                       ci.kron_lower, ci.kron_upper);
        slot.ok = 1;
      } catch (const std::exception&) {
        slots[static_cast<size_t>(r)][static_cast<size_t>(mi)].ok = 0;
      }
    }
  });

  std::vector<ExperimentRow> rows;
  for (int mi = 0; mi < kMethods; ++mi) {
    double sum_stacked = 0.0, sum_kron = 0.0;
    int used = 0;
    for (int r = 0; r < reps; ++r) {
      const CoverageSlot& slot = slots[static_cast<size_t>(r)][static_cast<size_t>(mi)];
      if (!slot.ok) continue;
      sum_stacked += slot.stacked;
      sum_kron += slot.kron_v;
      ++used;
    }
    rows.push_back({sname, method_names[mi], T, "reps_used", static_cast<double>(used)});
    if (used > 0) {
      rows.push_back({sname, method_names[mi], T, "coverage_stacked", sum_stacked / used});
      rows.push_back({sname, method_names[mi], T, "coverage_kron", sum_kron / used});
    }
  }
  return rows;
}

std::vector<ExperimentRow> experiment_power(int m, int n, int T, const std::vector<double>& etas,
                                            int reps, double level, std::uint64_t seed) {
  if (etas.empty()) throw PreconditionError("experiment_power: no eta values given");
  for (const double eta : etas)
    if (!(eta >= 0.0 && eta < 1.0))
      throw PreconditionError("experiment_power: eta must be in [0, 1)");
  if (reps < 1) throw PreconditionError("experiment_power: reps must be >= 1");
  if (!(level > 0.0 && level < 1.0))
    throw PreconditionError("experiment_power: level must be in (0, 1)");
  if (m < 2 || n < 2)
    throw PreconditionError("experiment_power: the specification test needs m, n >= 2");

  // Mixture coefficients: all four factors at spectral radius 1, redrawn
  // until the combined transition matrix is comfortably stable at every eta.
  std::mt19937_64 gen(mix_seed(seed, 1));
  std::normal_distribution<double> nd(0.0, 1.0);
  const auto draw_unit_radius = [&](int d) {
    for (int attempt = 0; attempt < 256; ++attempt) {
      Matrix z(d, d);
      for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i) z(i, j) = nd(gen);
      const double rho = spectral_radius(z);
      if (rho > 0.0) return Matrix(z / rho);
    }
    throw NumericError("experiment_power: could not draw a nonzero matrix");
  };
  Matrix a1, b1, a2, b2;
  bool stable = false;
  for (int attempt = 0; attempt < 256 && !stable; ++attempt) {
    a1 = draw_unit_radius(m);
    b1 = draw_unit_radius(n);
    a2 = draw_unit_radius(m);
    b2 = draw_unit_radius(n);
    const Matrix k1 = 0.5 * kron(b1, a1);
    const Matrix k2 = 0.5 * kron(b2, a2);
    stable = true;
    for (const double eta : etas)
      if (spectral_radius(k1 + eta * k2) >= 0.98) {
        stable = false;
        break;
      }
  }
  if (!stable)
    throw NumericError("experiment_power: no stable coefficient draw after 256 attempts");

  const double alpha_level = 1.0 - level;
  const Matrix b1t = b1.transpose(), b2t = b2.transpose();
  constexpr int kBurnIn = 500;

  std::vector<ExperimentRow> rows;
  for (const double eta : etas) {
    std::vector<char> reject(static_cast<size_t>(reps), 0);
    std::vector<char> ok(static_cast<size_t>(reps), 0);
    run_parallel(reps, [&](int r) {
      std::mt19937_64 sim_gen(seed + static_cast<std::uint64_t>(r) + 1);
      std::normal_distribution<double> sim_nd(0.0, 1.0);
      MatrixSeries s = MatrixSeries::create(m, n, T);
      Matrix x = Matrix::Zero(m, n);
      Matrix e(m, n);
      for (int step = 0; step < kBurnIn + T; ++step) {
        for (Eigen::Index j = 0; j < n; ++j)
          for (Eigen::Index i = 0; i < m; ++i) e(i, j) = sim_nd(sim_gen);
        x = 0.5 * a1 * x * b1t + (0.5 * eta) * a2 * x * b2t + e;
        if (step >= kBurnIn) s.x[static_cast<size_t>(step - kBurnIn)] = x;
      }
      try {
        const SpecTestResult res = specification_test(s);
        reject[static_cast<size_t>(r)] = res.p_value < alpha_level ? 1 : 0;
        ok[static_cast<size_t>(r)] = 1;
      } catch (const std::exception&) {
        ok[static_cast<size_t>(r)] = 0;
      }
    });
    int used = 0, rejected = 0;
    for (int r = 0; r < reps; ++r) {
      if (!ok[static_cast<size_t>(r)]) continue;
      ++used;
      rejected += reject[static_cast<size_t>(r)];
    }
    const std::string tag = fmt_eta(eta);
    rows.push_back({"I", "spec_test", T, "reps_used_eta_" + tag, static_cast<double>(used)});
    if (used > 0)
      rows.push_back({"I", "spec_test", T, "reject_eta_" + tag,
                      static_cast<double>(rejected) / static_cast<double>(used)});
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = "setting,method,T,stat,value\n";
  for (const ExperimentRow& row : rows) {
    out += row.setting;
    out += ',';
    out += row.method;
    out += ',';
    out += std::to_string(row.T);
    out += ',';
    out += row.stat;
    out += ',';
    out += format_g17(row.value);
    out += '\n';
  }
  return out;
}

}  // namespace markit
