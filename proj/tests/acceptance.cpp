// Acceptance suite: one self-timed criterion per section, a PASS/FAIL line
// each, nonzero exit if anything fails. Tolerances are pinned in the
// constants below and printed alongside the verdicts.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cli_app.hpp"
#include "markit/estimators.hpp"
#include "markit/experiment.hpp"
#include "markit/forecast.hpp"
#include "markit/inference.hpp"
#include "markit/io.hpp"
#include "markit/kron.hpp"
#include "markit/model.hpp"

using markit::MarFit;
using markit::MarModel;
using markit::Matrix;
using markit::MatrixSeries;
using markit::Vector;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Matrix random_mat(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = nd(rng);
  return m;
}

double find_value(const std::vector<markit::ExperimentRow>& rows, const std::string& method,
                  int T, const std::string& stat) {
  for (const auto& row : rows)
    if (row.method == method && row.T == T && row.stat == stat) return row.value;
  throw std::runtime_error("missing experiment row " + method + "/" + stat);
}

/* ---- criterion 1: Kronecker algebra property suite ---- */

Verdict criterion1() {
  constexpr double kTol = 1e-10;
  constexpr int kCases = 200;
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> dim(1, 4);
  double worst = 0.0;
  const auto track = [&](double v) { worst = std::max(worst, v); };

  for (int c = 0; c < kCases; ++c) {
    const int p = dim(rng), q = dim(rng), r = dim(rng), s = dim(rng);
    const Matrix C = random_mat(rng, p, q);
    const Matrix D = random_mat(rng, r, s);

    // (i) transpose distributes over the product
    track((markit::kron(C, D).transpose() -
           markit::kron(Matrix(C.transpose()), Matrix(D.transpose())))
              .cwiseAbs()
              .maxCoeff());

    // (ii) bilinearity
    const Matrix C2 = random_mat(rng, p, q);
    track((markit::kron(Matrix(C + C2), D) - markit::kron(C, D) - markit::kron(C2, D))
              .cwiseAbs()
              .maxCoeff());

    // (iii) mixed product
    const int u = dim(rng), v = dim(rng);
    const Matrix F = random_mat(rng, q, u);
    const Matrix G = random_mat(rng, s, v);
    track((markit::kron(C, D) * markit::kron(F, G) - markit::kron(Matrix(C * F), Matrix(D * G)))
              .cwiseAbs()
              .maxCoeff());

    // (iv) vec of a sandwich
    const Matrix Z = random_mat(rng, q, s);
    track((markit::vec(Matrix(C * Z * D.transpose())) -
           markit::kron(D, C) * markit::vec(Z))
              .cwiseAbs()
              .maxCoeff());

    // (v) inverse of a Kronecker product (well-conditioned square factors)
    const Matrix Ci = random_mat(rng, p, p) + 3.0 * Matrix::Identity(p, p);
    const Matrix Di = random_mat(rng, r, r) + 3.0 * Matrix::Identity(r, r);
    track((markit::kron(Ci, Di).inverse() -
           markit::kron(Matrix(Ci.inverse()), Matrix(Di.inverse())))
              .cwiseAbs()
              .maxCoeff());

    // (vi) spectral radius multiplies
    track(std::abs(markit::spectral_radius(markit::kron(Ci, Di)) -
                   markit::spectral_radius(Ci) * markit::spectral_radius(Di)));

    // rearrangement: defining identity, norm preservation, linearity
    const Matrix A = random_mat(rng, p, p);
    const Matrix B = random_mat(rng, r, r);
    const Matrix K = markit::kron(B, A);
    track((markit::rearrange(K, p, r) - markit::vec(A) * markit::vec(B).transpose())
              .cwiseAbs()
              .maxCoeff());
    const Matrix M1 = random_mat(rng, p * r, p * r);
    const Matrix M2 = random_mat(rng, p * r, p * r);
    track(std::abs(markit::rearrange(M1, p, r).norm() - M1.norm()));
    track((markit::rearrange(Matrix(2.5 * M1 - M2), p, r) -
           (2.5 * markit::rearrange(M1, p, r) - markit::rearrange(M2, p, r)))
              .cwiseAbs()
              .maxCoeff());
  }

  Verdict v;
  v.note("max violation " + fmt(worst) + " (tol " + fmt(1e-10) + ")");
  if (!(worst < kTol)) v.fail("violation above tolerance");
  return v;
}

/* ---- criterion 2: exact recovery ---- */

MatrixSeries noise_free_series(const MarModel& model, int T, std::mt19937_64& rng) {
  MatrixSeries s = MatrixSeries::create(model.m(), model.n(), T);
  Matrix x = random_mat(rng, model.m(), model.n());
  for (int t = 0; t < T; ++t) {
    s.x[static_cast<size_t>(t)] = x;
    x = model.a * x * model.b.transpose();
  }
  return s;
}

// A noise-free trajectory is a Krylov sequence of a single vector, so the
// transition eigenvalues must neither decay apart in magnitude nor collide,
// or the design degenerates numerically. Rotation-like factors put every
// eigenvalue on one circle at well-separated angles.
Matrix rotation_factor(std::mt19937_64& rng, int d, double angle) {
  Matrix block = Matrix::Identity(d, d);
  block(0, 0) = std::cos(angle);
  block(0, 1) = -std::sin(angle);
  block(1, 0) = std::sin(angle);
  block(1, 1) = std::cos(angle);
  const Eigen::HouseholderQR<Matrix> qr(random_mat(rng, d, d));
  const Matrix q = qr.householderQ();
  return q * block * q.transpose();
}

MarModel orbit_model(std::mt19937_64& rng, int m, int n, double rho) {
  MarModel model;
  model.a = rotation_factor(rng, m, 2.0 * M_PI / 5.0);
  model.b = rotation_factor(rng, n, 2.0 * M_PI / 7.0) * rho;
  return model;
}

Verdict criterion2() {
  Verdict v;
  std::mt19937_64 rng(2002);

  // NKP projection of exact Kronecker products.
  constexpr double kNkpTol = 1e-12;
  double worst_nkp = 0.0;
  std::uniform_int_distribution<int> dim(2, 4);
  for (int c = 0; c < 50; ++c) {
    const int m = dim(rng), n = dim(rng);
    Matrix A = random_mat(rng, m, m);
    A /= A.norm();
    const Matrix B = random_mat(rng, n, n);
    const Matrix phi = markit::kron(B, A);
    const markit::KronTermList terms = markit::nkp_project(phi, m, n, 1);
    const Matrix recon = markit::kron(terms.terms[0].b, terms.terms[0].a);
    worst_nkp = std::max(worst_nkp, (recon - phi).norm());
  }
  v.note("nkp " + fmt(worst_nkp));
  if (!(worst_nkp < kNkpTol)) v.fail("nkp reconstruction above " + fmt(kNkpTol));

  // Noise-free trajectories: every estimator recovers the transition exactly.
  constexpr double kVarTol = 1e-10;
  constexpr double kProjTol = 1e-8;
  constexpr double kLseObjTol = 1e-16;
  constexpr double kLseRecTol = 1e-8;
  double worst_var = 0.0, worst_proj = 0.0, worst_lse = 0.0, worst_obj = 0.0;
  markit::FitOptions from_identity;
  from_identity.init = markit::FitOptions::Init::Identity;
  from_identity.rel_tol = 1e-30;  // iterate until the objective hits its floating-point floor
  from_identity.max_iter = 2000;
  for (int c = 0; c < 20; ++c) {
    const MarModel model = orbit_model(rng, 3, 2, 0.9);
    const MatrixSeries s = noise_free_series(model, 12, rng);
    const Matrix truth = markit::kron(model.b, model.a);
    const Matrix k_var = markit::fit_var1(s).phi;
    const MarFit proj = markit::fit_proj(s);
    const MarFit lse = markit::fit_lse(s, from_identity);
    worst_var = std::max(worst_var, (k_var - truth).norm());
    worst_proj = std::max(worst_proj, (markit::kron(proj.model.b, proj.model.a) - truth).norm());
    worst_lse = std::max(worst_lse, (markit::kron(lse.model.b, lse.model.a) - truth).norm());
    worst_obj = std::max(worst_obj, lse.objective_trace.back());
  }
  v.note("recovery var1 " + fmt(worst_var) + ", proj " + fmt(worst_proj) + ", lse " +
         fmt(worst_lse) + ", obj " + fmt(worst_obj));
  if (!(worst_var < kVarTol)) v.fail("var1 noise-free recovery above " + fmt(kVarTol));
  if (!(worst_proj < kProjTol)) v.fail("proj noise-free recovery above " + fmt(kProjTol));
  if (!(worst_lse < kLseRecTol)) v.fail("lse noise-free recovery above " + fmt(kLseRecTol));
  if (!(worst_obj < kLseObjTol)) v.fail("lse noise-free objective above " + fmt(kLseObjTol));

  // LSE stationarity conditions: at a tight tolerance the alternating map
  // stops moving, so the blockwise updates reproduce the fit.
  constexpr double kGradTol = 1e-6;
  double worst_grad = 0.0;
  markit::FitOptions tight;
  tight.rel_tol = 1e-12;
  for (int c = 0; c < 5; ++c) {
    MarModel model = markit::random_model(3, 2, 0.5, 4000 + static_cast<uint64_t>(c));
    const MatrixSeries s = markit::simulate(model, 300, 4100 + static_cast<uint64_t>(c));
    const MarFit fit = markit::fit_lse(s, tight);
    const Matrix a_next = markit::detail::lse_update_a(s, fit.model.b);
    const Matrix b_next = markit::detail::lse_update_b(s, fit.model.a);
    worst_grad = std::max(worst_grad, (a_next - fit.model.a).norm() / fit.model.a.norm());
    worst_grad = std::max(worst_grad, (b_next - fit.model.b).norm() / fit.model.b.norm());
  }
  v.note("lse fixed point " + fmt(worst_grad));
  if (!(worst_grad < kGradTol)) v.fail("lse gradient residual above " + fmt(kGradTol));
  return v;
}

/* ---- criterion 3: estimator ordering across settings ---- */

Verdict criterion3() {
  Verdict v;
  const std::vector<int> Ts = {400, 2000};
  for (int setting = 1; setting <= 3; ++setting) {
    const std::vector<markit::ExperimentRow> rows =
        markit::experiment_compare(3, 2, setting, Ts, 100, 1000 + static_cast<uint64_t>(setting));
    for (const int T : Ts) {
      const double med_proj = find_value(rows, "proj", T, "median");
      const double med_lse = find_value(rows, "lse", T, "median");
      const double med_mle = find_value(rows, "mle", T, "median");
      const std::string tag = "setting " + std::to_string(setting) + " T " + std::to_string(T);
      if (!(med_proj > med_lse)) v.fail(tag + ": proj median not above lse");
      if (setting == 3) {
        if (!(med_lse >= 0.9 * med_mle)) v.fail(tag + ": lse below 0.9x mle");
        if (T == 2000 && !(med_mle < med_lse)) v.fail(tag + ": mle not beating lse");
      }
      if (setting == 3 && T == 2000)
        v.note("III/2000 medians proj " + fmt(med_proj) + ", lse " + fmt(med_lse) + ", mle " +
               fmt(med_mle));
    }
  }
  return v;
}

/* ---- criterion 4: confidence interval coverage ---- */

Verdict criterion4() {
  Verdict v;
  const std::vector<markit::ExperimentRow> set1 =
      markit::experiment_coverage(3, 2, 1, 1000, 1000, 0.95, 41);
  for (const char* method : {"proj", "lse", "mle"}) {
    const double cov = find_value(set1, method, 1000, "coverage_stacked");
    v.note(std::string(method) + " " + fmt(cov));
    if (!(cov >= 0.93 && cov <= 0.97))
      v.fail(std::string("setting I ") + method + " coverage " + fmt(cov) +
             " outside [0.93, 0.97]");
  }
  const std::vector<markit::ExperimentRow> set3 =
      markit::experiment_coverage(3, 2, 3, 1000, 1000, 0.95, 43);
  const double cov_mle = find_value(set3, "mle", 1000, "coverage_stacked");
  v.note("III mle " + fmt(cov_mle));
  if (!(cov_mle >= 0.92 && cov_mle <= 0.97))
    v.fail("setting III mle coverage " + fmt(cov_mle) + " outside [0.92, 0.97]");
  return v;
}

/* ---- criterion 5: specification test size and power ---- */

Verdict criterion5() {
  Verdict v;
  const std::vector<markit::ExperimentRow> rows =
      markit::experiment_power(3, 2, 2000, {0.0, 0.5}, 1000, 0.95, 51);
  const double size = find_value(rows, "spec_test", 2000, "reject_eta_0.00");
  const double power = find_value(rows, "spec_test", 2000, "reject_eta_0.50");
  v.note("size " + fmt(size) + ", power " + fmt(power));
  if (!(size >= 0.03 && size <= 0.07)) v.fail("size outside [0.03, 0.07]");
  if (!(power > 0.9)) v.fail("power at eta=0.5 not above 0.9");
  return v;
}

/* ---- criterion 6: autocovariance consistency ---- */

Verdict criterion6() {
  Verdict v;
  MarModel model = markit::random_model(3, 2, 0.7, 61);
  model.cov = markit::random_covariance(3, 3, 2, 62);
  const Matrix gamma0 = markit::autocovariance(model, 0);

  // Independent check: iterate the stationarity recursion to a fixed point.
  const Matrix phi = markit::kron(model.b, model.a);
  const Matrix sigma = model.cov.dense(3, 2);
  Matrix fixed = sigma;
  Matrix pk = phi;
  Matrix term = sigma;
  for (int it = 0; it < 20000; ++it) {
    term = phi * term * phi.transpose();
    fixed += term;
    if (term.norm() < 1e-16) break;
  }
  const double lyap_diff = (gamma0 - fixed).cwiseAbs().maxCoeff();
  (void)pk;
  v.note("fixed-point diff " + fmt(lyap_diff));
  if (!(lyap_diff < 1e-8)) v.fail("analytic vs fixed-point iteration above 1e-8");

  const MatrixSeries s = markit::simulate(model, 50000, 63);
  Matrix sample = Matrix::Zero(6, 6);
  for (const Matrix& xt : s.x) {
    const Vector u = markit::vec(xt);
    sample.noalias() += u * u.transpose();
  }
  sample /= static_cast<double>(s.T());
  const double rel = (sample - gamma0).norm() / gamma0.norm();
  v.note("simulation rel err " + fmt(rel));
  if (!(rel < 0.05)) v.fail("sample covariance off by more than 5%");
  return v;
}

/* ---- criterion 7: efficiency ordering of the plug-in covariances ---- */

Verdict criterion7() {
  Verdict v;
  constexpr int kReps = 50;
  MarModel model = markit::random_model(3, 2, 0.5, markit::mix_seed(71, 1));
  model.cov = markit::random_covariance(3, 3, 2, markit::mix_seed(71, 2));
  int good = 0;
  for (int r = 0; r < kReps; ++r) {
    const MatrixSeries s = markit::simulate(model, 2000, 700 + static_cast<uint64_t>(r));
    const MarFit lse = markit::fit_lse(s);
    const MarFit mle = markit::fit_mle(s);
    const Matrix xi2 = markit::asymp_cov_lse(lse, s).stacked_cov;
    const Matrix xi3 = markit::asymp_cov_mle(mle, s).stacked_cov;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(xi2 - xi3, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() >= -0.05 * xi2.trace()) ++good;
  }
  v.note(std::to_string(good) + "/" + std::to_string(kReps) + " reps ordered");
  if (good * 10 < kReps * 9) v.fail("fewer than 90% of reps ordered");
  return v;
}

/* ---- criterion 8: rank-one impulse responses ---- */

Verdict criterion8() {
  Verdict v;
  constexpr double kTol = 1e-12;
  double worst = 0.0;
  std::mt19937_64 rng(88);
  std::uniform_int_distribution<int> dim(2, 4);
  for (int c = 0; c < 50; ++c) {
    const int m = dim(rng), n = dim(rng);
    MarModel model = markit::random_model(m, n, 0.6, 800 + static_cast<uint64_t>(c));
    model.cov = markit::random_covariance(3, m, n, 900 + static_cast<uint64_t>(c));
    std::uniform_int_distribution<int> pick_i(1, m), pick_j(1, n);
    const markit::IrfResult irf = markit::irf_s1(model, pick_i(rng), pick_j(rng), 20);
    if (!irf.factored) {
      v.fail("irf under Kronecker noise not factored");
      break;
    }
    for (int k = 0; k <= 20; ++k) {
      const Matrix outer = irf.row_resp[static_cast<size_t>(k)] *
                           irf.col_resp[static_cast<size_t>(k)].transpose();
      worst = std::max(worst,
                       (irf.responses[static_cast<size_t>(k)] - outer).cwiseAbs().maxCoeff());
    }
  }
  v.note("max factorization gap " + fmt(worst));
  if (!(worst < kTol)) v.fail("responses not rank-one within " + fmt(kTol));
  return v;
}

/* ---- criterion 9: byte-identical seeded reruns of the CLI ---- */

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli_quiet(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("markit");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::fflush(stdout);
  std::fflush(stderr);
  const int saved_out = dup(1);
  const int saved_err = dup(2);
  FILE* sink = std::fopen("/tmp/markit_acceptance_cli.log", "ab");
  dup2(fileno(sink), 1);
  dup2(fileno(sink), 2);
  const int code = markit_cli_main(static_cast<int>(argv.size()), argv.data());
  std::fflush(stdout);
  std::fflush(stderr);
  dup2(saved_out, 1);
  dup2(saved_err, 2);
  close(saved_out);
  close(saved_err);
  std::fclose(sink);
  return code;
}

Verdict criterion9() {
  Verdict v;
  const std::string dir = "/tmp/markit_acceptance_";
  const std::string data = dir + "data.csv";
  const std::string manifest = dir + "run.json";

  struct Command {
    std::string name;
    std::vector<std::string> args;
    std::vector<std::string> outputs;
  };
  const std::vector<Command> commands = {
      {"simulate",
       {"simulate", "--setting", "III", "--m", "3", "--n", "2", "--T", "200", "--seed", "12",
        "--out", data, "--manifest", manifest},
       {data, manifest}},
      {"fit",
       {"fit", data, "--method", "lse", "--out", dir + "coef.csv", "--kron-out",
        dir + "kron.csv"},
       {dir + "coef.csv", dir + "kron.csv"}},
      {"test", {"test", data, "--out", dir + "test.csv"}, {dir + "test.csv"}},
      {"irf",
       {"irf", data, "--method", "mle", "--shock", "1,2", "--horizon", "10", "--out",
        dir + "irf.csv"},
       {dir + "irf.csv"}},
      {"forecast",
       {"forecast", data, "--method", "var1", "--start", "195", "--out", dir + "fc.csv"},
       {dir + "fc.csv"}},
  };

  for (const Command& cmd : commands) {
    std::vector<std::string> first;
    for (int round = 0; round < 2; ++round) {
      if (run_cli_quiet(cmd.args) != 0) {
        v.fail(cmd.name + " exited nonzero");
        return v;
      }
      std::vector<std::string> bytes;
      for (const std::string& path : cmd.outputs) bytes.push_back(slurp(path));
      if (round == 0) {
        first = std::move(bytes);
      } else if (bytes != first) {
        v.fail(cmd.name + " outputs changed between reruns");
      }
    }
  }

  // The experiment summary must not depend on the worker count either.
  const std::vector<std::string> exp_args = {
      "experiment", "compare", "--setting", "I",  "--m",    "2",  "--n", "2",
      "--T",        "60",      "--reps",    "10", "--seed", "77", "--out", dir + "exp.csv"};
  std::string exp_first;
  for (int round = 0; round < 2; ++round) {
    setenv("MAR_KIT_THREADS", round == 0 ? "1" : "4", 1);
    if (run_cli_quiet(exp_args) != 0) {
      v.fail("experiment exited nonzero");
      unsetenv("MAR_KIT_THREADS");
      return v;
    }
    const std::string bytes = slurp(dir + "exp.csv");
    if (round == 0)
      exp_first = bytes;
    else if (bytes != exp_first)
      v.fail("experiment output depends on the thread count");
  }
  unsetenv("MAR_KIT_THREADS");
  if (v.pass) v.note("6 commands byte-stable");
  return v;
}

}  // namespace

int main() {
  struct Entry {
    const char* label;
    std::function<Verdict()> run;
    double budget_s;
  };
  const std::vector<Entry> entries = {
      {"criterion 1 (kronecker algebra properties)", criterion1, 5.0},
      {"criterion 2 (exact recovery)", criterion2, 10.0},
      {"criterion 3 (estimator ordering)", criterion3, 300.0},
      {"criterion 4 (interval coverage)", criterion4, 600.0},
      {"criterion 5 (test size and power)", criterion5, 600.0},
      {"criterion 6 (autocovariance consistency)", criterion6, 30.0},
      {"criterion 7 (efficiency ordering)", criterion7, 180.0},
      {"criterion 8 (rank-one impulse responses)", criterion8, 10.0},
      {"criterion 9 (seeded determinism)", criterion9, 600.0},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    const auto start = std::chrono::steady_clock::now();
    Verdict verdict;
    try {
      verdict = entry.run();
    } catch (const std::exception& e) {
      verdict.fail(std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > entry.budget_s)
      verdict.fail("runtime " + fmt(elapsed) + "s over budget " + fmt(entry.budget_s) + "s");
    std::printf("%s: %s (%.1fs)%s%s\n", entry.label, verdict.pass ? "PASS" : "FAIL", elapsed,
                verdict.detail.empty() ? "" : " - ", verdict.detail.c_str());
    std::fflush(stdout);
    if (!verdict.pass) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
