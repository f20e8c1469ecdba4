#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "markit/types.hpp"

namespace markit {

struct ExperimentRow {
  std::string setting;
  std::string method;
  int T = 0;
  std::string stat;
  double value = 0.0;
};

// Worker-thread cap: MAR_KIT_THREADS when set (>= 1), else available cores.
int experiment_threads();

// Estimation error ||B_hat x A_hat - B x A||_F^2 for PROJ/LSE/MLE (and the
// unrestricted VAR1 against the same target), summarized by quantiles and the
// mean per method and per T. One model and covariance drawn per call;
// replication r simulates with seed + r.
std::vector<ExperimentRow> experiment_compare(int m, int n, int setting,
                                              const std::vector<int>& Ts, int reps,
                                              std::uint64_t seed);

// Entrywise CI coverage of the stacked and Kronecker coefficient vectors at
// the given level, averaged over entries and replications.
std::vector<ExperimentRow> experiment_coverage(int m, int n, int setting, int T, int reps,
                                               double level, std::uint64_t seed);

// Specification-test rejection rate at nominal size (1 - level) for data
// X_t = .5 A1 X B1^T + .5 eta A2 X B2^T + E_t, one row per eta
// (eta = 0 is the size row).
std::vector<ExperimentRow> experiment_power(int m, int n, int T, const std::vector<double>& etas,
                                            int reps, double level, std::uint64_t seed);

std::string rows_to_csv(const std::vector<ExperimentRow>& rows);

}  // namespace markit
