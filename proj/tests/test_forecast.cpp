#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "markit/estimators.hpp"
#include "markit/forecast.hpp"
#include "markit/io.hpp"
#include "markit/model.hpp"

using markit::ForecastMethod;
using markit::ForecastReport;
using markit::MarModel;
using markit::Matrix;
using markit::MatrixSeries;
using markit::Vector;

namespace {

const std::string kDataDir = MARKIT_TEST_DATA_DIR;

MatrixSeries scalar_series(const std::vector<double>& xs) {
  MatrixSeries s = MatrixSeries::create(1, 1, static_cast<int>(xs.size()));
  for (size_t t = 0; t < xs.size(); ++t) s.x[t](0, 0) = xs[t];
  return s;
}

}  // namespace

TEST_CASE("acf matches the hand-computed small case") {
  const MatrixSeries s = scalar_series({1.0, 2.0, 3.0, 4.0});
  const markit::AcfReport rep = markit::acf(s, 2);
  REQUIRE(rep.r.size() == 3);
  CHECK(rep.sample_size == 4);
  CHECK(rep.r[0](0, 0) == 1.0);
  CHECK(rep.r[1](0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(rep.r[2](0, 0) == doctest::Approx(-0.3).epsilon(1e-14));
}

TEST_CASE("acf of a constant entry is zero past lag zero") {
  MatrixSeries s = MatrixSeries::create(2, 1, 10);
  for (int t = 0; t < 10; ++t) {
    s.x[static_cast<size_t>(t)](0, 0) = 5.0;
    s.x[static_cast<size_t>(t)](1, 0) = (t % 2 == 0) ? 1.0 : -1.0;
  }
  const markit::AcfReport rep = markit::acf(s, 3);
  CHECK(rep.r[0](0, 0) == 1.0);
  CHECK(rep.r[1](0, 0) == 0.0);
  CHECK(rep.r[2](0, 0) == 0.0);
  // The alternating entry has strong negative lag-1 autocorrelation.
  CHECK(rep.r[1](1, 0) < -0.8);
}

TEST_CASE("acf of white noise stays inside the three-sigma band") {
  MarModel model;
  model.a = Matrix::Zero(2, 2);
  model.b = Matrix::Zero(2, 2);
  const MatrixSeries s = markit::simulate(model, 4000, 77);
  const markit::AcfReport rep = markit::acf(s, 5);
  const double band = 3.0 / std::sqrt(4000.0);
  for (int k = 1; k <= 5; ++k)
    CHECK(rep.r[static_cast<size_t>(k)].cwiseAbs().maxCoeff() < band);
}

TEST_CASE("acf rejects out-of-range lags") {
  const MatrixSeries s = scalar_series({1.0, 2.0, 3.0});
  CHECK_THROWS_AS((void)markit::acf(s, -1), markit::PreconditionError);
  CHECK_THROWS_AS((void)markit::acf(s, 3), markit::PreconditionError);
  CHECK_NOTHROW((void)markit::acf(s, 2));
}

TEST_CASE("predict_one is the bilinear conditional mean") {
  MarModel model;
  model.a = testutil::mat2(0.6, 0.1, -0.2, 0.7);
  model.b = testutil::mat2(0.5, 0.0, 0.3, 0.4);
  const Matrix x = testutil::mat2(1.0, -1.0, 2.0, 0.5);
  const Matrix y = testutil::mat2(0.2, 0.9, -0.3, 0.1);
  const Matrix direct = model.a * x * model.b.transpose();
  CHECK(testutil::max_abs_diff(markit::predict_one(model, x), direct) == 0.0);
  // Linearity in the state.
  const Matrix both = markit::predict_one(model, Matrix(x + y));
  const Matrix sum = markit::predict_one(model, x) + markit::predict_one(model, y);
  CHECK(testutil::max_abs_diff(both, sum) < 1e-14);
  Matrix bad = Matrix::Zero(3, 2);
  CHECK_THROWS_AS((void)markit::predict_one(model, bad), markit::DimensionError);
}

TEST_CASE("residuals subtract the one-step prediction and rss sums them") {
  const MatrixSeries s = testutil::fixed_series6();
  MarModel model;
  model.a = testutil::mat2(0.6, 0.1, -0.2, 0.7);
  model.b = testutil::mat2(0.5, 0.0, 0.3, 0.4);
  const MatrixSeries r = markit::residuals(s, model);
  REQUIRE(r.T() == 5);
  double total = 0.0;
  for (int t = 1; t < s.T(); ++t) {
    const Matrix expect = s.x[static_cast<size_t>(t)] -
                          model.a * s.x[static_cast<size_t>(t - 1)] * model.b.transpose();
    CHECK(testutil::max_abs_diff(r.x[static_cast<size_t>(t - 1)], expect) == 0.0);
    total += expect.squaredNorm();
  }
  CHECK(markit::rss(r) == doctest::Approx(total).epsilon(1e-15));
}

TEST_CASE("rolling forecast reproduces the frozen scalar benchmark") {
  const MatrixSeries s = markit::load_series(kDataDir + "/scalar_series.csv");
  REQUIRE(s.T() == 12);

  SUBCASE("unrestricted linear predictor, no intercept") {
    const ForecastReport rep = markit::rolling_forecast(s, 9, ForecastMethod::Var1);
    REQUIRE(rep.step_sqerr.size() == 4);
    CHECK(rep.step_sqerr[0] == doctest::Approx(0.11677104896684104).epsilon(1e-12));
    CHECK(rep.step_sqerr[1] == doctest::Approx(0.33406278932749767).epsilon(1e-12));
    CHECK(rep.step_sqerr[2] == doctest::Approx(0.27126736111111116).epsilon(1e-12));
    CHECK(rep.step_sqerr[3] == doctest::Approx(0.22347107438016534).epsilon(1e-12));
    CHECK(rep.predictions[0](0, 0) == doctest::Approx(-4.171779141104294e-02).epsilon(1e-12));
    CHECK(rep.predictions[1](0, 0) == doctest::Approx(1.2201834862385323e-01).epsilon(1e-12));
    CHECK(rep.predictions[2](0, 0) == doctest::Approx(3.2083333333333336e-01).epsilon(1e-12));
    CHECK(rep.predictions[3](0, 0) == doctest::Approx(-7.272727272727275e-02).epsilon(1e-12));
    const double sum = rep.step_sqerr[0] + rep.step_sqerr[1] + rep.step_sqerr[2] +
                       rep.step_sqerr[3];
    CHECK(rep.total == doctest::Approx(sum).epsilon(1e-15));
  }

  SUBCASE("per-entry AR(1) with intercept") {
    const ForecastReport rep = markit::rolling_forecast(s, 9, ForecastMethod::IAr1);
    REQUIRE(rep.step_sqerr.size() == 4);
    CHECK(rep.step_sqerr[0] == doctest::Approx(6.123868026611897e-04).epsilon(1e-12));
    CHECK(rep.step_sqerr[1] == doctest::Approx(0.12838131130544977).epsilon(1e-12));
    CHECK(rep.step_sqerr[2] == doctest::Approx(0.35848261496555023).epsilon(1e-12));
    CHECK(rep.step_sqerr[3] == doctest::Approx(1.578157252767883e-03).epsilon(1e-12));
  }

  SUBCASE("per-entry AR(2) with intercept") {
    const ForecastReport rep = markit::rolling_forecast(s, 9, ForecastMethod::IAr2);
    REQUIRE(rep.step_sqerr.size() == 4);
    CHECK(rep.step_sqerr[0] == doctest::Approx(0.014757132518179854).epsilon(1e-12));
    CHECK(rep.step_sqerr[1] == doctest::Approx(0.02772593919215239).epsilon(1e-12));
    CHECK(rep.step_sqerr[2] == doctest::Approx(0.37228160853820763).epsilon(1e-12));
    CHECK(rep.step_sqerr[3] == doctest::Approx(0.01203811488658049).epsilon(1e-12));
  }
}

TEST_CASE("holding the fit fixed reuses the first window's model") {
  const MatrixSeries s = markit::load_series(kDataDir + "/scalar_series.csv");
  const ForecastReport rep =
      markit::rolling_forecast(s, 9, ForecastMethod::Var1, /*refit_each_step=*/false);
  const markit::Var1Fit first = markit::fit_var1(s.head(8));
  REQUIRE(rep.step_sqerr.size() == 4);
  for (int k = 0; k < 4; ++k) {
    const double pred = first.phi(0, 0) * s.x[static_cast<size_t>(7 + k)](0, 0);
    CHECK(rep.predictions[static_cast<size_t>(k)](0, 0) ==
          doctest::Approx(pred).epsilon(1e-14));
  }
  // The first step matches the refitting run; later ones generally differ.
  const ForecastReport refit = markit::rolling_forecast(s, 9, ForecastMethod::Var1);
  CHECK(rep.step_sqerr[0] == doctest::Approx(refit.step_sqerr[0]).epsilon(1e-14));
}

TEST_CASE("rolling forecast window checks") {
  const MatrixSeries s = markit::load_series(kDataDir + "/scalar_series.csv");
  CHECK_THROWS_AS((void)markit::rolling_forecast(s, 1, ForecastMethod::Var1),
                  markit::PreconditionError);
  CHECK_THROWS_AS((void)markit::rolling_forecast(s, 13, ForecastMethod::Var1),
                  markit::PreconditionError);
  const ForecastReport last = markit::rolling_forecast(s, 12, ForecastMethod::Var1);
  CHECK(last.step_sqerr.size() == 1);
  // A window too short for the scalar AR order must fail loudly.
  CHECK_THROWS_AS((void)markit::rolling_forecast(s, 3, ForecastMethod::IAr2),
                  markit::PreconditionError);
}

TEST_CASE("matrix methods run through the rolling protocol") {
  MarModel model = markit::random_model(2, 2, 0.6, 301);
  const MatrixSeries s = markit::simulate(model, 60, 302);
  for (const ForecastMethod fm :
       {ForecastMethod::Proj, ForecastMethod::Lse, ForecastMethod::Mle}) {
    const ForecastReport rep = markit::rolling_forecast(s, 55, fm);
    REQUIRE(rep.step_sqerr.size() == 6);
    for (double e : rep.step_sqerr) CHECK(e >= 0.0);
    CHECK(std::isfinite(rep.total));
  }
}

TEST_CASE("forecast method names round trip") {
  using markit::forecast_method_from_name;
  using markit::forecast_method_name;
  for (const ForecastMethod fm : {ForecastMethod::Proj, ForecastMethod::Lse,
                                  ForecastMethod::Mle, ForecastMethod::Var1,
                                  ForecastMethod::IAr1, ForecastMethod::IAr2}) {
    CHECK(forecast_method_from_name(forecast_method_name(fm)) == fm);
  }
  CHECK(forecast_method_from_name("mles") == ForecastMethod::Mle);
  CHECK_THROWS_AS((void)forecast_method_from_name("arima"), markit::ParseError);
}
