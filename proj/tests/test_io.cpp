#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "markit/io.hpp"
#include "markit/model.hpp"

using markit::MatrixSeries;
using markit::Matrix;
using markit::PreprocessStep;

namespace {

MatrixSeries one_row(const std::vector<double>& xs, const std::string& label = "r1") {
  MatrixSeries s = MatrixSeries::create(1, 1, static_cast<int>(xs.size()));
  s.row_labels[0] = label;
  for (size_t t = 0; t < xs.size(); ++t) s.x[t](0, 0) = xs[t];
  return s;
}

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/markit_io_") + name;
}

}  // namespace

TEST_CASE("format_g17 text round-trips doubles exactly") {
  for (const double v : {0.1, 1.0 / 3.0, -2.5e-300, 1.7e300, 123456789.123456789, 0.0}) {
    const std::string text = markit::format_g17(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
}

TEST_CASE("save and load round-trip a labeled series bit for bit") {
  MatrixSeries s = MatrixSeries::create(2, 3, 4);
  s.row_labels = {"US", "DE"};
  s.col_labels = {"gdp", "cpi", "ir"};
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto& xt : s.x)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) xt(i, j) = u(rng);

  const std::string path = tmp_path("roundtrip.csv");
  markit::save_series(s, path);
  const MatrixSeries back = markit::load_series(path);
  REQUIRE(back.m == 2);
  REQUIRE(back.n == 3);
  REQUIRE(back.T() == 4);
  CHECK(back.row_labels == s.row_labels);
  CHECK(back.col_labels == s.col_labels);
  for (int t = 0; t < 4; ++t)
    CHECK(testutil::max_abs_diff(back.x[static_cast<size_t>(t)],
                                 s.x[static_cast<size_t>(t)]) == 0.0);
  CHECK(markit::series_to_csv(back) == markit::series_to_csv(s));
  std::remove(path.c_str());
}

TEST_CASE("load accepts CRLF, shuffled rows, and surrounding spaces") {
  const std::string plain =
      "t,row,col,value\n1,a,b,1.5\n2,a,b,-2\n";
  const std::string crlf =
      "t,row,col,value\r\n1,a,b,1.5\r\n2,a,b,-2\r\n";
  const std::string shuffled =
      "t,row,col,value\n2, a , b ,-2\n1,a,b,1.5\n";
  const MatrixSeries s1 = markit::load_series_text(plain);
  const MatrixSeries s2 = markit::load_series_text(crlf);
  const MatrixSeries s3 = markit::load_series_text(shuffled);
  for (const MatrixSeries* s : {&s1, &s2, &s3}) {
    REQUIRE(s->T() == 2);
    CHECK(s->x[0](0, 0) == 1.5);
    CHECK(s->x[1](0, 0) == -2.0);
    CHECK(s->row_labels[0] == "a");
  }
}

TEST_CASE("labels keep first-appearance order") {
  const std::string text =
      "t,row,col,value\n"
      "1,beta,y,1\n1,beta,x,2\n1,alpha,y,3\n1,alpha,x,4\n"
      "2,beta,y,5\n2,beta,x,6\n2,alpha,y,7\n2,alpha,x,8\n";
  const MatrixSeries s = markit::load_series_text(text);
  CHECK(s.row_labels == std::vector<std::string>{"beta", "alpha"});
  CHECK(s.col_labels == std::vector<std::string>{"y", "x"});
  CHECK(s.x[0](0, 0) == 1.0);   // (beta, y)
  CHECK(s.x[0](1, 1) == 4.0);   // (alpha, x)
}

TEST_CASE("loader rejects malformed input with the offending line") {
  using markit::ParseError;
  CHECK_THROWS_WITH_AS((void)markit::load_series_text(""),
                       doctest::Contains("empty input"), ParseError);
  CHECK_THROWS_WITH_AS((void)markit::load_series_text("time,row,col,value\n1,a,b,1\n"),
                       doctest::Contains("t,row,col,value"), ParseError);
  CHECK_THROWS_WITH_AS(
      (void)markit::load_series_text("t,row,col,value\n1,a,b,1\n2,a,b,oops\n"),
      doctest::Contains(":3:"), ParseError);
  CHECK_THROWS_WITH_AS((void)markit::load_series_text("t,row,col,value\n1,a,b\n"),
                       doctest::Contains("expected 4 fields"), ParseError);
  CHECK_THROWS_WITH_AS((void)markit::load_series_text("t,row,col,value\n0,a,b,1\n"),
                       doctest::Contains("bad time index"), ParseError);
  CHECK_THROWS_WITH_AS((void)markit::load_series_text("t,row,col,value\n1,,b,1\n"),
                       doctest::Contains("empty label"), ParseError);
  CHECK_THROWS_WITH_AS((void)markit::load_series_text("t,row,col,value\n1,a,b,1e999\n"),
                       doctest::Contains("non-finite"), ParseError);
  CHECK_THROWS_WITH_AS(
      (void)markit::load_series_text("t,row,col,value\n1,a,b,1\n\n2,a,b,2\n"),
      doctest::Contains("blank line"), ParseError);
  CHECK_THROWS_WITH_AS(
      (void)markit::load_series_text(
          "t,row,col,value\n1,a,b,1\n1,a,b,2\n2,a,b,3\n2,c,b,4\n"),
      doctest::Contains("duplicate"), ParseError);
  CHECK_THROWS_WITH_AS(
      (void)markit::load_series_text("t,row,col,value\n1,a,b,1\n3,a,b,2\n"),
      doctest::Contains("incomplete grid"), ParseError);
  CHECK_THROWS_AS((void)markit::load_series("/nonexistent/nowhere.csv"), markit::IoError);
}

TEST_CASE("delimiters in labels cannot be written out") {
  MatrixSeries s = MatrixSeries::create(1, 1, 2);
  s.row_labels[0] = "a,b";
  CHECK_THROWS_AS((void)markit::series_to_csv(s), markit::PreconditionError);
}

TEST_CASE("differencing steps match the frozen examples") {
  const MatrixSeries s = one_row({1.0, 2.0, 4.0, 8.0});

  const MatrixSeries d = markit::preprocess(s, markit::parse_preprocess("diff"));
  REQUIRE(d.T() == 3);
  CHECK(d.x[0](0, 0) == 1.0);
  CHECK(d.x[1](0, 0) == 2.0);
  CHECK(d.x[2](0, 0) == 4.0);

  const MatrixSeries ld = markit::preprocess(s, markit::parse_preprocess("logdiff"));
  CHECK(ld.x[0](0, 0) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(ld.x[1](0, 0) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(ld.x[2](0, 0) == doctest::Approx(0.6931471805599452).epsilon(1e-15));

  const MatrixSeries p = markit::preprocess(s, markit::parse_preprocess("pct"));
  CHECK(p.x[0](0, 0) == 1.0);
  CHECK(p.x[1](0, 0) == 1.0);
  CHECK(p.x[2](0, 0) == 1.0);
}

TEST_CASE("seasonal demeaning removes the phase means") {
  const MatrixSeries s = one_row({3.0, 1.0, 5.0, 7.0, 2.0, 9.0});
  const MatrixSeries out = markit::preprocess(s, markit::parse_preprocess("seasonal:2"));
  REQUIRE(out.T() == 6);
  const double expect[6] = {-0.3333333333333335, -4.666666666666667, 1.6666666666666665,
                            1.333333333333333,  -1.3333333333333335, 3.333333333333333};
  for (int t = 0; t < 6; ++t)
    CHECK(out.x[static_cast<size_t>(t)](0, 0) ==
          doctest::Approx(expect[t]).epsilon(1e-15));
  // Phase means of the output are zero.
  CHECK(out.x[0](0, 0) + out.x[2](0, 0) + out.x[4](0, 0) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(out.x[1](0, 0) + out.x[3](0, 0) + out.x[5](0, 0) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
}

TEST_CASE("demean and rownorm standardize rows") {
  MatrixSeries s = MatrixSeries::create(2, 2, 50);
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(3.0, 2.0);
  for (auto& xt : s.x)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) xt(i, j) = g(rng) * (i + 1);

  const MatrixSeries out =
      markit::preprocess(s, markit::parse_preprocess("demean,rownorm"));
  for (int i = 0; i < 2; ++i) {
    double mean = 0.0, var = 0.0;
    for (const auto& xt : out.x) mean += xt.row(i).sum();
    mean /= 50.0 * 2;
    for (const auto& xt : out.x) var += (xt.row(i).array() - mean).square().sum();
    var /= 50.0 * 2;
    CHECK(std::abs(mean) < 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("row filters leave the other rows aligned but untouched") {
  MatrixSeries s = MatrixSeries::create(2, 1, 4);
  s.row_labels = {"flow", "stock"};
  for (int t = 0; t < 4; ++t) {
    s.x[static_cast<size_t>(t)](0, 0) = std::pow(2.0, t);  // 1 2 4 8
    s.x[static_cast<size_t>(t)](1, 0) = 10.0 + t;          // 10 11 12 13
  }
  const MatrixSeries out = markit::preprocess(s, markit::parse_preprocess("diff@flow"));
  REQUIRE(out.T() == 3);
  CHECK(out.x[0](0, 0) == 1.0);
  CHECK(out.x[1](0, 0) == 2.0);
  CHECK(out.x[2](0, 0) == 4.0);
  // The unfiltered row keeps the value at the later time of each difference.
  CHECK(out.x[0](1, 0) == 11.0);
  CHECK(out.x[1](1, 0) == 12.0);
  CHECK(out.x[2](1, 0) == 13.0);
}

TEST_CASE("preprocess failure modes") {
  const MatrixSeries s = one_row({1.0, -1.0, 2.0});
  CHECK_THROWS_AS((void)markit::preprocess(s, markit::parse_preprocess("logdiff")),
                  markit::NumericError);
  const MatrixSeries z = one_row({1.0, 0.0, 2.0});
  CHECK_THROWS_AS((void)markit::preprocess(z, markit::parse_preprocess("pct")),
                  markit::NumericError);
  const MatrixSeries c = one_row({4.0, 4.0, 4.0});
  CHECK_THROWS_AS((void)markit::preprocess(c, markit::parse_preprocess("rownorm")),
                  markit::NumericError);
  const MatrixSeries t1 = one_row({5.0});
  CHECK_THROWS_AS((void)markit::preprocess(t1, markit::parse_preprocess("diff")),
                  markit::PreconditionError);
  PreprocessStep bad;
  bad.kind = PreprocessStep::Kind::SeasonalDemean;
  bad.period = 1;
  CHECK_THROWS_AS((void)markit::preprocess(s, {bad}), markit::PreconditionError);
  PreprocessStep missing;
  missing.kind = PreprocessStep::Kind::Diff;
  missing.applies_to = {"nope"};
  CHECK_THROWS_AS((void)markit::preprocess(s, {missing}), markit::PreconditionError);
}

TEST_CASE("preprocess spec strings parse into typed steps") {
  const auto steps = markit::parse_preprocess("diff, seasonal:4 ,rownorm@GDP|CPI");
  REQUIRE(steps.size() == 3);
  CHECK(steps[0].kind == PreprocessStep::Kind::Diff);
  CHECK(steps[0].applies_to.empty());
  CHECK(steps[1].kind == PreprocessStep::Kind::SeasonalDemean);
  CHECK(steps[1].period == 4);
  CHECK(steps[2].kind == PreprocessStep::Kind::RowNormalize);
  CHECK(steps[2].applies_to == std::vector<std::string>{"GDP", "CPI"});
  CHECK(markit::parse_preprocess("").empty());
  CHECK(markit::parse_preprocess("  ").empty());

  CHECK_THROWS_AS((void)markit::parse_preprocess("bogus"), markit::ParseError);
  CHECK_THROWS_AS((void)markit::parse_preprocess("seasonal:x"), markit::ParseError);
  CHECK_THROWS_AS((void)markit::parse_preprocess("seasonal:1"), markit::ParseError);
  CHECK_THROWS_AS((void)markit::parse_preprocess("diff@"), markit::ParseError);
  CHECK_THROWS_AS((void)markit::parse_preprocess("diff,,demean"), markit::ParseError);
}

TEST_CASE("a minimal one-cell series loads") {
  const MatrixSeries s = markit::load_series_text("t,row,col,value\n1,a,b,3\n2,a,b,4\n");
  CHECK(s.m == 1);
  CHECK(s.n == 1);
  CHECK(s.T() == 2);
  CHECK(s.x[1](0, 0) == 4.0);
}
