#include "spord/diagnostics.hpp"

#include "spord/rng.hpp"

#include "doctest.h"

using namespace spord;

namespace {

Vec seq_vec(std::initializer_list<double> vals) {
  Vec v(static_cast<Index>(vals.size()));
  Index i = 0;
  for (const double x : vals) v[i++] = x;
  return v;
}

// minimal draws container for summarize tests
PosteriorDraws fake_draws(const std::vector<Mat>& chains, const std::vector<std::string>& names) {
  PosteriorDraws draws;
  draws.layout.names = names;
  draws.layout.n_areas = 0;
  for (const auto& m : chains) {
    ChainDraws c;
    c.samples = m;
    for (Index r = 0; r < m.rows(); ++r) c.iterations.push_back(r + 1);
    draws.chains.push_back(std::move(c));
  }
  return draws;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("gelman_rubin on two identical chains") {
  const Vec c = seq_vec({1, 2, 3, 4});
  const auto rhat = gelman_rubin({c, c});
  REQUIRE(rhat.has_value());
  CHECK(*rhat == doctest::Approx(0.8660254037844386).epsilon(1e-12));
}

TEST_CASE("gelman_rubin degenerate and undefined cases") {
  CHECK(!gelman_rubin({seq_vec({1, 2, 3})}).has_value());  // single chain
  CHECK(!gelman_rubin({Vec::Zero(5), Vec::Ones(5)}).has_value());  // W = 0
  CHECK_THROWS_AS(gelman_rubin({seq_vec({1, 2}), seq_vec({1, 2, 3})}), input_error);
}

TEST_CASE("gelman_rubin near 1 for iid chains") {
  Rng rng(314);
  std::vector<Vec> chains;
  for (int m = 0; m < 5; ++m) {
    Vec c(200);
    for (Index i = 0; i < 200; ++i) c[i] = rng.normal();
    chains.push_back(c);
  }
  const auto rhat = gelman_rubin(chains);
  REQUIRE(rhat.has_value());
  CHECK(*rhat > 0.99);
  CHECK(*rhat < 1.05);
}

TEST_CASE("gelman_rubin is affine invariant") {
  Rng rng(99);
  std::vector<Vec> chains, scaled;
  for (int m = 0; m < 3; ++m) {
    Vec c(100);
    for (Index i = 0; i < 100; ++i) c[i] = rng.normal() + 0.1 * m;
    chains.push_back(c);
    scaled.push_back(-2.5 * c + Vec::Constant(100, 7.0));
  }
  CHECK(*gelman_rubin(chains) == doctest::Approx(*gelman_rubin(scaled)).epsilon(1e-10));
}

TEST_CASE("ess of iid noise is close to the draw count") {
  Rng rng(123);
  Vec c(1000);
  for (Index i = 0; i < 1000; ++i) c[i] = rng.normal();
  const auto ess = effective_sample_size({c});
  CHECK(!ess.degenerate);
  CHECK(ess.value > 800.0);
  CHECK(ess.value < 1200.0);
}

TEST_CASE("ess of an AR(1) chain matches the analytic value within 30%") {
  Rng rng(456);
  const double rho = 0.9;
  const Index t = 10000;
  Vec c(t);
  c[0] = rng.normal();
  for (Index i = 1; i < t; ++i) c[i] = rho * c[i - 1] + std::sqrt(1 - rho * rho) * rng.normal();
  const auto ess = effective_sample_size({c});
  const double analytic = double(t) * (1 - rho) / (1 + rho);  // about 526
  CHECK(ess.value > 0.7 * analytic);
  CHECK(ess.value < 1.3 * analytic);
}

TEST_CASE("constant sequence reports the draw count with a degeneracy flag") {
  const auto ess = effective_sample_size({Vec::Constant(50, 3.14)});
  CHECK(ess.degenerate);
  CHECK(ess.value == 50.0);
}

TEST_CASE("ess never exceeds the total draw count by more than 5%") {
  Rng rng(789);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Vec> chains;
    Index total = 0;
    for (int m = 0; m < 3; ++m) {
      const Index t = 50 + Index(rng.uniform_below(200));
      Vec c(t);
      for (Index i = 0; i < t; ++i) c[i] = rng.normal();
      total += t;
      chains.push_back(c);
    }
    const auto ess = effective_sample_size(chains);
    CHECK(ess.value <= 1.05 * double(total));
  }
}

TEST_CASE("ess is affine invariant") {
  Rng rng(1001);
  Vec c(500);
  c[0] = rng.normal();
  for (Index i = 1; i < 500; ++i) c[i] = 0.5 * c[i - 1] + rng.normal();
  const auto base = effective_sample_size({c});
  const auto scaled = effective_sample_size({Vec(3.0 * c + Vec::Constant(500, -1.0))});
  CHECK(base.value == doctest::Approx(scaled.value).epsilon(1e-9));
}

TEST_CASE("quantiles use inclusive linear interpolation") {
  std::vector<double> vals;
  for (int i = 100; i >= 1; --i) vals.push_back(double(i));
  CHECK(quantile_linear(vals, 0.025) == doctest::Approx(3.475).epsilon(1e-12));
  CHECK(quantile_linear(vals, 0.5) == doctest::Approx(50.5).epsilon(1e-12));
  CHECK(quantile_linear(vals, 0.975) == doctest::Approx(97.525).epsilon(1e-12));
  CHECK(quantile_linear({42.0}, 0.975) == 42.0);
}

TEST_CASE("glob pattern matching") {
  CHECK(pattern_match("theta[*]", "theta[a001]"));
  CHECK(pattern_match("kappa[*]", "kappa[m:a1][2]"));
  CHECK(pattern_match("sigma", "sigma"));
  CHECK(!pattern_match("sigma", "sigmaX"));
  CHECK(!pattern_match("theta[*]", "kappa[m][1]"));
  CHECK(pattern_match("*", "anything"));
  CHECK(pattern_match("alpha[dw][*]", "alpha[dw][d2]"));
}

TEST_CASE("summarize: rows, degenerate columns, unmatched patterns, determinism") {
  Rng rng(17);
  Mat a(40, 3), b(40, 3);
  for (Index r = 0; r < 40; ++r) {
    a(r, 0) = rng.normal();
    b(r, 0) = rng.normal();
    a(r, 1) = 5.0;  // constant scalar
    b(r, 1) = 5.0;
    a(r, 2) = rng.uniform();
    b(r, 2) = rng.uniform();
  }
  const auto draws = fake_draws({a, b}, {"theta[x]", "theta[y]", "loglik"});
  const auto report = summarize(draws, {"theta[*]", "nothing[*]"});
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].name == "theta[x]");
  CHECK(report.rows[1].name == "theta[y]");
  CHECK(report.unmatched_patterns == std::vector<std::string>{"nothing[*]"});

  const auto& constant = report.rows[1];
  CHECK(!constant.rhat.has_value());
  CHECK(constant.ess_degenerate);
  CHECK(constant.sd == 0.0);
  CHECK(constant.q025 == constant.q975);

  const auto again = summarize(draws, {"theta[*]", "nothing[*]"});
  CHECK(again.rows[0].mean == report.rows[0].mean);
  CHECK(again.rows[0].ess == report.rows[0].ess);

  // threshold failures skip degenerate scalars
  const auto failures = report.threshold_failures(1.10, 1e6);
  CHECK(failures == std::vector<std::string>{"theta[x]"});
}

}  // TEST_SUITE
