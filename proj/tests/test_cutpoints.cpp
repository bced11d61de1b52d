#include "spord/cutpoints.hpp"

#include "spord/rng.hpp"

#include "doctest.h"

using namespace spord;

namespace {

Vec random_simplex(Index j_cats, Rng& rng) {
  Vec delta(j_cats);
  double total = 0.0;
  for (Index j = 0; j < j_cats; ++j) {
    delta[j] = -std::log(rng.uniform());  // Exp(1) -> normalized gives Dirichlet(1)
    total += delta[j];
  }
  return delta / total;
}

}  // namespace

TEST_SUITE("cutpoints") {

TEST_CASE("sticks_to_delta worked examples") {
  Vec omega(4);
  omega << 0.2, 0.25, 1.0 / 3.0, 0.5;
  const Vec delta = sticks_to_delta(omega);
  for (Index j = 0; j < 5; ++j) CHECK(delta[j] == doctest::Approx(0.2).epsilon(1e-14));

  Vec w2(1);
  w2 << 0.7;
  const Vec d2 = sticks_to_delta(w2);
  CHECK(d2[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(d2[1] == doctest::Approx(0.3).epsilon(1e-15));

  Vec w3(3);
  w3 << 0.5, 0.5, 0.5;
  const Vec d3 = sticks_to_delta(w3);
  CHECK(d3[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d3[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(d3[2] == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(d3[3] == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("sticks_to_delta domain errors") {
  Vec bad(2);
  bad << 0.5, 0.0;
  CHECK_THROWS_AS(sticks_to_delta(bad), std::domain_error);
  bad << 1.0, 0.5;
  CHECK_THROWS_AS(sticks_to_delta(bad), std::domain_error);
}

TEST_CASE("stick pieces are positive and sum to one") {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const Index jm1 = 1 + Index(rng.uniform_below(7));
    Vec omega(jm1);
    for (Index j = 0; j < jm1; ++j) omega[j] = rng.uniform();
    const Vec delta = sticks_to_delta(omega);
    CHECK(delta.minCoeff() > 0.0);
    CHECK(delta.sum() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("delta_to_kappa worked examples") {
  const Vec kappa = delta_to_kappa(Vec::Constant(5, 0.2));
  CHECK(kappa[0] == doctest::Approx(-1.3862943611198906).epsilon(1e-12));
  CHECK(kappa[1] == doctest::Approx(-0.4054651081081643).epsilon(1e-12));
  CHECK(kappa[2] == doctest::Approx(0.4054651081081643).epsilon(1e-12));
  CHECK(kappa[3] == doctest::Approx(1.3862943611198906).epsilon(1e-12));

  Vec half(2);
  half << 0.5, 0.5;
  CHECK(delta_to_kappa(half)[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("inverse relation logistic(kappa_j) = cumulative delta") {
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const Index j_cats = 2 + Index(rng.uniform_below(6));
    const Vec delta = random_simplex(j_cats, rng);
    const Vec kappa = delta_to_kappa(delta);
    double cum = 0.0;
    for (Index j = 0; j + 1 < j_cats; ++j) {
      cum += delta[j];
      CHECK(logistic(kappa[j]) == doctest::Approx(cum).epsilon(1e-12));
      if (j > 0) CHECK(kappa[j] > kappa[j - 1]);  // strict order on the simplex
    }
  }
}

TEST_CASE("kappa_to_delta worked examples and round trips") {
  Vec k1(1);
  k1 << 0.0;
  const Vec d1 = kappa_to_delta(k1);
  CHECK(d1[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d1[1] == doctest::Approx(0.5).epsilon(1e-15));

  Vec k2(2);
  k2 << -1.0, 1.0;
  const Vec d2 = kappa_to_delta(k2);
  CHECK(d2[0] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
  CHECK(d2[1] == doctest::Approx(0.4621171572600098).epsilon(1e-12));
  CHECK(d2[2] == doctest::Approx(0.2689414213699951).epsilon(1e-12));

  Vec k3(4);
  k3 << logit(0.2), logit(0.4), logit(0.6), logit(0.8);
  const Vec d3 = kappa_to_delta(k3);
  for (Index j = 0; j < 5; ++j) CHECK(d3[j] == doctest::Approx(0.2).epsilon(1e-12));

  Rng rng(37);
  for (int rep = 0; rep < 100; ++rep) {
    const Vec delta = random_simplex(4, rng);
    const Vec back = kappa_to_delta(delta_to_kappa(delta));
    CHECK((back - delta).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("kappa_to_delta rejects non-increasing input") {
  Vec bad(2);
  bad << 1.0, 1.0;
  CHECK_THROWS_AS(kappa_to_delta(bad), std::domain_error);
  bad << 1.0, 0.5;
  CHECK_THROWS_AS(kappa_to_delta(bad), std::domain_error);
}

TEST_CASE("stick round trip on the guarded box") {
  Rng rng(41);
  for (int rep = 0; rep < 200; ++rep) {
    const Index jm1 = 1 + Index(rng.uniform_below(6));
    Vec omega(jm1);
    for (Index j = 0; j < jm1; ++j)
      omega[j] = kOmegaGuard + (1.0 - 2.0 * kOmegaGuard) * rng.uniform();
    const Vec back = delta_to_sticks(sticks_to_delta(omega));
    CHECK((back - omega).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("log_prior_omega worked examples") {
  // J = 2: Beta(1,1) is flat
  Vec w1(1);
  w1 << 0.9;
  CHECK(log_prior_omega(w1) == doctest::Approx(0.0));
  w1 << 0.1;
  CHECK(log_prior_omega(w1) == doctest::Approx(0.0));

  // J = 3 with omega_1 = 0.5: log Beta(0.5 | 1,2) = log 2 + log 0.5 = 0
  Vec w2(2);
  w2 << 0.5, 0.123;
  CHECK(log_prior_omega(w2) == doctest::Approx(0.0).epsilon(1e-14));
  w2 << 0.5, 0.877;
  CHECK(log_prior_omega(w2) == doctest::Approx(0.0).epsilon(1e-14));

  // J = 5 term-by-term hand evaluation
  Vec w4(4);
  w4 << 0.2, 0.25, 1.0 / 3.0, 0.5;
  const double expected = std::log(4.0) + 3.0 * std::log(0.8) + std::log(3.0) +
                          2.0 * std::log(0.75) + std::log(2.0) + std::log(2.0 / 3.0);
  CHECK(log_prior_omega(w4) == doctest::Approx(expected).epsilon(1e-13));
  CHECK(log_prior_omega(w4) == doctest::Approx(1.5277939233935902).epsilon(1e-12));
}

TEST_CASE("boundary omega yields -inf, never NaN") {
  Vec w(3);
  w << 0.5, 1.0, 0.5;
  CHECK(log_prior_omega(w) == -std::numeric_limits<double>::infinity());
  w << 0.0, 0.5, 0.5;
  CHECK(log_prior_omega(w) == -std::numeric_limits<double>::infinity());
  w << 0.5, 0.5, 1.0;  // last term is Beta(1,1); boundary still maps to -inf
  CHECK(log_prior_omega(w) == -std::numeric_limits<double>::infinity());
  CHECK(!std::isnan(log_prior_omega(w)));
}

}  // TEST_SUITE
