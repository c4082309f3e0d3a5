#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "difflab/errors.hpp"
#include "difflab/nonlinearity.hpp"
#include "oracles.hpp"

using namespace difflab;

namespace {

double perturbed_big_phi_oracle(double s) {
  const double sign = s >= 1.0 ? 1.0 : -1.0;
  const double lo = std::min(1.0, s), hi = std::max(1.0, s);
  return sign * oracle::romberg(
                    [](double xi) { return (1.0 + 0.25 * std::cos(xi)) / xi; },
                    lo, hi);
}

}  // namespace

TEST_CASE("flux values at reference points") {
  const Nonlinearity lin = make_linear();
  CHECK(lin.phi(0.5) == 0.5);
  CHECK(lin.phi(0.0) == 0.0);
  CHECK(lin.dphi(3.7) == 1.0);

  const Nonlinearity sp = make_sin_perturbed();
  CHECK(sp.phi(M_PI) == doctest::Approx(M_PI).epsilon(1e-15));
  CHECK(sp.phi(0.0) == 0.0);
  CHECK(sp.delta1 == doctest::Approx(0.75));
  CHECK(sp.delta2 == doctest::Approx(1.25));

  const Nonlinearity tb = make_tanh_blend();
  CHECK(tb.phi(0.0) == 0.0);
  CHECK(tb.delta1 == doctest::Approx(1.0));
  CHECK(tb.delta2 == doctest::Approx(1.2));
}

TEST_CASE("family lookup by name") {
  CHECK(nonlinearity_by_name("linear").name == "linear");
  CHECK(nonlinearity_by_name("sin-perturbed").delta2 == doctest::Approx(1.25));
  CHECK(nonlinearity_by_name("tanh-blend").delta1 == doctest::Approx(1.0));
  CHECK_THROWS_AS(nonlinearity_by_name("cubic"), ConfigError);
}

TEST_CASE("invariant audit rejects a flux with phi(0) != 0") {
  Nonlinearity bad;
  bad.name = "shifted";
  bad.phi = [](double s) { return s + 1.0; };
  bad.dphi = [](double) { return 1.0; };
  CHECK_THROWS_AS(validate_invariants(bad), ConfigError);
  CHECK_NOTHROW(validate_invariants(make_sin_perturbed()));
}

TEST_CASE("logarithmic transform against an independent quadrature") {
  Nonlinearity lin = make_linear();
  CHECK(eval_big_phi(lin, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval_big_phi(lin, 1.0) == 0.0);

  lin.closed_form_big_phi = nullptr;  // force the quadrature path
  CHECK(eval_big_phi(lin, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(std::abs(eval_big_phi(lin, 1e-300) - std::log(1e-300)) <= 1e-8);
  CHECK_THROWS_AS(eval_big_phi(lin, 0.0), DomainError);
  CHECK_THROWS_AS(eval_big_phi(lin, -2.0), DomainError);

  const Nonlinearity sp = make_sin_perturbed();
  CHECK(eval_big_phi(sp, 1.0) == 0.0);
  const double ref = perturbed_big_phi_oracle(2.0);
  CHECK(ref == doctest::Approx(0.714541407028419).epsilon(1e-12));
  CHECK(std::abs(eval_big_phi(sp, 2.0) - ref) <= 1e-10);
  for (double s : {0.05, 0.4, 5.0, 40.0})
    CHECK(std::abs(eval_big_phi(sp, s) - perturbed_big_phi_oracle(s)) <= 1e-10);
}

TEST_CASE("inverse transform") {
  const Nonlinearity lin = make_linear();
  CHECK(eval_big_psi(lin, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval_big_psi(lin, -1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-10));

  const Nonlinearity sp = make_sin_perturbed();
  const double root = oracle::bisect(
      [](double s) { return perturbed_big_phi_oracle(s) + 0.8; }, 0.1, 1.0);
  CHECK(eval_big_psi(sp, -0.8) == doctest::Approx(root).epsilon(1e-8));

  for (const Nonlinearity& nl :
       {make_linear(), make_sin_perturbed(), make_tanh_blend()}) {
    for (double y : {-10.0, -3.0, -0.5, 0.0, 0.7, 2.0, 10.0})
      CHECK(std::abs(eval_big_phi(nl, eval_big_psi(nl, y)) - y) <= 1e-8);
  }
}

TEST_CASE("declared derivative bounds audited by sampling") {
  CHECK(validate_bounds(make_linear(), 0.0, 10.0, 100).pass());
  CHECK(validate_bounds(make_sin_perturbed(), 0.0, 10.0, 1000).pass());
  CHECK(validate_bounds(make_tanh_blend(), 0.0, 10.0, 500).pass());

  Nonlinearity wrong = make_sin_perturbed();
  wrong.delta2 = 1.0;  // true slope at 0 is 1.25
  const BoundsReport rep = validate_bounds(wrong, 0.0, 10.0, 1000);
  CHECK_FALSE(rep.pass());
  double nearest = std::numeric_limits<double>::infinity();
  for (const BoundViolation& v : rep.violations)
    nearest = std::min(nearest, v.s);
  CHECK(nearest <= 1.0);
}

TEST_CASE("tabulated transform tracks direct evaluation") {
  const Nonlinearity sp = make_sin_perturbed();
  const TransformTable table = TransformTable::build(sp, 1e-3, 1e3, 600);
  for (double s : {1e-3, 0.02, 0.5, 1.0, 7.0, 999.0}) {
    CHECK(table.eval(s) == doctest::Approx(eval_big_phi(sp, s)).epsilon(1e-6));
    CHECK(table.inverse(table.eval(s)) == doctest::Approx(s).epsilon(1e-6));
  }
}
