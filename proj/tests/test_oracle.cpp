#include <random>

#include "doctest.h"
#include "nwise/bounds.hpp"
#include "nwise/oracle.hpp"

using namespace nwise;

TEST_CASE("a family member passes verification") {
  const auto p = to_exact(MarginalProfile::from_raw(std::vector<double>{0.4, 0.1, 0.3, 0.2}));
  const auto report = verify_measure(build_measure(p, s_interval(p).s_min), p);
  CHECK(report.passed());
  CHECK(report.lemma_violations.empty());
  CHECK(report.normalization_residual == 0);
  CHECK(report.min_atom == 0);
  CHECK(report.independence_order == 3);
  CHECK(report.max_product_rule_residual == 0);
}

TEST_CASE("a broken measure is caught") {
  const auto p = MarginalProfile::from_raw(std::vector<double>{0.2, 0.3, 0.4});
  auto measure = build_measure(p, 0.0);
  measure.atoms[1] += 0.01;
  measure.atoms[6] -= 0.01;
  const auto report = verify_measure(measure, p);
  CHECK_FALSE(report.passed());
  // Moving mass from {2,3} to {1} keeps the total but breaks marginals
  // and the kernel condition.
  std::vector<std::string> checks;
  for (const auto& v : report.lemma_violations) checks.push_back(v.check);
  CHECK(std::find(checks.begin(), checks.end(), "marginal") != checks.end());
  CHECK(std::find(checks.begin(), checks.end(), "kernel") != checks.end());
  CHECK(report.independence_order == 0);

  auto negative = build_measure(p, 0.0);
  negative.atoms[0] = -0.5;
  CHECK_FALSE(verify_measure(negative, p).passed());
}

TEST_CASE("kernel of the homogeneous system") {
  for (std::size_t n = 1; n <= 10; ++n) {
    CHECK(verify_kernel(n, 0.25));
    CHECK(verify_kernel(n, Rational(-3, 7)));
  }
  std::vector<double> v(8, 0.0);
  v[0] = 1.0;
  CHECK_FALSE(verify_kernel_vector<double>(v, 3));
  CHECK_THROWS_AS(verify_kernel_vector<double>(v, 4), ValidationError);
}

TEST_CASE("extremal atoms") {
  const auto p = MarginalProfile::from_raw(std::vector<double>{0.6, 0.7, 0.8});
  const auto check = verify_extremal_atoms(p);
  CHECK(static_cast<bool>(check));
  CHECK(check.odd_argmin == SubsetMask::of({1}));
  CHECK(check.odd_min == doctest::Approx(0.036));
  CHECK(check.even_argmin == SubsetMask(0));
  CHECK(check.even_min == doctest::Approx(0.024));

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = to_exact(MarginalProfile::from_raw(
        random_decimal_marginals(rng, 1 + static_cast<std::size_t>(trial % 10))));
    CHECK(static_cast<bool>(verify_extremal_atoms(q)));
    const std::size_t pp = invariant_p(q);
    const std::size_t mm = invariant_m(q);
    CHECK((mm == pp || mm == pp + 1));
  }
}

TEST_CASE("sharpness scan finds the closed-form extremes at the endpoints") {
  const auto p = MarginalProfile::from_raw(std::vector<double>(8, 0.4));
  const auto scan = scan_sharpness(p, 5);
  const auto r = sharp_bounds(p, 5);
  CHECK(scan.grid_points == kDefaultGridPoints);
  CHECK(scan.empirical_min == doctest::Approx(r.sharp_lower).epsilon(1e-12));
  CHECK(scan.empirical_max == doctest::Approx(r.sharp_upper).epsilon(1e-12));
  CHECK(scan.argmin_s == s_interval(p).s_max);
  CHECK(scan.argmax_s == s_interval(p).s_min);

  const auto e = to_exact(MarginalProfile::from_raw(std::vector<double>{0.15, 0.5, 0.55, 0.8}));
  for (long k = 1; k <= 4; ++k) {
    const auto es = scan_sharpness(e, k, 11);
    const auto er = sharp_bounds(e, k);
    CHECK(es.empirical_min == er.sharp_lower);
    CHECK(es.empirical_max == er.sharp_upper);
  }
}

TEST_CASE("s grid keeps both endpoints") {
  SInterval<Rational> interval{Rational(-1, 3), Rational(2, 7), 0, 0, false};
  const auto grid = s_grid(interval, 11);
  CHECK(grid.front() == Rational(-1, 3));
  CHECK(grid.back() == Rational(2, 7));
  CHECK_THROWS_AS(s_grid(interval, 1), ValidationError);
}

TEST_CASE("random decimal marginals are reproducible") {
  std::mt19937_64 a(99), b(99);
  CHECK(random_decimal_marginals(a, 10) == random_decimal_marginals(b, 10));
  std::mt19937_64 c(1);
  for (double v : random_decimal_marginals(c, 100)) {
    Rational r;
    CHECK(exact_rational(v, r));
  }
}
