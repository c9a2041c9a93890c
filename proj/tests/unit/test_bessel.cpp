#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <limits>

#include "nsfsa/common.hpp"
#include "nsfsa/kernels/bessel.hpp"
#include "nsfsa/kernels/matern.hpp"
#include "oracles/bessel_grid.hpp"

using namespace nsfsa;
using nsfsa::test::kBesselGrid;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("bessel_k matches reference grid to 1e-10 relative") {
  for (const auto& c : kBesselGrid) {
    CAPTURE(c.order);
    CAPTURE(c.x);
    CHECK(rel_err(bessel_k(c.order, c.x), c.value) < 1e-10);
  }
}

TEST_CASE("bessel_k isolated reference points") {
  CHECK(rel_err(bessel_k(1.0, 1.0), 0.6019072301972345747) < 1e-12);
  CHECK(rel_err(bessel_k(0.5, 1.0), 0.4610685044478945584) < 1e-12);
  CHECK(rel_err(bessel_k(0.5, 350.0), 6.652076732295959111e-154) < 1e-11);
  CHECK(rel_err(bessel_k(2.3, 699.5), 7.731067184124550662e-306) < 1e-10);
  CHECK(rel_err(bessel_k(1.7, 2.0), 0.2042462642627466994) < 1e-12);
  CHECK(rel_err(bessel_k(0.001, 0.5), 0.9244196365372843267) < 1e-12);
  CHECK(rel_err(bessel_k(3.0, 0.7), 21.97216902565093852) < 1e-11);
}

TEST_CASE("half-integer orders have closed forms") {
  const double pi = std::acos(-1.0);
  for (double x : {0.01, 0.3, 1.0, 1.99, 2.0, 2.01, 7.5, 40.0, 300.0}) {
    CAPTURE(x);
    const double k05 = std::sqrt(pi / (2.0 * x)) * std::exp(-x);
    CHECK(rel_err(bessel_k(0.5, x), k05) < 1e-12);
    CHECK(rel_err(bessel_k(1.5, x), k05 * (1.0 + 1.0 / x)) < 1e-12);
    CHECK(rel_err(bessel_k(2.5, x), k05 * (1.0 + 3.0 / x + 3.0 / (x * x))) < 1e-12);
  }
}

TEST_CASE("bessel_k is continuous across the algorithm switch at x = 2") {
  for (double v : {0.05, 0.37, 1.0, 1.5, 2.2, 2.5}) {
    CAPTURE(v);
    const double lo = bessel_k(v, std::nextafter(2.0, 0.0));
    const double hi = bessel_k(v, 2.0);
    CHECK(rel_err(lo, hi) < 1e-13);
  }
}

TEST_CASE("bessel_k satisfies the three-term recurrence") {
  for (double v : {0.2, 0.9, 1.3}) {
    for (double x : {0.4, 1.8, 2.2, 9.0, 120.0}) {
      CAPTURE(v);
      CAPTURE(x);
      const double lhs = bessel_k(v + 1.0, x) - bessel_k(v - 1.0 < 0 ? 1.0 - v : v - 1.0, x);
      CHECK(rel_err(lhs, 2.0 * v / x * bessel_k(v, x)) < 1e-11);
    }
  }
}

TEST_CASE("bessel_k is positive and decreasing in x") {
  for (double v : {0.01, 0.5, 1.2, 2.5}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double x = 0.01; x < 650.0; x *= 1.37) {
      const double k = bessel_k(v, x);
      CHECK(k > 0.0);
      CHECK(k < prev);
      prev = k;
    }
  }
}

TEST_CASE("bessel_k underflows to zero past x = 700") {
  CHECK(bessel_k(1.0, 700.5) == 0.0);
  CHECK(bessel_k(0.5, 1e4) == 0.0);
  CHECK(bessel_k_scaled(0.5, 1e4) > 0.0);
  const double pi = std::acos(-1.0);
  CHECK(rel_err(bessel_k_scaled(0.5, 1e4), std::sqrt(pi / 2e4)) < 1e-12);
}

TEST_CASE("bessel_k rejects invalid arguments") {
  CHECK_THROWS_AS(bessel_k(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(bessel_k(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(bessel_k(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_k(-0.5, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_k(1.0, std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(bessel_k(std::numeric_limits<double>::infinity(), 1.0), DomainError);
}
