#include <doctest.h>

#include "lipc/lip_grey.hpp"
#include "support.hpp"

using namespace lipc;
using namespace lipc::grey;

TEST_CASE("lip_scalar_mul examples") {
  CHECK(lip_scalar_mul(1.0, 100.0) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(std::abs(lip_scalar_mul(2.0, 128.0) - 192.0) <= 1e-12);
  CHECK(std::abs(lip_scalar_mul(0.5, 192.0) - 128.0) <= 1e-12);
  CHECK_THROWS_AS(lip_scalar_mul(0.0, 10.0), std::invalid_argument);
  CHECK(lip_scalar_mul(1e6, 200.0) <= kM - kEps);
}

TEST_CASE("lip_scalar_mul increases with k") {
  double prev = 0.0;
  for (double k = 0.1; k < 10.0; k *= 1.1) {
    const double v = lip_scalar_mul(k, 50.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("grey_critical_scale examples") {
  CHECK(grey_critical_scale(77.0, 77.0) == 1.0);
  CHECK(std::abs(grey_critical_scale(192.0, 128.0) - 2.0) <= 1e-12);
  CHECK(std::abs(grey_critical_scale(128.0, 192.0) - 0.5) <= 1e-12);
}

TEST_CASE("grey_critical_scale inverts lip_scalar_mul") {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const double f = rng.uniform(1.0, 250.0), g = rng.uniform(1.0, 250.0);
    CHECK(std::abs(lip_scalar_mul(grey_critical_scale(f, g), g) - f) <= 1e-9);
  }
}

TEST_CASE("marginal distance examples") {
  Rng rng(22);
  ColourImage g(4, 4);
  for (auto& p : g.pixels())
    for (auto& v : p.v) v = rng.uniform(5.0, 250.0);
  CHECK(marginal_asplund_distance(g, g).distance == 0.0);
  for (double k : {0.1, 0.3, 1.0, 2.5, 10.0}) {
    ColourImage f = g;
    for (auto& p : f.pixels())
      for (auto& v : p.v) v = lip_scalar_mul(k, v);
    // Skip factors that push tones into the clamp.
    bool clamped = false;
    for (const auto& p : f.pixels())
      for (double v : p.v) clamped |= v >= kM - kEps;
    if (clamped) continue;
    CHECK(marginal_asplund_distance(f, g).distance <= 1e-12);
  }
  CHECK_THROWS_AS(marginal_asplund_distance(g, ColourImage(2, 2)), DataError);
  CHECK_THROWS_AS(marginal_asplund_distance(g, g, std::span<const std::size_t>{}), DataError);
}

TEST_CASE("marginal distance: symmetry and oracle") {
  Rng rng(23);
  for (int i = 0; i < 20; ++i) {
    ColourImage f(4, 4), g(4, 4);
    for (auto* img : {&f, &g})
      for (auto& p : img->pixels())
        for (auto& v : p.v) v = rng.uniform(1.0, 255.0);
    const auto d = marginal_asplund_distance(f, g);
    CHECK(std::abs(d.distance - marginal_asplund_distance(g, f).distance) <= 1e-12);
    CHECK(d.lambda >= d.mu);
    if (i < 5) {
      const auto o = oracle::marginal_distance(f.pixels(), g.pixels());
      CHECK(lipc::testing::rel_err(d.lambda, o.lambda) <= 1e-6);
      CHECK(lipc::testing::rel_err(d.mu, o.mu) <= 1e-6);
      CHECK(std::abs(d.distance - o.distance) <= 1e-6);
    }
  }
}
