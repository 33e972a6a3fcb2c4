#include <doctest.h>

#include "lipc/asplund.hpp"
#include "lipc/lipc_ops.hpp"
#include "support.hpp"

using namespace lipc;
using lipc::testing::model;
using lipc::testing::rel_err;

namespace {

// f with points i0, i1 replaced by a bright and a dark outlier.
ColourImage with_outliers(ColourImage f, std::size_t i0, std::size_t i1) {
  f[i0] = Colour{{250.0, 250.0, 250.0}};
  f[i1] = Colour{{3.0, 3.0, 3.0}};
  return f;
}

}  // namespace

TEST_CASE("colour pair distance examples") {
  const auto& m = model();
  const Colour c{{100.0, 150.0, 80.0}};
  CHECK(colour_pair_distance(m, c, c) <= 1e-9);
  CHECK(colour_pair_distance(m, m.scale(2.0, c), c) <= 1e-8);
  const Colour a{{64.0, 128.0, 192.0}}, b{{128.0, 128.0, 128.0}};
  CHECK(std::abs(colour_pair_distance(m, a, b) - oracle::colour_distance(m, a, b).distance) <= 1e-6);
}

TEST_CASE("image pair distance examples") {
  const auto& m = model();
  Rng rng(41);
  const auto g = oracle::random_image(m, rng, 6, 5);
  CHECK(image_pair_distance(m, g, g).distance <= 1e-9);
  const auto d = image_pair_distance(m, lipc_scalar_mul(m, 0.5, g), g);
  CHECK(d.distance <= 1e-8);
  CHECK(std::abs(d.lambda - 0.5) <= 1e-8);
  CHECK(std::abs(d.mu - 0.5) <= 1e-8);
  CHECK(d.scales.size() == g.size());
  CHECK_THROWS_AS(image_pair_distance(m, g, ColourImage(2, 2)), DataError);
  CHECK_THROWS_AS(image_pair_distance(m, g, g, std::span<const std::size_t>{}), DataError);
  const std::vector<std::size_t> bad{1000};
  CHECK_THROWS_AS(image_pair_distance(m, g, g, bad), DataError);
}

TEST_CASE("image pair distance agrees with the grid oracle") {
  const auto& m = model();
  Rng rng(42);
  for (int i = 0; i < 10; ++i) {
    const auto f = oracle::random_image(m, rng, 8, 1), g = oracle::random_image(m, rng, 8, 1);
    const auto d = image_pair_distance(m, f, g);
    const auto o = oracle::pair_distance(m, f.pixels(), g.pixels());
    CHECK(rel_err(d.lambda, o.lambda) <= 1e-6);
    CHECK(rel_err(d.mu, o.mu) <= 1e-6);
  }
}

TEST_CASE("region restricts the domain") {
  const auto& m = model();
  Rng rng(43);
  const auto f = oracle::random_image(m, rng, 4, 4), g = oracle::random_image(m, rng, 4, 4);
  const std::vector<std::size_t> z{5};
  CHECK(std::abs(image_pair_distance(m, f, g, z).distance - colour_pair_distance(m, f[5], g[5])) <=
        1e-12);
}

TEST_CASE("double-sided probing geometry and ordering") {
  const auto& m = model();
  Rng rng(44);
  for (int i = 0; i < 50; ++i) {
    const auto f = oracle::random_image(m, rng, 3, 3), g = oracle::random_image(m, rng, 3, 3);
    const auto d = image_pair_distance(m, f, g);
    CHECK(d.lambda <= d.mu);
    CHECK(d.distance >= 0.0);
    const auto up = lipc_scalar_mul(m, d.lambda, g), lo = lipc_scalar_mul(m, d.mu, g);
    for (std::size_t p = 0; p < f.size(); ++p)
      for (std::size_t ch = 0; ch < 3; ++ch) {
        CHECK(up[p][ch] >= f[p][ch] - 1e-6);
        CHECK(lo[p][ch] <= f[p][ch] + 1e-6);
      }
  }
}

TEST_CASE("pixelwise d1 and dinf") {
  const auto& m = model();
  Rng rng(45);
  const auto f = oracle::random_image(m, rng, 2, 2), g = oracle::random_image(m, rng, 2, 2);
  const auto z = full_region(f);
  CHECK(pixelwise_d1(m, f, f, z) == 0.0);
  CHECK(pixelwise_dinf(m, f, f, z) == 0.0);
  double sum = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double d = colour_pair_distance(m, f[i], g[i]);
    sum += d;
    mx = std::max(mx, d);
  }
  CHECK(std::abs(pixelwise_d1(m, f, g, z) - sum / 4.0) <= 1e-9);
  CHECK(std::abs(pixelwise_dinf(m, f, g, z) - mx) <= 1e-9);
  CHECK(pixelwise_d1(m, f, g, z) <= pixelwise_dinf(m, f, g, z));
  const std::vector<std::size_t> one{2};
  CHECK(pixelwise_d1(m, f, g, one) == pixelwise_dinf(m, f, g, one));
}

TEST_CASE("tolerance: p = 0 is the exact distance bit for bit") {
  const auto& m = model();
  Rng rng(46);
  for (int i = 0; i < 20; ++i) {
    const auto f = oracle::random_image(m, rng, 5, 2), g = oracle::random_image(m, rng, 5, 2);
    const auto d = image_pair_distance(m, f, g);
    const auto t = image_pair_distance_tol(m, f, g, ToleranceSpec{0.0});
    CHECK(t.distance == d.distance);
    CHECK(t.lambda == d.lambda);
    CHECK(t.mu == d.mu);
    CHECK(t.discarded_low.empty());
  }
}

TEST_CASE("tolerance: monotone in p, bounds tighten") {
  const auto& m = model();
  Rng rng(47);
  for (int i = 0; i < 20; ++i) {
    const auto f = oracle::random_image(m, rng, 5, 4), g = oracle::random_image(m, rng, 5, 4);
    const auto exact = image_pair_distance(m, f, g);
    double prev = exact.distance;
    for (double p : {0.0, 0.05, 0.1, 0.2, 0.5}) {
      const auto t = image_pair_distance_tol(m, f, g, ToleranceSpec{p});
      CHECK(t.distance <= prev);
      CHECK(t.lambda >= exact.lambda);
      CHECK(t.mu <= exact.mu);
      prev = t.distance;
    }
  }
}

TEST_CASE("tolerance: discard counts and errors") {
  CHECK(ToleranceSpec{0.2}.discard_count(10) == 2);
  CHECK(ToleranceSpec{0.07}.discard_count(100) == 7);
  CHECK(ToleranceSpec{2.0 / 256}.discard_count(256) == 2);
  CHECK_THROWS_AS(ToleranceSpec{1.0}.discard_count(10), DataError);
  CHECK_THROWS_AS(ToleranceSpec{-0.1}.discard_count(10), DataError);
  CHECK(ToleranceSpec{0.5}.discard_count(1) == 0);
  CHECK(ToleranceSpec{0.99}.discard_count(100) == 99);
}

TEST_CASE("tolerance: two outliers in a 1-D signal") {
  const auto& m = model();
  // Moderate colours so 1.7 (x) g stays inside the gamut and on the orbit.
  Rng rng(48);
  const auto g = oracle::random_image(m, rng, 10, 1, 0.3, 0.98);
  const auto f_clean = lipc_scalar_mul(m, 1.7, g);
  const auto f = with_outliers(f_clean, 3, 7);
  const double clean = image_pair_distance(m, f_clean, g).distance;
  const double exact = image_pair_distance(m, f, g).distance;
  const auto t = image_pair_distance_tol(m, f, g, ToleranceSpec{0.2});
  CHECK(t.distance < exact);
  CHECK(t.discarded_low.size() == 2);
  CHECK(t.discarded_high.size() == 2);
  CHECK(std::abs(t.distance - clean) <= 1e-6);
  CHECK(std::find(t.discarded_low.begin(), t.discarded_low.end(), 3) != t.discarded_low.end());
  CHECK(std::find(t.discarded_high.begin(), t.discarded_high.end(), 7) != t.discarded_high.end());
}

TEST_CASE("tolerance agrees with the exhaustive discard oracle") {
  const auto& m = model();
  Rng rng(49);
  for (int i = 0; i < 3; ++i) {
    const auto f = oracle::random_image(m, rng, 10, 1), g = oracle::random_image(m, rng, 10, 1);
    const auto t = image_pair_distance_tol(m, f, g, ToleranceSpec{0.2});
    const auto o = oracle::tolerant_distance_exhaustive(m, f.pixels(), g.pixels(), 2);
    CHECK(std::abs(t.distance - o.distance) <= 1e-9);
  }
}

TEST_CASE("slack diagnostics vanish without discards") {
  const auto& m = model();
  Rng rng(50);
  const auto f = oracle::random_image(m, rng, 4, 4), g = oracle::random_image(m, rng, 4, 4);
  const auto t = image_pair_distance_tol(m, f, g, ToleranceSpec{0.0});
  for (double v : t.slack_lambda.v) CHECK(v <= 1e-6);
  for (double v : t.slack_mu.v) CHECK(v <= 1e-6);
  const auto t2 = image_pair_distance_tol(m, with_outliers(f, 0, 1), g, ToleranceSpec{0.2});
  CHECK(std::max({t2.slack_lambda[0], t2.slack_lambda[1], t2.slack_lambda[2]}) > 1.0);
}

TEST_CASE("neighbourhood predicate") {
  const auto& m = model();
  Rng rng(51);
  const auto f = oracle::random_image(m, rng, 4, 4, 0.3, 0.98);
  CHECK(is_neighbour(m, f, f, 1e-3, 0.0));
  CHECK(is_neighbour(m, lipc_scalar_mul(m, 2.0, f), f, 1e-6, 0.0));
  ColourImage g = lipc_scalar_mul(m, 0.8, f);
  g[5] = Colour{{250.0, 10.0, 10.0}};
  CHECK_FALSE(is_neighbour(m, g, f, 1e-6, 0.0));
  CHECK(is_neighbour(m, g, f, 1e-6, 1.0 / 16));
}

TEST_CASE("orbit gap") {
  const auto& m = model();
  const Colour c0{{128.0, 128.0, 128.0}};
  CHECK(orbit_gap(m, c0, c0) <= 1e-9);
  CHECK(orbit_gap(m, c0, m.scale(2.0, c0)) <= 1e-6);
  CHECK(orbit_gap(m, c0, Colour{{128.0, 129.0, 127.0}}) > 0.0);
  CHECK(orbit_gap(m, c0, Colour{{200.0, 50.0, 90.0}}) > 10.0);
}

TEST_CASE("symmetry and triangle inequality are measured, not assumed") {
  const auto& m = model();
  Rng rng(52);
  std::size_t asym = 0, triangle = 0;
  for (int i = 0; i < 300; ++i) {
    const Colour a = oracle::random_colour(m, rng), b = oracle::random_colour(m, rng),
                 c = oracle::random_colour(m, rng);
    const double ab = colour_pair_distance(m, a, b), ba = colour_pair_distance(m, b, a);
    asym += std::abs(ab - ba) > 1e-9;
    triangle += colour_pair_distance(m, a, c) > ab + colour_pair_distance(m, b, c) + 1e-9;
  }
  MESSAGE("asymmetric pairs: " << asym << "/300, triangle violations: " << triangle << "/300");
  CHECK(asym + triangle <= 600);
}
