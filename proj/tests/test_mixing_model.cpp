#include <doctest.h>

#include "lipc/lipc_ops.hpp"
#include "support.hpp"

using namespace lipc;
using lipc::testing::max_abs_diff;
using lipc::testing::model;

TEST_CASE("standard constants are embedded verbatim") {
  const auto& m = model();
  CHECK(m.M() == 256.0);
  CHECK(m.U()[0][0] == 25.0440);
  CHECK(m.K()[0][0] == 0.6991);
  CHECK(m.U()[2][2] == 5.7583);
  CHECK(m.K()[2][1] == 0.0002);
}

TEST_CASE("inverses are exact to 1e-12") {
  const auto& m = model();
  const Mat3 ik = mat_mul(m.K_inv(), m.K());
  const Mat3 iu = mat_mul(m.U_inv(), m.U());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(ik[i][j] - (i == j)) <= 1e-12);
      CHECK(std::abs(iu[i][j] - (i == j)) <= 1e-12);
    }
}

TEST_CASE("U rows sum to 255") {
  for (const auto& row : model().U()) CHECK(std::abs(row[0] + row[1] + row[2] - 255.0) <= 1e-3);
}

TEST_CASE("A = K^-1 U regression constants") {
  // A is not entrywise positive: each row has one negative coefficient.
  const auto& a = model().to_gamut();
  double mn = a[0][0];
  for (const auto& row : a)
    for (double v : row) mn = std::min(mn, v);
  CHECK(mn == doctest::Approx(-12.477900962704128).epsilon(1e-12));
  for (const auto& row : a) {
    int negatives = 0;
    for (double v : row) negatives += v < 0.0;
    CHECK(negatives == 1);
    CHECK(row[0] + row[1] + row[2] == doctest::Approx(255.05).epsilon(1e-3));
  }
}

TEST_CASE("corrupted constants are rejected") {
  Mat3 k = standard_k();
  k[0][0] += 0.05;  // breaks the row sum
  CHECK_THROWS_AS(MixingModel(k, standard_u()), ModelError);
  Mat3 singular = standard_k();
  singular[1] = singular[0];
  CHECK_THROWS_AS(MixingModel(singular, standard_u()), ModelError);
}

TEST_CASE("to_transmittance examples") {
  const auto& m = model();
  SUBCASE("near white") {
    const auto t = m.to_transmittance(Colour{{255.9, 255.9, 255.9}});
    for (double v : t.v) CHECK(v >= 0.99);
  }
  SUBCASE("near black clamps to eps_t") {
    const double e = m.eps_gamut();
    const auto t = m.to_transmittance(Colour{{e, e, e}});
    for (double v : t.v) CHECK(v < 1e-4);
  }
  SUBCASE("a near-zero transmittance clamps and is counted") {
    ClampStats s;
    (void)m.to_transmittance(m.mix(Transmittance{{1e-8, 0.9, 0.9}}), &s);
    CHECK(s.transmittance == 1);
  }
}

TEST_CASE("from_transmittance examples") {
  const auto& m = model();
  const double hi = m.transmittance_hi();
  const Colour w = m.from_transmittance(Transmittance{{hi, hi, hi}});
  for (double v : w.v) CHECK(v == doctest::Approx(255.0).epsilon(5e-4));
  const Colour grey{{128.0, 128.0, 128.0}};
  CHECK(max_abs_diff(m.from_transmittance(m.to_transmittance(grey)), grey) <= 1e-9);
  const double lo = m.transmittance_lo();
  const Colour b = m.from_transmittance(Transmittance{{lo, lo, lo}});
  for (double v : b.v) CHECK(v < 0.01);
}

TEST_CASE("round trip when nothing clamps") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Colour c = oracle::random_colour(model(), rng);
    CHECK(max_abs_diff(model().from_transmittance(model().to_transmittance(c)), c) <= 1e-9);
  }
}

TEST_CASE("addition: commutative, associative, neutral") {
  // Moderate transmittances keep every sum inside the gamut.
  Rng rng(12);
  const auto& m = model();
  const auto f = oracle::random_image(m, rng, 8, 8, 0.5, 0.98);
  const auto g = oracle::random_image(m, rng, 8, 8, 0.5, 0.98);
  const auto h = oracle::random_image(m, rng, 8, 8, 0.5, 0.98);
  CHECK(lipc_add(m, f, g) == lipc_add(m, g, f));
  CHECK(max_abs_diff(lipc_add(m, lipc_add(m, f, g), h), lipc_add(m, f, lipc_add(m, g, h))) <= 1e-9);
  CHECK(max_abs_diff(lipc_add(m, f, white_neutral(m, 8, 8)), f) <= 1e-6);
  CHECK_THROWS_AS(lipc_add(m, f, ColourImage(4, 4)), DataError);
}

TEST_CASE("f + f is darker for moderate transmittances") {
  // Not universal for saturated colours (A has negative entries); holds here.
  Rng rng(13);
  const auto& m = model();
  const auto f = oracle::random_image(m, rng, 16, 16, 0.2, 0.98);
  const auto ff = lipc_add(m, f, f);
  std::size_t darker = 0;
  for (std::size_t i = 0; i < f.size(); ++i)
    darker += (ff[i][0] <= f[i][0] + 1e-9 && ff[i][1] <= f[i][1] + 1e-9 && ff[i][2] <= f[i][2] + 1e-9);
  CHECK(darker == f.size());
}

TEST_CASE("f + f darker fails on a saturated colour") {
  const auto& m = model();
  const Colour c = m.mix(Transmittance{{0.005, 0.995, 0.5}});
  const Colour cc = m.add(c, c);
  CHECK((cc[0] > c[0] || cc[1] > c[1] || cc[2] > c[2]));
}

TEST_CASE("scalar multiplication laws") {
  Rng rng(14);
  const auto& m = model();
  const auto f = oracle::random_image(m, rng, 8, 8);
  CHECK(max_abs_diff(lipc_scalar_mul(m, 1.0, f), f) <= 1e-12);
  CHECK(max_abs_diff(lipc_scalar_mul(m, 2.0, f), lipc_add(m, f, f)) <= 1e-9);
  CHECK(max_abs_diff(lipc_scalar_mul(m, 0.5, lipc_scalar_mul(m, 0.5, f)),
                     lipc_scalar_mul(m, 0.25, f)) <= 1e-9);
  CHECK(max_abs_diff(lipc_scalar_mul(m, 3.0, lipc_scalar_mul(m, 0.7, f)),
                     lipc_scalar_mul(m, 2.1, f)) <= 1e-9);
  CHECK_THROWS_AS(lipc_scalar_mul(m, 0.0, f), std::invalid_argument);
  CHECK_THROWS_AS(lipc_scalar_mul(m, -1.0, f), std::invalid_argument);
}

TEST_CASE("scalar multiplication darkens moderate colours monotonically") {
  Rng rng(15);
  const auto& m = model();
  for (int i = 0; i < 200; ++i) {
    const Colour c = oracle::random_colour(m, rng, 0.2, 0.98);
    const Colour a = m.scale(0.8, c), b = m.scale(1.25, c);
    for (std::size_t ch = 0; ch < 3; ++ch) CHECK(b[ch] < a[ch]);
  }
}

TEST_CASE("clamping counts") {
  const auto& m = model();
  ClampStats s;
  const Colour c = m.clamp_gamut(Colour{{-3.0, 100.0, 300.0}}, &s);
  CHECK(c[0] == m.gamut_lo());
  CHECK(c[2] == m.gamut_hi());
  CHECK(s.gamut == 1);
  ColourImage img(2, 1);
  img[0] = m.mix(Transmittance{{1e-8, 0.9, 0.9}});
  img[1] = Colour{{128.0, 128.0, 128.0}};
  CHECK(count_transmittance_clamps(m, img) == 1);
}

TEST_CASE("ColourImage basics") {
  CHECK_THROWS_AS(ColourImage(0, 3), DataError);
  CHECK_THROWS_AS(ColourImage(2, 2, std::vector<Colour>(3)), DataError);
  ColourImage img(4, 3);
  img.at(2, 1) = Colour{{1, 2, 3}};
  const auto c = img.crop(1, 1, 2, 2);
  CHECK(c.width() == 2);
  CHECK(c.at(1, 0) == Colour{{1, 2, 3}});
  CHECK_THROWS_AS(img.crop(3, 0, 2, 1), DataError);
  CHECK(full_region(img).size() == 12);
}
