#include <doctest.h>

#include "lipc/asplund.hpp"
#include "lipc/contact.hpp"
#include "lipc/lipc_ops.hpp"
#include "support.hpp"

using namespace lipc;
using lipc::testing::model;
using lipc::testing::rel_err;

TEST_CASE("IntervalSet") {
  IntervalSet s;
  CHECK(s.empty());
  s.push({1.0, 2.0});
  s.push({2.0, 3.0});  // touching: merged
  CHECK(s.size() == 1);
  s.push({5.0, 6.0});
  CHECK(s.size() == 2);
  CHECK(s.inf() == 1.0);
  CHECK(s.sup() == 6.0);
  CHECK(s.contains(2.5));
  CHECK_FALSE(s.contains(4.0));
  const IntervalSet t = s.intersect(IntervalSet(Interval{2.5, 5.5}));
  REQUIRE(t.size() == 2);
  CHECK(t[0].lo == 2.5);
  CHECK(t[0].hi == 3.0);
  CHECK(t[1].lo == 5.0);
  CHECK(t[1].hi == 5.5);
  CHECK(IntervalSet::all().is_initial_segment());
  CHECK(IntervalSet::all().is_final_segment());
}

TEST_CASE("IntervalSet: intervals meeting at one k up to root error") {
  const IntervalSet a(Interval{1.0, 4.0});
  const IntervalSet touch = a.intersect(IntervalSet(Interval{4.0 * (1.0 + 2e-10), 9.0}));
  REQUIRE(touch.size() == 1);
  CHECK(touch[0].lo == touch[0].hi);
  CHECK(std::abs(touch[0].lo - 4.0) <= 1e-9);
  CHECK(a.intersect(IntervalSet(Interval{4.0 * (1.0 + 1e-6), 9.0})).empty());
}

TEST_CASE("isolated contacts survive across points") {
  // Orbits still rising in one channel at k = alpha make k = alpha an isolated
  // point of each lower set; the sweep must still see all of them coincide.
  const auto& m = model();
  const Colour c = m.mix(Transmittance{{0.888884, 0.974244, 0.129141}});
  const Colour c2 = m.mix(Transmittance{{0.892398, 0.97594, 0.0899094}});
  const ColourImage g(2, 1, std::vector<Colour>{c, c2});
  const ColourImage f = lipc_scalar_mul(m, 4.0, g);
  const auto pcs = point_contacts(m, f, g, std::vector<std::size_t>{0, 1});
  const Sandwich s = sandwich(pcs, 0);
  CHECK(rel_err(s.lambda, 4.0) <= 1e-9);
  CHECK(rel_err(s.mu, 4.0) <= 1e-9);
}

TEST_CASE("critical scale: round trip and identity") {
  const auto& m = model();
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const Colour c = oracle::random_colour(m, rng, 0.2, 0.98);
    const Colour c3 = m.scale(3.0, c);
    for (Channel ch : kChannels) {
      const double k = lipc_critical_scale(m, c, c3[ch], ch);
      // The smallest crossing; a non-monotone orbit may cross earlier.
      if (ScaleCurve(m, m.to_transmittance(c), ch).monotone()) CHECK(std::abs(k - 3.0) <= 1e-8);
    }
  }
  const Colour grey{{128.0, 128.0, 128.0}};
  const double r = m.scale(1.0, grey)[0];
  CHECK(std::abs(lipc_critical_scale(m, grey, r, Channel::R) - 1.0) <= 1e-10);
}

TEST_CASE("critical scale agrees with the grid oracle") {
  const auto& m = model();
  const Colour probe{{200.0, 60.0, 60.0}};
  const double k = lipc_critical_scale(m, probe, 100.0, Channel::R);
  CHECK(rel_err(k, oracle::critical_scale(m, probe, 100.0, 0)) <= 1e-6);
  Rng rng(32);
  for (int i = 0; i < 20; ++i) {
    const Colour p = oracle::random_colour(m, rng);
    const double target = rng.uniform(5.0, 250.0);
    for (std::size_t ch = 0; ch < 3; ++ch)
      CHECK(rel_err(lipc_critical_scale(m, p, target, kChannels[ch]),
                    oracle::critical_scale(m, p, target, ch)) <= 1e-6);
  }
}

TEST_CASE("contact sets bracket the target on every channel") {
  const auto& m = model();
  Rng rng(33);
  for (int i = 0; i < 300; ++i) {
    const Colour g = oracle::random_colour(m, rng, 0.02, 0.98);
    const Colour f = oracle::random_colour(m, rng, 0.02, 0.98);
    const ProbeColour probe(m, g);
    for (Channel ch : kChannels) {
      const ScaleCurve& curve = probe.curve(ch);
      const ChannelContact cc = curve.contact(f[ch]);
      for (std::size_t r = 0; r < cc.root_count; ++r)
        CHECK(std::abs(curve.value(cc.roots[r]) - f[ch]) <= 1e-6 * std::max(1.0, f[ch]));
      // Sample the sets on a grid: membership must match the sign.
      for (double k = 1e-3; k < 1e3; k *= 1.37) {
        const double v = curve.value(k) - f[ch];
        if (std::abs(v) < 1e-6) continue;
        CHECK(cc.at_or_above.contains(k) == (v > 0.0));
        CHECK(cc.at_or_below.contains(k) == (v < 0.0));
      }
    }
  }
}

TEST_CASE("turning points are stationary") {
  const auto& m = model();
  Rng rng(34);
  std::size_t non_monotone = 0;
  for (int i = 0; i < 2000; ++i) {
    const ProbeColour probe(m, oracle::random_colour(m, rng));
    for (Channel ch : kChannels) {
      const auto& curve = probe.curve(ch);
      for (double k : curve.turning_points()) {
        ++non_monotone;
        const double scale = std::abs(curve.slope(k * 1.01)) + std::abs(curve.slope(k * 0.99));
        CHECK(std::abs(curve.slope(k)) <= 1e-6 * scale + 1e-12);
      }
    }
  }
  CHECK(non_monotone > 0);  // the orbit is not always monotone
}

TEST_CASE("equal colours contact at exactly 1") {
  const auto& m = model();
  const Colour c{{90.0, 140.0, 60.0}};
  const PointContact pc = point_contact(ProbeColour(m, c), c);
  CHECK(pc.k_lambda() == 1.0);
  CHECK(pc.k_mu() == 1.0);
}

TEST_CASE("sandwich order statistics") {
  // Synthetic monotone contacts: upper [kmin, a_i], lower [b_i, kmax].
  std::vector<PointContact> pts(5);
  const double a[] = {0.5, 0.2, 0.9, 0.4, 0.7};
  const double b[] = {1.5, 2.5, 1.1, 3.0, 1.2};
  for (std::size_t i = 0; i < 5; ++i) {
    pts[i].upper.push({kScaleMin, a[i]});
    pts[i].lower.push({b[i], kScaleMax});
  }
  Sandwich s0 = sandwich(pts, 0);
  CHECK(s0.lambda == 0.2);
  CHECK(s0.mu == 3.0);
  Sandwich s1 = sandwich(pts, 1);
  CHECK(s1.lambda == 0.4);
  CHECK(s1.mu == 2.5);
  Sandwich s2 = sandwich(pts, 2);
  CHECK(s2.lambda == 0.5);
  CHECK(s2.mu == 1.5);
  CHECK_THROWS(sandwich(pts, 5));
  CHECK_THROWS(sandwich(std::span<const PointContact>{}, 0));
}

TEST_CASE("sandwich with split admissible sets") {
  // Point 0 admits [kmin,0.3] u [2,5]; point 1 admits [kmin, 4].
  std::vector<PointContact> pts(2);
  pts[0].upper.push({kScaleMin, 0.3});
  pts[0].upper.push({2.0, 5.0});
  pts[1].upper.push({kScaleMin, 4.0});
  pts[0].lower.push({6.0, kScaleMax});
  pts[1].lower.push({5.0, kScaleMax});
  const Sandwich s = sandwich(pts, 0);
  CHECK(s.lambda == 4.0);
  CHECK(s.mu == 6.0);
  const Sandwich s1 = sandwich(pts, 1);
  CHECK(s1.lambda == 5.0);
  CHECK(s1.mu == 5.0);
}
