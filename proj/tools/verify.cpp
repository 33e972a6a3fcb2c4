#include "verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "lipc/asplund.hpp"
#include "lipc/contact.hpp"
#include "lipc/errors.hpp"
#include "lipc/lip_grey.hpp"
#include "lipc/lipc_ops.hpp"
#include "oracle.hpp"

namespace lipc::verify {

namespace {

using Pair = std::pair<ColourImage, ColourImage>;

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double rel_err(double a, double ref) {
  if (a == ref) return 0.0;
  return std::abs(a - ref) / std::max(std::abs(ref), std::numeric_limits<double>::min());
}

std::vector<Pair> colour_pairs(const MixingModel& model, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Pair> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Colour f = oracle::random_colour(model, rng);
    const Colour g = oracle::random_colour(model, rng);
    out.emplace_back(ColourImage(1, 1, f), ColourImage(1, 1, g));
  }
  return out;
}

std::vector<Pair> image_pairs(const MixingModel& model, std::size_t n, std::uint64_t seed,
                              std::size_t w = 8, std::size_t h = 1) {
  Rng rng(seed);
  std::vector<Pair> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto f = oracle::random_image(model, rng, w, h);
    auto g = oracle::random_image(model, rng, w, h);
    out.emplace_back(std::move(f), std::move(g));
  }
  return out;
}

Check oracle_suite(const MixingModel& model, const std::vector<Pair>& pairs, const char* what) {
  double worst = 0.0;
  std::size_t unbounded = 0, bad = 0;
  for (const auto& [f, g] : pairs) {
    const auto d = image_pair_distance(model, f, g);
    const auto o = oracle::pair_distance(model, f.pixels(), g.pixels());
    if (o.saturated) {
      // Empty admissible set (e.g. a target brighter than any orbit reaches):
      // the oracle stops at its grid edge, the library must be at or beyond it.
      const bool lam_edge = o.lambda <= oracle::kGridMin, mu_edge = o.mu >= oracle::kGridMax;
      const bool ok = (!lam_edge || d.lambda <= oracle::kGridMin) &&
                      (!mu_edge || d.mu >= oracle::kGridMax) &&
                      (lam_edge || rel_err(d.lambda, o.lambda) <= 1e-6) &&
                      (mu_edge || rel_err(d.mu, o.mu) <= 1e-6);
      ++unbounded;
      bad += !ok;
      continue;
    }
    const double e = std::max(
        {rel_err(d.lambda, o.lambda), rel_err(d.mu, o.mu), rel_err(d.distance, o.distance)});
    worst = std::max(worst, e);
    bad += !(e <= 1e-6);
  }
  Check c;
  c.pass = bad == 0;
  c.detail = std::to_string(pairs.size()) + " " + what + " pairs, worst rel err " + sci(worst) +
             ", " + std::to_string(bad) + " failing, " + std::to_string(unbounded) +
             " with an empty contact set on both sides";
  return c;
}

}  // namespace

Check timed(const std::string& name, const std::function<Check()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.name = name;
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

Colour stable_colour(const MixingModel& model, Rng& rng, const std::vector<double>& alphas) {
  for (;;) {
    const Colour c = oracle::random_colour(model, rng);
    ClampStats s;
    for (double a : alphas) (void)model.scale(a, c, &s);
    if (s.gamut == 0 && s.transmittance == 0) return c;
  }
}

Check model_suite(bool perturb_k) {
  Mat3 k = standard_k();
  if (perturb_k) k[0][0] += 0.01;
  Check c;
  try {
    const MixingModel m(k, standard_u());
    c.pass = true;
    c.detail = "constants accepted";
  } catch (const ModelError& e) {
    c.pass = false;
    c.detail = std::string("construction invariant failed: ") + e.what();
  }
  return c;
}

Check oracle_colour_suite(const MixingModel& model, std::size_t pairs, std::uint64_t seed) {
  return oracle_suite(model, colour_pairs(model, pairs, seed), "colour");
}

Check oracle_image_suite(const MixingModel& model, std::size_t pairs, std::uint64_t seed) {
  return oracle_suite(model, image_pairs(model, pairs, seed), "1x8 image");
}

Check contact_geometry_suite(const MixingModel& model, std::size_t colour_n, std::size_t image_n,
                             std::uint64_t seed) {
  auto pairs = colour_pairs(model, colour_n, seed);
  auto more = image_pairs(model, image_n, seed + 1);
  pairs.insert(pairs.end(), more.begin(), more.end());
  double worst_upper = 0.0, worst_lower = 0.0;
  std::size_t order = 0, empty = 0;
  for (const auto& [f, g] : pairs) {
    const auto d = image_pair_distance(model, f, g);
    order += !(d.lambda <= d.mu);
    // An empty admissible set has no contact to check (lambda, mu at the range ends).
    const bool has_upper = d.lambda > kScaleMin, has_lower = d.mu < kScaleMax;
    empty += !has_upper || !has_lower;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Colour up = model.scale(d.lambda, g[i]);
      const Colour lo = model.scale(d.mu, g[i]);
      for (std::size_t ch = 0; ch < 3; ++ch) {
        if (has_upper) worst_upper = std::max(worst_upper, f[i][ch] - up[ch]);
        if (has_lower) worst_lower = std::max(worst_lower, lo[ch] - f[i][ch]);
      }
    }
  }
  Check c;
  c.pass = worst_upper <= 1e-6 && worst_lower <= 1e-6 && order == 0;
  c.detail = std::to_string(pairs.size()) + " pairs, max(f - lambda g) " + sci(worst_upper) +
             ", max(mu g - f) " + sci(worst_lower) + ", lambda > mu on " +
             std::to_string(order) + ", " + std::to_string(empty) + " with an empty side";
  return c;
}

Check invariance_suite(const MixingModel& model, std::size_t images, std::size_t size,
                       std::uint64_t seed) {
  const std::vector<double> alphas{0.25, 0.5, 2.0, 4.0};
  Rng rng(seed);
  double worst = 0.0;
  std::size_t clamps = 0;
  for (std::size_t i = 0; i < images; ++i) {
    ColourImage f(size, size);
    for (auto& p : f.pixels()) p = stable_colour(model, rng, alphas);
    for (double a : alphas) {
      ClampStats s;
      const auto fa = lipc_scalar_mul(model, a, f, &s);
      clamps += s.gamut + s.transmittance;
      worst = std::max(worst, image_pair_distance(model, fa, f).distance);
    }
  }
  Check c;
  c.pass = worst <= 1e-7 && clamps == 0;
  c.detail = std::to_string(images) + " images " + std::to_string(size) + "x" +
             std::to_string(size) + " x 4 alphas, worst d(a f, f) " + sci(worst);
  return c;
}

Check tolerance_suite(const MixingModel& model, std::size_t pairs, std::uint64_t seed) {
  const double ps[] = {0.0, 0.05, 0.1, 0.2, 0.5};
  std::size_t rises = 0, not_identical = 0;
  for (const auto& [f, g] : image_pairs(model, pairs, seed, 5, 4)) {
    const auto exact = image_pair_distance(model, f, g);
    double prev = std::numeric_limits<double>::infinity();
    for (double p : ps) {
      const auto t = image_pair_distance_tol(model, f, g, ToleranceSpec{p});
      rises += t.distance > prev;
      prev = t.distance;
      if (p == 0.0)
        not_identical +=
            !(t.distance == exact.distance && t.lambda == exact.lambda && t.mu == exact.mu);
    }
  }
  Check c;
  c.pass = rises == 0 && not_identical == 0;
  c.detail = std::to_string(pairs) + " 5x4 pairs, p in {0,.05,.1,.2,.5}: " +
             std::to_string(rises) + " increases, " + std::to_string(not_identical) +
             " p=0 mismatches";
  return c;
}

Check outlier_suite(const MixingModel& model, std::uint64_t seed) {
  Rng rng(seed);
  const auto g = oracle::random_image(model, rng, 10, 1, 0.3, 0.98);
  const auto clean = lipc_scalar_mul(model, 1.7, g);
  auto f = clean;
  f[3] = Colour{{250.0, 250.0, 250.0}};
  f[7] = Colour{{3.0, 3.0, 3.0}};
  const double d_clean = image_pair_distance(model, clean, g).distance;
  const double d_exact = image_pair_distance(model, f, g).distance;
  const auto t = image_pair_distance_tol(model, f, g, ToleranceSpec{0.2});
  const auto o = oracle::tolerant_distance_exhaustive(model, f.pixels(), g.pixels(), 2);
  const double e_clean = std::abs(t.distance - d_clean);
  const double e_oracle = std::abs(t.distance - o.distance);
  Check c;
  c.pass = e_clean <= 1e-6 && e_oracle <= 1e-9;
  c.detail = "outliers lift d to " + sci(d_exact) + "; p=0.2 gives " + sci(t.distance) +
             ", |.-clean| " + sci(e_clean) + ", |.-exhaustive| " + sci(e_oracle);
  return c;
}

Check marginal_suite(std::size_t pairs, std::uint64_t seed) {
  const auto& model = make_mixing_model();
  double asym = 0.0, worst = 0.0;
  for (const auto& [f, g] : image_pairs(model, pairs, seed)) {
    const auto d = grey::marginal_asplund_distance(f, g);
    asym = std::max(asym, std::abs(d.distance - grey::marginal_asplund_distance(g, f).distance));
    const auto o = oracle::marginal_distance(f.pixels(), g.pixels());
    worst = std::max(worst, rel_err(d.distance, o.distance));
  }
  const double k = grey::grey_critical_scale(192.0, 128.0);
  Check c;
  c.pass = asym <= 1e-12 && worst <= 1e-6 && std::abs(k - 2.0) <= 1e-12;
  c.detail = std::to_string(pairs) + " pairs, asymmetry " + sci(asym) + ", worst rel err " +
             sci(worst) + ", critical_scale(192,128)-2 = " + sci(k - 2.0);
  return c;
}

Check algebra_suite(const MixingModel& model, std::size_t colours, std::uint64_t seed) {
  Rng rng(seed);
  // Moderate transmittances keep sums and products inside the gamut.
  const std::size_t w = 25, h = (colours + w - 1) / w;
  const auto f = oracle::random_image(model, rng, w, h, 0.5, 0.98);
  const auto g = oracle::random_image(model, rng, w, h, 0.5, 0.98);
  const auto k = oracle::random_image(model, rng, w, h, 0.5, 0.98);
  const auto diff = [](const ColourImage& a, const ColourImage& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t ch = 0; ch < 3; ++ch) d = std::max(d, std::abs(a[i][ch] - b[i][ch]));
    return d;
  };
  const double comm = diff(lipc_add(model, f, g), lipc_add(model, g, f));
  const double assoc = diff(lipc_add(model, lipc_add(model, f, g), k),
                            lipc_add(model, f, lipc_add(model, g, k)));
  const double neutral = diff(lipc_add(model, f, white_neutral(model, w, h)), f);
  double comp = 0.0;
  for (auto [a, b] : {std::pair{0.5, 0.5}, {3.0, 0.7}, {1.3, 1.9}})
    comp = std::max(comp, diff(lipc_scalar_mul(model, a, lipc_scalar_mul(model, b, f)),
                               lipc_scalar_mul(model, a * b, f)));

  // k -> K^-1 U t^k on a log grid over [0.25, 4], before any clamping.
  constexpr int kSteps = 41;
  std::size_t non_monotone = 0;
  std::string example;
  for (std::size_t i = 0; i < colours; ++i) {
    const Colour c = oracle::random_colour(model, rng);
    const Transmittance t = model.to_transmittance(c);
    Colour prev{};
    bool ok = true;
    for (int s = 0; s < kSteps && ok; ++s) {
      const double kk = 0.25 * std::pow(16.0, double(s) / (kSteps - 1));
      const Colour cur = model.mix({{std::pow(t[0], kk), std::pow(t[1], kk), std::pow(t[2], kk)}});
      if (s > 0)
        for (std::size_t ch = 0; ch < 3; ++ch) ok &= cur[ch] < prev[ch];
      prev = cur;
    }
    if (!ok && example.empty())
      example = " (first: t = " + sci(t[0]) + "," + sci(t[1]) + "," + sci(t[2]) + ")";
    non_monotone += !ok;
  }
  Check c;
  c.pass = comm <= 1e-9 && assoc <= 1e-9 && neutral <= 1e-6 && comp <= 1e-9 && non_monotone == 0;
  c.detail = "comm " + sci(comm) + ", assoc " + sci(assoc) + ", neutral " + sci(neutral) +
             ", composition " + sci(comp) + ", k->k(x)C not strictly decreasing on " +
             std::to_string(non_monotone) + "/" + std::to_string(colours) + " colours" + example;
  return c;
}

std::vector<Check> run_verify(bool quick, bool perturb_k) {
  std::vector<Check> out;
  out.push_back(timed("model", [&] { return model_suite(perturb_k); }));
  if (!out.back().pass) return out;
  const auto& m = make_mixing_model();
  const std::size_t colour_n = quick ? 50 : 1000, image_n = quick ? 10 : 100;
  out.push_back(timed("oracle-colour", [&] { return oracle_colour_suite(m, colour_n, 101); }));
  out.push_back(timed("oracle-image", [&] { return oracle_image_suite(m, image_n, 102); }));
  out.push_back(timed("oracle-marginal", [&] { return marginal_suite(image_n, 103); }));
  out.push_back(timed("contact-geometry",
                      [&] { return contact_geometry_suite(m, colour_n, image_n, 104); }));
  out.push_back(timed("invariance", [&] {
    return invariance_suite(m, quick ? 2 : 20, quick ? 16 : 32, 105);
  }));
  out.push_back(timed("tolerance-monotonicity",
                      [&] { return tolerance_suite(m, quick ? 10 : 50, 106); }));
  out.push_back(timed("tolerance-outliers", [&] { return outlier_suite(m, 48); }));
  return out;
}

}  // namespace lipc::verify
