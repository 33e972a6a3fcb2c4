#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace lipc::oracle {

namespace {

const double kLogMin = std::log(kGridMin);
const double kLogStep = (std::log(kGridMax) - std::log(kGridMin)) / double(kGridSize - 1);

struct Prepared {
  std::vector<std::array<double, 3>> log_t;  // ln t per point
  std::vector<Colour> f;
};

Prepared prepare(const MixingModel& model, std::span<const Colour> f, std::span<const Colour> g) {
  Prepared p;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Transmittance t = model.to_transmittance(g[i]);
    p.log_t.push_back({std::log(t[0]), std::log(t[1]), std::log(t[2])});
    p.f.push_back(f[i]);
  }
  return p;
}

double value(const MixingModel& model, const std::array<double, 3>& lt, std::size_t ch, double k) {
  const auto& a = model.to_gamut();
  return a[ch][0] * std::exp(k * lt[0]) + a[ch][1] * std::exp(k * lt[1]) +
         a[ch][2] * std::exp(k * lt[2]);
}

// The grid is evaluated a block at a time so the exp loops vectorise.
constexpr std::size_t kBlock = 512;
// exp() leaves its fast path on underflow; anything below this is 0 for our
// comparisons anyway.
constexpr double kExpFloor = -700.0;
using BlockPred = std::function<void(const double* ks, std::size_t n, unsigned char* ok)>;

const std::vector<double>& grid() {
  static const std::vector<double> g = [] {
    std::vector<double> v(kGridSize);
    for (std::size_t i = 0; i < kGridSize; ++i) v[i] = std::exp(kLogMin + kLogStep * double(i));
    v.front() = kGridMin;
    v.back() = kGridMax;
    return v;
  }();
  return g;
}

// Every channel of every point (outside `skip`) on the requested side of f.
BlockPred orbit_pred(const MixingModel& model, const Prepared& p, bool above,
                     std::uint64_t skip = 0) {
  return [&model, &p, above, skip](const double* ks, std::size_t n, unsigned char* ok) {
    const auto& a = model.to_gamut();
    double e[3][kBlock];
    std::fill(ok, ok + n, 1);
    for (std::size_t i = 0; i < p.f.size(); ++i) {
      if (skip >> i & 1) continue;
      for (std::size_t j = 0; j < 3; ++j) {
        const double lt = p.log_t[i][j];
        for (std::size_t b = 0; b < n; ++b) e[j][b] = std::exp(std::max(ks[b] * lt, kExpFloor));
      }
      std::size_t alive = 0;
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const double f = p.f[i][ch];
        for (std::size_t b = 0; b < n; ++b) {
          const double v = a[ch][0] * e[0][b] + a[ch][1] * e[1][b] + a[ch][2] * e[2][b];
          ok[b] &= static_cast<unsigned char>(above ? v >= f : v <= f);
        }
      }
      for (std::size_t b = 0; b < n; ++b) alive += ok[b];
      if (alive == 0) return;
    }
  };
}

bool at(const BlockPred& pred, double k) {
  unsigned char ok = 0;
  pred(&k, 1, &ok);
  return ok != 0;
}

// Refine the flip of pred between k_true and k_false (either order) by
// bisection in log k.
double refine(const BlockPred& pred, double k_true, double k_false) {
  double a = std::log(k_true), b = std::log(k_false);
  for (int it = 0; it < 80; ++it) {
    const double m = 0.5 * (a + b);
    if (at(pred, std::exp(m))) a = m; else b = m;
  }
  return std::exp(a);
}

// Largest grid k with pred(k), scanning down from the top, then refined.
double scan_sup(const BlockPred& pred, bool& saturated) {
  const auto& g = grid();
  unsigned char ok[kBlock];
  for (std::size_t hi = kGridSize; hi > 0;) {
    const std::size_t lo = hi > kBlock ? hi - kBlock : 0;
    pred(g.data() + lo, hi - lo, ok);
    for (std::size_t b = hi - lo; b-- > 0;) {
      if (!ok[b]) continue;
      const std::size_t i = lo + b;
      if (i + 1 == kGridSize) {
        saturated = true;
        return kGridMax;
      }
      return refine(pred, g[i], g[i + 1]);
    }
    hi = lo;
  }
  saturated = true;
  return kGridMin;
}

// Smallest grid k with pred(k), scanning up from the bottom, then refined.
double scan_inf(const BlockPred& pred, bool& saturated) {
  const auto& g = grid();
  unsigned char ok[kBlock];
  for (std::size_t lo = 0; lo < kGridSize;) {
    const std::size_t hi = std::min(kGridSize, lo + kBlock);
    pred(g.data() + lo, hi - lo, ok);
    for (std::size_t b = 0; b < hi - lo; ++b) {
      if (!ok[b]) continue;
      const std::size_t i = lo + b;
      if (i == 0) {
        saturated = true;
        return kGridMin;
      }
      return refine(pred, g[i], g[i - 1]);
    }
    lo = hi;
  }
  saturated = true;
  return kGridMax;
}

double lipc_distance(double lambda, double mu) { return mu >= lambda ? std::log(mu / lambda) : 0.0; }

}  // namespace

double grid_k(std::size_t i) { return grid()[i]; }

double orbit_value(const MixingModel& model, const Transmittance& t, std::size_t ch, double k) {
  return value(model, {std::log(t[0]), std::log(t[1]), std::log(t[2])}, ch, k);
}

double critical_scale(const MixingModel& model, const Colour& probe, double target,
                      std::size_t ch) {
  const Transmittance t = model.to_transmittance(probe);
  const std::array<double, 3> lt{std::log(t[0]), std::log(t[1]), std::log(t[2])};
  const bool first = value(model, lt, ch, kGridMin) >= target;
  const BlockPred flipped = [&](const double* ks, std::size_t n, unsigned char* ok) {
    for (std::size_t b = 0; b < n; ++b)
      ok[b] = static_cast<unsigned char>((value(model, lt, ch, ks[b]) >= target) != first);
  };
  bool saturated = false;
  const double k = scan_inf(flipped, saturated);
  if (saturated) return first ? kGridMax : kGridMin;
  return k;
}

Bounds pair_distance(const MixingModel& model, std::span<const Colour> f,
                     std::span<const Colour> g) {
  const Prepared p = prepare(model, f, g);
  Bounds b;
  b.lambda = scan_sup(orbit_pred(model, p, true), b.saturated);
  b.mu = scan_inf(orbit_pred(model, p, false), b.saturated);
  b.distance = lipc_distance(b.lambda, b.mu);
  return b;
}

Bounds colour_distance(const MixingModel& model, const Colour& f, const Colour& g) {
  return pair_distance(model, std::span<const Colour>(&f, 1), std::span<const Colour>(&g, 1));
}

Bounds tolerant_distance_exhaustive(const MixingModel& model, std::span<const Colour> f,
                                    std::span<const Colour> g, std::size_t discard) {
  const std::size_t n = f.size();
  if (n > 63 || discard >= n) throw std::invalid_argument("exhaustive oracle: bad size");
  const Prepared p = prepare(model, f, g);
  // Every subset of exactly `discard` points, as bitmasks.
  std::vector<std::uint64_t> subsets;
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(discard), true);
  do {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) m |= std::uint64_t{1} << i;
    subsets.push_back(m);
  } while (std::prev_permutation(pick.begin(), pick.end()));

  Bounds b;
  b.lambda = 0.0;
  b.mu = std::numeric_limits<double>::infinity();
  for (std::uint64_t s : subsets) {
    bool sat = false;
    const double l = scan_sup(orbit_pred(model, p, true, s), sat);
    const double m = scan_inf(orbit_pred(model, p, false, s), sat);
    b.lambda = std::max(b.lambda, l);
    b.mu = std::min(b.mu, m);
    b.saturated |= sat;
  }
  b.distance = lipc_distance(b.lambda, b.mu);
  return b;
}

Bounds marginal_distance(std::span<const Colour> f, std::span<const Colour> g, double m) {
  const double eps = 1e-3;
  std::vector<std::array<double, 3>> lg(g.size());
  std::vector<Colour> fc(f.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t ch = 0; ch < 3; ++ch) {
      lg[i][ch] = std::log1p(-std::clamp(g[i][ch], eps, m - eps) / m);
      fc[i][ch] = std::clamp(f[i][ch], eps, m - eps);
    }
  const auto side = [&](bool above) -> BlockPred {
    return [&, above](const double* ks, std::size_t n, unsigned char* ok) {
      std::fill(ok, ok + n, 1);
      for (std::size_t i = 0; i < lg.size(); ++i) {
        std::size_t alive = 0;
        for (std::size_t ch = 0; ch < 3; ++ch)
          for (std::size_t b = 0; b < n; ++b) {
            const double v = m - m * std::exp(std::max(ks[b] * lg[i][ch], kExpFloor));
            ok[b] &= static_cast<unsigned char>(above ? v >= fc[i][ch] : v <= fc[i][ch]);
          }
        for (std::size_t b = 0; b < n; ++b) alive += ok[b];
        if (alive == 0) return;
      }
    };
  };
  const BlockPred above = side(true), below = side(false);
  Bounds b;
  b.lambda = scan_inf(above, b.saturated);
  b.mu = scan_sup(below, b.saturated);
  b.distance = std::log(b.lambda / b.mu);
  return b;
}

Colour random_colour(const MixingModel& model, Rng& rng, double lo, double hi) {
  for (;;) {
    Transmittance t;
    for (std::size_t i = 0; i < 3; ++i) t[i] = rng.uniform(lo, hi);
    const Colour c = model.mix(t);
    bool inside = true;
    for (std::size_t i = 0; i < 3; ++i)
      inside &= c[i] > model.gamut_lo() && c[i] < model.gamut_hi();
    if (!inside) continue;
    ClampStats s;
    (void)model.to_transmittance(c, &s);
    if (s.transmittance == 0) return c;
  }
}

ColourImage random_image(const MixingModel& model, Rng& rng, std::size_t w, std::size_t h,
                         double lo, double hi) {
  ColourImage img(w, h);
  for (auto& p : img.pixels()) p = random_colour(model, rng, lo, hi);
  return img;
}

}  // namespace lipc::oracle
