#include "lipc/asplund.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lipc {

namespace {

void check_pair(const ColourImage& f, const ColourImage& g, std::span<const std::size_t> region) {
  if (!f.same_shape(g)) throw DataError("image dimensions differ");
  if (region.empty()) throw DataError("empty region");
  for (std::size_t idx : region)
    if (idx >= f.size()) throw DataError("region index out of range");
}

double log_ratio(const Sandwich& s) { return s.mu >= s.lambda ? std::log(s.mu / s.lambda) : 0.0; }

// The `discard` points most constraining for one side: violators at the
// contact first, then by their own contact scalar.
template <class Violates, class Key>
std::vector<std::size_t> most_constraining(std::span<const std::size_t> region,
                                           std::span<const PointContact> pcs, std::size_t discard,
                                           Violates violates, Key key) {
  std::vector<std::size_t> order(pcs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool va = violates(pcs[a]);
    const bool vb = violates(pcs[b]);
    if (va != vb) return va;
    return key(pcs[a]) < key(pcs[b]);
  });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < discard; ++i) out.push_back(region[order[i]]);
  return out;
}

}  // namespace

std::size_t ToleranceSpec::discard_count(std::size_t n) const {
  if (!(discard_fraction >= 0.0) || !(discard_fraction < 1.0))
    throw DataError("discard fraction must lie in [0, 1)");
  // Guard against p*n landing a hair under an integer (e.g. 0.07 * 100).
  const double raw = discard_fraction * static_cast<double>(n);
  const auto m = static_cast<std::size_t>(std::floor(raw * (1.0 + 1e-12)));
  if (m >= n) throw DataError("discard fraction removes every point");
  return m;
}

std::vector<PointContact> point_contacts(const MixingModel& model, const ColourImage& f,
                                         const ColourImage& g,
                                         std::span<const std::size_t> region, ClampStats* stats) {
  std::vector<PointContact> out;
  out.reserve(region.size());
  for (std::size_t idx : region) {
    const ProbeColour probe(model, g[idx]);
    if (stats && probe.transmittance_clamped()) ++stats->transmittance;
    out.push_back(point_contact(probe, f[idx]));
    if (stats && out.back().out_of_range) ++stats->out_of_range;
  }
  return out;
}

double colour_pair_distance(const MixingModel& model, const Colour& c1, const Colour& c2) {
  const PointContact pc = point_contact(ProbeColour(model, c2), c1);
  return log_ratio(sandwich(std::span<const PointContact>(&pc, 1), 0));
}

PairDistance image_pair_distance(const MixingModel& model, const ColourImage& f,
                                 const ColourImage& g, std::span<const std::size_t> region) {
  check_pair(f, g, region);
  PairDistance out;
  const auto pcs = point_contacts(model, f, g, region, &out.clamps);
  const Sandwich s = sandwich(pcs, 0);
  out.lambda = s.lambda;
  out.mu = s.mu;
  out.distance = log_ratio(s);
  out.scales.reserve(pcs.size());
  for (std::size_t i = 0; i < pcs.size(); ++i)
    out.scales.push_back({region[i], pcs[i].k_lambda(), pcs[i].k_mu(), pcs[i].channel_scale});
  return out;
}

PairDistance image_pair_distance(const MixingModel& model, const ColourImage& f,
                                 const ColourImage& g) {
  const auto z = full_region(f);
  return image_pair_distance(model, f, g, z);
}

TolerantPairDistance image_pair_distance_tol(const MixingModel& model, const ColourImage& f,
                                             const ColourImage& g,
                                             std::span<const std::size_t> region,
                                             const ToleranceSpec& tol) {
  check_pair(f, g, region);
  const std::size_t m = tol.discard_count(region.size());
  TolerantPairDistance out;
  const auto pcs = point_contacts(model, f, g, region, &out.clamps);
  const Sandwich s = sandwich(pcs, m);
  out.lambda = s.lambda;
  out.mu = s.mu;
  out.distance = log_ratio(s);

  out.discarded_low = most_constraining(
      region, pcs, m, [&](const PointContact& p) { return !p.upper.contains(s.lambda); },
      [](const PointContact& p) { return p.k_lambda(); });
  out.discarded_high = most_constraining(
      region, pcs, m, [&](const PointContact& p) { return !p.lower.contains(s.mu); },
      [](const PointContact& p) { return -p.k_mu(); });

  for (std::size_t idx : region) {
    const Colour up = model.scale(s.lambda, g[idx]);
    const Colour lo = model.scale(s.mu, g[idx]);
    for (std::size_t c = 0; c < 3; ++c) {
      out.slack_lambda[c] = std::max(out.slack_lambda[c], f[idx][c] - up[c]);
      out.slack_mu[c] = std::max(out.slack_mu[c], lo[c] - f[idx][c]);
    }
  }
  return out;
}

TolerantPairDistance image_pair_distance_tol(const MixingModel& model, const ColourImage& f,
                                             const ColourImage& g, const ToleranceSpec& tol) {
  const auto z = full_region(f);
  return image_pair_distance_tol(model, f, g, z, tol);
}

double pixelwise_d1(const MixingModel& model, const ColourImage& f, const ColourImage& g,
                    std::span<const std::size_t> region) {
  check_pair(f, g, region);
  double sum = 0.0;
  for (std::size_t idx : region) sum += colour_pair_distance(model, f[idx], g[idx]);
  return sum / static_cast<double>(region.size());
}

double pixelwise_dinf(const MixingModel& model, const ColourImage& f, const ColourImage& g,
                      std::span<const std::size_t> region) {
  check_pair(f, g, region);
  double best = 0.0;
  for (std::size_t idx : region) best = std::max(best, colour_pair_distance(model, f[idx], g[idx]));
  return best;
}

bool is_neighbour(const MixingModel& model, const ColourImage& f, const ColourImage& g,
                  double epsilon, double p) {
  return image_pair_distance_tol(model, f, g, ToleranceSpec{p}).distance < epsilon;
}

double orbit_gap(const MixingModel& model, const Colour& c0, const Colour& c) {
  auto gap = [&](double log_alpha) {
    const Colour s = model.scale(std::exp(log_alpha), c0);
    double g = 0.0;
    for (std::size_t i = 0; i < 3; ++i) g = std::max(g, std::abs(s[i] - c[i]));
    return g;
  };
  // Dense log grid over alpha in [1e-3, 1e3], then golden-section search in
  // the two cells around the best node.
  constexpr int kNodes = 20001;
  const double lo = std::log(1e-3);
  const double hi = std::log(1e3);
  const double step = (hi - lo) / (kNodes - 1);
  int best = 0;
  double best_gap = gap(lo);
  for (int i = 1; i < kNodes; ++i) {
    const double v = gap(lo + step * i);
    if (v < best_gap) {
      best_gap = v;
      best = i;
    }
  }
  double a = lo + step * std::max(best - 1, 0);
  double b = lo + step * std::min(best + 1, kNodes - 1);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = gap(x1), f2 = gap(x2);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = gap(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = gap(x2);
    }
  }
  return std::min({best_gap, f1, f2});
}

}  // namespace lipc
