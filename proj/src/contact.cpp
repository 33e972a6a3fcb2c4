#include "lipc/contact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace lipc {

namespace {

constexpr double kLogTolerance = 1e-10;
constexpr int kMaxBisection = 200;

// Roots of psi(k) = log(sum_j exp(lw_j + d_j k)) - level over the reals. psi is
// convex (log-sum-exp of affine functions), so there are at most two.
struct ConvexLse {
  std::array<double, 2> lw{};
  std::array<double, 2> d{};
  std::size_t n = 0;
  double level = 0.0;

  double operator()(double k) const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) m = std::max(m, lw[j] + d[j] * k);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::exp(lw[j] + d[j] * k - m);
    return m + std::log(s) - level;
  }
};

template <class F>
double bisect_linear(const F& f, double a, double b) {
  double fa = f(a);
  for (int i = 0; i < kMaxBisection; ++i) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Walks from `from` in direction `dir` until f changes sign relative to f(from).
template <class F>
double expand_to_sign_change(const F& f, double from, double dir) {
  const bool positive = f(from) > 0.0;
  double step = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double x = from + dir * step;
    if ((f(x) > 0.0) != positive) return x;
    step *= 2.0;
  }
  throw SolverError("turning point bracket expansion failed");
}

std::size_t keep_in_range(std::array<double, 2>& out, std::size_t n, double r) {
  if (std::isfinite(r) && r > kScaleMin && r < kScaleMax && n < out.size()) out[n++] = r;
  return n;
}

}  // namespace

// -- IntervalSet ------------------------------------------------------------

void IntervalSet::push(Interval iv) {
  if (iv.hi < iv.lo) return;
  if (n_ > 0 && iv.lo <= iv_[n_ - 1].hi) {
    iv_[n_ - 1].hi = std::max(iv_[n_ - 1].hi, iv.hi);
    return;
  }
  if (n_ == kCapacity) throw SolverError("IntervalSet capacity exceeded");
  iv_[n_++] = iv;
}

bool IntervalSet::contains(double k) const {
  for (std::size_t i = 0; i < n_; ++i)
    if (k >= iv_[i].lo && k <= iv_[i].hi) return true;
  return false;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  IntervalSet out;
  std::size_t i = 0, j = 0;
  while (i < n_ && j < other.n_) {
    const double lo = std::max(iv_[i].lo, other.iv_[j].lo);
    const double hi = std::min(iv_[i].hi, other.iv_[j].hi);
    if (lo <= hi) {
      out.push({lo, hi});
    } else if (lo <= hi * (1.0 + kTouchTol)) {
      // Two closed intervals meeting at one k, separated only by root error.
      const double k = 0.5 * (lo + hi);
      out.push({k, k});
    }
    if (iv_[i].hi < other.iv_[j].hi)
      ++i;
    else
      ++j;
  }
  return out;
}

// -- ScaleCurve -------------------------------------------------------------

ScaleCurve::ScaleCurve(const MixingModel& model, const Transmittance& t, Channel channel) {
  const auto& row = model.to_gamut()[static_cast<std::size_t>(channel)];
  for (std::size_t j = 0; j < 3; ++j) {
    const double b = -std::log(t[j]);
    bool merged = false;
    for (std::size_t q = 0; q < n_terms_; ++q) {
      if (rate_[q] == b) {
        coeff_[q] += row[j];
        merged = true;
      }
    }
    if (!merged) {
      coeff_[n_terms_] = row[j];
      rate_[n_terms_] = b;
      ++n_terms_;
    }
  }
  // Drop cancelled terms.
  std::size_t kept = 0;
  for (std::size_t q = 0; q < n_terms_; ++q) {
    if (coeff_[q] != 0.0) {
      coeff_[kept] = coeff_[q];
      rate_[kept] = rate_[q];
      ++kept;
    }
  }
  n_terms_ = kept;

  // h'(k) = -sum_j w_j exp(-b_j k) with w_j = c_j b_j. A zero needs mixed
  // signs; divide by the term whose sign is in the minority.
  std::size_t positives = 0;
  for (std::size_t q = 0; q < n_terms_; ++q) positives += (coeff_[q] > 0.0);
  if (positives != 0 && positives != n_terms_) {
    const bool ref_positive = (positives == 1);
    std::size_t ref = 0;
    for (std::size_t q = 0; q < n_terms_; ++q)
      if ((coeff_[q] > 0.0) == ref_positive) ref = q;
    ConvexLse psi;
    psi.level = std::log(std::abs(coeff_[ref] * rate_[ref]));
    for (std::size_t q = 0; q < n_terms_; ++q) {
      if (q == ref) continue;
      psi.lw[psi.n] = std::log(std::abs(coeff_[q] * rate_[q]));
      psi.d[psi.n] = rate_[ref] - rate_[q];
      ++psi.n;
    }

    std::array<double, 2> found{};
    std::size_t nf = 0;
    if (psi.n == 1) {
      nf = keep_in_range(found, nf, (psi.level - psi.lw[0]) / psi.d[0]);
    } else if ((psi.d[0] > 0.0) == (psi.d[1] > 0.0)) {
      // Monotone: exactly one real root.
      const double dir = (psi(0.0) > 0.0) == (psi.d[0] > 0.0) ? -1.0 : 1.0;
      const double other = expand_to_sign_change(psi, 0.0, dir);
      nf = keep_in_range(found, nf, bisect_linear(psi, std::min(0.0, other), std::max(0.0, other)));
    } else {
      // Convex with interior minimum where the weighted slopes cancel.
      const double k_min =
          std::log(-(std::exp(psi.lw[1]) * psi.d[1]) / (std::exp(psi.lw[0]) * psi.d[0])) /
          (psi.d[0] - psi.d[1]);
      const double at_min = psi(k_min);
      if (at_min == 0.0) {
        nf = keep_in_range(found, nf, k_min);
      } else if (at_min < 0.0) {
        const double left = expand_to_sign_change(psi, k_min, -1.0);
        const double right = expand_to_sign_change(psi, k_min, 1.0);
        nf = keep_in_range(found, nf, bisect_linear(psi, left, k_min));
        nf = keep_in_range(found, nf, bisect_linear(psi, k_min, right));
      }
    }
    std::sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(nf));
    for (std::size_t i = 0; i < nf; ++i)
      if (n_turning_ == 0 || found[i] > turning_[n_turning_ - 1]) turning_[n_turning_++] = found[i];
  }

  knot_[n_knots_++] = kScaleMin;
  for (std::size_t i = 0; i < n_turning_; ++i) knot_[n_knots_++] = turning_[i];
  knot_[n_knots_++] = kScaleMax;
  for (std::size_t i = 0; i < n_knots_; ++i) knot_value_[i] = value(knot_[i]);
}

double ScaleCurve::value(double k) const {
  double h = 0.0;
  for (std::size_t q = 0; q < n_terms_; ++q) h += coeff_[q] * std::exp(-rate_[q] * k);
  return h;
}

double ScaleCurve::slope(double k) const {
  double d = 0.0;
  for (std::size_t q = 0; q < n_terms_; ++q) d -= coeff_[q] * rate_[q] * std::exp(-rate_[q] * k);
  return d;
}

// Safeguarded Newton in u = ln k: the bracket [u0, u1] always holds the sign
// change; a Newton step is taken when it stays inside and shrinks fast enough,
// a bisection step otherwise. Ends with a verified bracket of width
// kLogTolerance and one Newton polish inside it.
double ScaleCurve::solve_piece(double lo, double hi, double f_lo, double target) const {
  double u0 = std::log(lo);
  double u1 = std::log(hi);
  const bool lo_above = f_lo > 0.0;
  // Residual and its u-derivative from one set of exponentials.
  auto eval = [&](double u, double& dv) {
    const double k = std::exp(u);
    double h = 0.0, d = 0.0;
    for (std::size_t q = 0; q < n_terms_; ++q) {
      const double e = coeff_[q] * std::exp(-rate_[q] * k);
      h += e;
      d -= rate_[q] * e;
    }
    dv = d * k;
    return h - target;
  };
  // Returns true when u hit the root exactly.
  auto shrink = [&](double u, double v) {
    if (v == 0.0) {
      u0 = u1 = u;
      return true;
    }
    if ((v > 0.0) == lo_above)
      u0 = u;
    else
      u1 = u;
    return false;
  };

  double u = (u0 < 0.0 && u1 > 0.0) ? 0.0 : 0.5 * (u0 + u1);
  double step_old = u1 - u0;
  for (int iter = 0; u1 - u0 > kLogTolerance; ++iter) {
    if (iter > kMaxBisection) throw SolverError("contact solver did not converge");
    double dv = 0.0;
    const double v = eval(u, dv);
    if (shrink(u, v)) break;
    if (u1 - u0 <= kLogTolerance) break;
    const double un = dv != 0.0 ? u - v / dv : std::numeric_limits<double>::quiet_NaN();
    if (!(un > u0 && un < u1) || std::abs(un - u) > 0.5 * step_old) {
      u = 0.5 * (u0 + u1);
      step_old = u1 - u0;
      continue;
    }
    step_old = std::abs(un - u);
    u = un;
    if (step_old < 0.25 * kLogTolerance) {
      // Converged by Newton: confirm with a bracket around the estimate.
      double scratch = 0.0;
      const double a = std::max(u0, u - 0.5 * kLogTolerance);
      const double b = std::min(u1, u + 0.5 * kLogTolerance);
      if (shrink(a, eval(a, scratch))) break;
      if (shrink(b, eval(b, scratch))) break;
      u = 0.5 * (u0 + u1);
    }
  }
  const double klo = std::exp(u0);
  const double khi = std::exp(u1);
  double k = std::exp(0.5 * (u0 + u1));
  if (u0 == u1) return k;
  const double d = slope(k);
  if (d != 0.0) {
    const double polished = k - (value(k) - target) / d;
    if (polished >= klo && polished <= khi) k = polished;
  }
  return k;
}

ChannelContact ScaleCurve::contact(double target) const {
  ChannelContact out;
  auto add_root = [&](double r) {
    if (out.root_count > 0 && out.roots[out.root_count - 1] >= r) return;
    if (out.root_count < out.roots.size()) out.roots[out.root_count++] = r;
  };

  // Fast path: monotone decreasing through the target.
  if (n_knots_ == 2 && knot_value_[0] > target && knot_value_[1] < target) {
    const double r = solve_piece(knot_[0], knot_[1], knot_value_[0] - target, target);
    add_root(r);
    out.at_or_above.push({kScaleMin, r});
    out.at_or_below.push({r, kScaleMax});
    return out;
  }

  for (std::size_t i = 0; i + 1 < n_knots_; ++i) {
    const double v0 = knot_value_[i] - target;
    const double v1 = knot_value_[i + 1] - target;
    if (v0 == 0.0) add_root(knot_[i]);
    if ((v0 > 0.0 && v1 < 0.0) || (v0 < 0.0 && v1 > 0.0))
      add_root(solve_piece(knot_[i], knot_[i + 1], v0, target));
    if (i + 2 == n_knots_ && v1 == 0.0) add_root(knot_[i + 1]);
  }

  // Classify the segments between consecutive roots.
  std::array<double, 5> bounds{};
  std::size_t nb = 0;
  bounds[nb++] = kScaleMin;
  for (std::size_t i = 0; i < out.root_count; ++i)
    if (out.roots[i] > bounds[nb - 1] && out.roots[i] < kScaleMax) bounds[nb++] = out.roots[i];
  bounds[nb++] = kScaleMax;

  auto is_root = [&](double k) {
    for (std::size_t i = 0; i < out.root_count; ++i)
      if (out.roots[i] == k) return true;
    return false;
  };
  if (is_root(kScaleMin)) {
    out.at_or_above.push({kScaleMin, kScaleMin});
    out.at_or_below.push({kScaleMin, kScaleMin});
  }
  for (std::size_t i = 0; i + 1 < nb; ++i) {
    const Interval seg{bounds[i], bounds[i + 1]};
    const double v = value(std::sqrt(seg.lo * seg.hi)) - target;
    if (v >= 0.0) out.at_or_above.push(seg);
    if (v <= 0.0) out.at_or_below.push(seg);
    if (is_root(seg.hi)) {
      out.at_or_above.push({seg.hi, seg.hi});
      out.at_or_below.push({seg.hi, seg.hi});
    }
  }
  out.out_of_range = (out.root_count == 0);
  return out;
}

// -- ProbeColour / PointContact ---------------------------------------------

namespace {
Transmittance clamped_transmittance(const MixingModel& model, const Colour& c, bool* clamped) {
  ClampStats s;
  Transmittance t = model.to_transmittance(c, &s);
  *clamped = s.transmittance > 0;
  return t;
}
}  // namespace

ProbeColour::ProbeColour(const MixingModel& model, const Colour& c)
    : colour_(c),
      t_(clamped_transmittance(model, c, &clamped_)),
      curves_{ScaleCurve(model, t_, Channel::R), ScaleCurve(model, t_, Channel::G),
              ScaleCurve(model, t_, Channel::B)} {}

PointContact point_contact(const ProbeColour& probe, const Colour& target) {
  PointContact pc;
  if (probe.colour() == target) {
    pc.upper.push({kScaleMin, 1.0});
    pc.lower.push({1.0, kScaleMax});
    pc.channel_scale = {1.0, 1.0, 1.0};
    return pc;
  }
  for (std::size_t c = 0; c < 3; ++c) {
    const ChannelContact cc = probe.curve(kChannels[c]).contact(target[c]);
    if (c == 0) {
      pc.upper = cc.at_or_above;
      pc.lower = cc.at_or_below;
    } else {
      pc.upper = pc.upper.intersect(cc.at_or_above);
      pc.lower = pc.lower.intersect(cc.at_or_below);
    }
    if (cc.root_count > 0)
      pc.channel_scale[c] = cc.roots[0];
    else
      pc.channel_scale[c] = cc.at_or_above.empty() ? kScaleMin : kScaleMax;
    pc.out_of_range |= cc.out_of_range;
  }
  return pc;
}

// -- Sandwich ---------------------------------------------------------------

namespace {

// Openings sort kTouchTol early so that intervals of different points that
// meet at one k (up to root error) still overlap; reported positions are exact.
struct Event {
  double key;
  double pos;
  int delta;
};

void add_events(std::vector<Event>& ev, const IntervalSet& set) {
  for (const auto& iv : set.intervals()) {
    ev.push_back({iv.lo * (1.0 - kTouchTol), iv.lo, +1});
    ev.push_back({iv.hi, iv.hi, -1});
  }
}

void sort_events(std::vector<Event>& ev) {
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.delta > b.delta;  // openings before closings: intervals are closed
  });
}

double upper_contact(std::span<const PointContact> points, std::size_t discard) {
  const std::size_t need = points.size() - discard;
  bool simple = true;
  for (const auto& p : points) simple &= (p.upper.empty() || p.upper.is_initial_segment());
  if (simple) {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points)
      v.push_back(p.upper.empty() ? -std::numeric_limits<double>::infinity() : p.upper.sup());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(discard), v.end());
    const double k = v[discard];
    return std::isfinite(k) ? k : kScaleMin;
  }
  std::vector<Event> ev;
  for (const auto& p : points) add_events(ev, p.upper);
  sort_events(ev);
  std::size_t count = 0;
  double best = -1.0;
  for (const auto& e : ev) {
    if (e.delta > 0) {
      ++count;
    } else {
      if (count >= need) best = e.pos;
      --count;
    }
  }
  return best > 0.0 ? best : kScaleMin;
}

double lower_contact(std::span<const PointContact> points, std::size_t discard) {
  const std::size_t need = points.size() - discard;
  bool simple = true;
  for (const auto& p : points) simple &= (p.lower.empty() || p.lower.is_final_segment());
  if (simple) {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points)
      v.push_back(p.lower.empty() ? std::numeric_limits<double>::infinity() : p.lower.inf());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(discard), v.end(),
                     std::greater<>());
    const double k = v[discard];
    return std::isfinite(k) ? k : kScaleMax;
  }
  std::vector<Event> ev;
  for (const auto& p : points) add_events(ev, p.lower);
  sort_events(ev);
  std::size_t count = 0;
  for (const auto& e : ev) {
    if (e.delta > 0) {
      if (++count >= need) return e.pos;
    } else {
      --count;
    }
  }
  return kScaleMax;
}

}  // namespace

Sandwich sandwich(std::span<const PointContact> points, std::size_t discard) {
  if (points.empty()) throw DataError("sandwich: empty point set");
  if (discard >= points.size()) throw DataError("sandwich: discard count must be below #Z");
  return {upper_contact(points, discard), lower_contact(points, discard)};
}

double lipc_critical_scale(const MixingModel& model, const Colour& probe, double target,
                           Channel channel) {
  const ScaleCurve curve(model, model.to_transmittance(probe), channel);
  const ChannelContact cc = curve.contact(target);
  if (cc.root_count > 0) return cc.roots[0];
  return cc.at_or_above.empty() ? kScaleMin : kScaleMax;
}

}  // namespace lipc
