#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "lipc/colour.hpp"
#include "lipc/mixing_model.hpp"

namespace lipc {

/// Search range for contact scalars.
inline constexpr double kScaleMin = 1e-9;
inline constexpr double kScaleMax = 1e9;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Relative gap below which two roots are taken to be the same k. Roots are
/// solved to 1e-10 in ln k, so two estimates of one k differ by at most 2e-10.
inline constexpr double kTouchTol = 1e-9;

/// Sorted, disjoint, closed intervals inside [kScaleMin, kScaleMax].
class IntervalSet {
 public:
  static constexpr std::size_t kCapacity = 8;

  IntervalSet() = default;
  static IntervalSet all() { return IntervalSet(Interval{kScaleMin, kScaleMax}); }
  explicit IntervalSet(Interval iv) { push(iv); }

  bool empty() const { return n_ == 0; }
  std::size_t size() const { return n_; }
  const Interval& operator[](std::size_t i) const { return iv_[i]; }
  std::span<const Interval> intervals() const { return {iv_.data(), n_}; }

  /// Appends after the last interval, merging when they touch.
  void push(Interval iv);

  double sup() const { return iv_[n_ - 1].hi; }
  double inf() const { return iv_[0].lo; }
  bool contains(double k) const;
  /// True when the set is a single interval touching kScaleMin (resp. kScaleMax).
  bool is_initial_segment() const { return n_ == 1 && iv_[0].lo == kScaleMin; }
  bool is_final_segment() const { return n_ == 1 && iv_[0].hi == kScaleMax; }

  IntervalSet intersect(const IntervalSet& other) const;

 private:
  std::array<Interval, kCapacity> iv_{};
  std::size_t n_ = 0;
};

/// Where one channel of a scaled probe colour meets a target value.
struct ChannelContact {
  std::array<double, 3> roots{};  ///< crossings of h(k) = target, ascending
  std::size_t root_count = 0;
  IntervalSet at_or_above;  ///< { k : (k (x)c probe)_ch >= target }
  IntervalSet at_or_below;  ///< { k : (k (x)c probe)_ch <= target }
  bool out_of_range = false;  ///< target never reached inside the search range
};

/// One channel of the orbit k -> k (x)c C of a probe colour C:
///
///   h(k) = sum_j A[ch][j] * t_j^k,   t = clamp(U^-1 K C).
///
/// A = K^-1 U has entries of both signs, so h need not be monotone. h' has at
/// most two zeros; they are located once at construction and split the search
/// range into monotone pieces that are solved independently.
class ScaleCurve {
 public:
  ScaleCurve(const MixingModel& model, const Transmittance& t, Channel channel);

  double value(double k) const;
  double slope(double k) const;

  std::span<const double> turning_points() const { return {turning_.data(), n_turning_}; }
  bool monotone() const { return n_turning_ == 0; }

  ChannelContact contact(double target) const;

 private:
  double solve_piece(double lo, double hi, double f_lo, double target) const;

  std::array<double, 3> coeff_{};
  std::array<double, 3> rate_{};
  std::size_t n_terms_ = 0;
  std::array<double, 2> turning_{};
  std::size_t n_turning_ = 0;
  // Breakpoints kScaleMin, turning points..., kScaleMax and h there.
  std::array<double, 4> knot_{};
  std::array<double, 4> knot_value_{};
  std::size_t n_knots_ = 0;
};

/// Precomputed scaling curves of one probe colour, all three channels.
class ProbeColour {
 public:
  ProbeColour(const MixingModel& model, const Colour& c);

  const Colour& colour() const { return colour_; }
  const Transmittance& transmittance() const { return t_; }
  const ScaleCurve& curve(Channel ch) const { return curves_[static_cast<std::size_t>(ch)]; }
  bool transmittance_clamped() const { return clamped_; }

 private:
  Colour colour_;
  Transmittance t_;
  std::array<ScaleCurve, 3> curves_;
  bool clamped_ = false;
};

/// Admissible scale sets of one point: the intersection over channels.
struct PointContact {
  IntervalSet upper;  ///< k with k (x)c g(x) >= f(x) on all channels
  IntervalSet lower;  ///< k with k (x)c g(x) <= f(x) on all channels
  std::array<double, 3> channel_scale{};  ///< smallest crossing per channel
  bool out_of_range = false;

  /// Largest upper-admissible k, or kScaleMin when none.
  double k_lambda() const { return upper.empty() ? kScaleMin : upper.sup(); }
  /// Smallest lower-admissible k, or kScaleMax when none.
  double k_mu() const { return lower.empty() ? kScaleMax : lower.inf(); }
};

/// Contact of probe colour g against target colour f. Equal colours contact at
/// exactly k = 1.
PointContact point_contact(const ProbeColour& probe, const Colour& target);

/// Upper and lower contact scalars allowing `discard` violating points per side:
///   lambda = sup { k : #{x : k not in upper_x} <= discard }
///   mu     = inf { k : #{x : k not in lower_x} <= discard }
/// lambda falls back to kScaleMin and mu to kScaleMax when no k qualifies.
struct Sandwich {
  double lambda = kScaleMin;
  double mu = kScaleMax;
};
Sandwich sandwich(std::span<const PointContact> points, std::size_t discard);

/// Scalar k* with (k* (x)c probe)_ch = target. When the orbit crosses the
/// target more than once the smallest crossing is returned; when it never
/// does, kScaleMin (target too bright) or kScaleMax (too dark).
double lipc_critical_scale(const MixingModel& model, const Colour& probe, double target,
                           Channel channel);

}  // namespace lipc
