#pragma once

#include <array>

#include "lipc/colour.hpp"

namespace lipc {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// The LIPC mixing model: gamut bound M and the mixing matrices K, U
/// (Stiles-Burch colour matching functions under D65).
///
/// Transmittance of a colour c is clamp(U^-1 K c); a transmittance t maps back
/// to clamp(K^-1 U t). Both products are precomputed. Immutable once built.
class MixingModel {
 public:
  static constexpr double kDefaultEpsGamut = 1e-3;
  static constexpr double kDefaultEpsTransmittanceLow = 1e-6;
  static constexpr double kDefaultEpsTransmittanceHigh = 1e-9;
  static constexpr double kMaxCondition = 1e8;

  /// Validates K and U and precomputes inverses. Throws ModelError when an
  /// invariant fails.
  MixingModel(const Mat3& k, const Mat3& u, double m = 256.0);

  double M() const { return m_; }
  const Mat3& K() const { return k_; }
  const Mat3& U() const { return u_; }
  const Mat3& K_inv() const { return k_inv_; }
  const Mat3& U_inv() const { return u_inv_; }
  /// K^-1 U: transmittance -> gamut.
  const Mat3& to_gamut() const { return a_; }
  /// U^-1 K: gamut -> transmittance.
  const Mat3& to_transmittance_matrix() const { return b_; }

  double eps_gamut() const { return eps_gamut_; }
  double gamut_lo() const { return eps_gamut_; }
  double gamut_hi() const { return m_ - eps_gamut_; }
  double transmittance_lo() const { return t_lo_; }
  double transmittance_hi() const { return t_hi_; }

  Colour clamp_gamut(Colour c, ClampStats* stats = nullptr) const;

  Transmittance to_transmittance(const Colour& c, ClampStats* stats = nullptr) const;
  Colour from_transmittance(const Transmittance& t, ClampStats* stats = nullptr) const;

  /// K^-1 U t without clamping.
  Colour mix(const Transmittance& t) const;

  /// alpha (x)c c for one pixel.
  Colour scale(double alpha, const Colour& c, ClampStats* stats = nullptr) const;
  /// c1 (+)c c2 for one pixel.
  Colour add(const Colour& c1, const Colour& c2, ClampStats* stats = nullptr) const;

  /// Colour of unit transmittance (clamped), the neutral element of (+)c.
  Colour white_neutral() const;

 private:
  double m_;
  Mat3 k_, u_, k_inv_, u_inv_, a_, b_;
  double eps_gamut_ = kDefaultEpsGamut;
  double t_lo_ = kDefaultEpsTransmittanceLow;
  double t_hi_ = 1.0 - kDefaultEpsTransmittanceHigh;
};

/// The published Stiles-Burch / D65 matrices.
Mat3 standard_k();
Mat3 standard_u();

/// Model with the standard constants and M = 256.
const MixingModel& make_mixing_model();

// 3x3 helpers, exposed for tests.
Mat3 mat_mul(const Mat3& a, const Mat3& b);
Mat3 mat_inverse(const Mat3& a);
double condition_number_inf(const Mat3& a);

}  // namespace lipc
