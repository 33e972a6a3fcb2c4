#include "lipc/mixing_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lipc {

namespace {

constexpr double kIdentityTol = 1e-12;
constexpr double kRowSumTol = 1e-3;

double det3(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

double norm_inf(const Mat3& a) {
  double n = 0.0;
  for (const auto& row : a) n = std::max(n, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
  return n;
}

void check_inverse(const Mat3& inv, const Mat3& a, const char* name) {
  const Mat3 p = mat_mul(inv, a);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (std::abs(p[i][j] - (i == j ? 1.0 : 0.0)) > kIdentityTol)
        throw ModelError(std::string(name) + "^-1 * " + name + " is not the identity");
}

Colour apply(const Mat3& a, const std::array<double, 3>& x) {
  Colour out;
  for (std::size_t i = 0; i < 3; ++i) out[i] = a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2];
  return out;
}

}  // namespace

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return c;
}

Mat3 mat_inverse(const Mat3& a) {
  const double d = det3(a);
  if (d == 0.0 || !std::isfinite(d)) throw ModelError("singular 3x3 matrix");
  Mat3 inv{};
  inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / d;
  inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / d;
  inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / d;
  inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / d;
  inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / d;
  inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / d;
  inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / d;
  inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / d;
  inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / d;
  return inv;
}

double condition_number_inf(const Mat3& a) { return norm_inf(a) * norm_inf(mat_inverse(a)); }

Mat3 standard_k() {
  return {{{0.6991, 0.2109, 0.0899}, {0.1947, 0.8002, 0.0049}, {0.0681, 0.0002, 0.9315}}};
}

Mat3 standard_u() {
  return {{{25.0440, 53.1416, 176.8144},
           {21.3002, 185.9744, 47.7254},
           {229.2474, 19.9944, 5.7583}}};
}

MixingModel::MixingModel(const Mat3& k, const Mat3& u, double m) : m_(m), k_(k), u_(u) {
  if (!(m > 1.0) || !std::isfinite(m)) throw ModelError("gamut bound M must be finite and > 1");
  for (const Mat3* mat : {&k_, &u_})
    for (const auto& row : *mat)
      for (double x : row)
        if (!std::isfinite(x)) throw ModelError("non-finite mixing constant");

  if (condition_number_inf(k_) > kMaxCondition) throw ModelError("K is ill-conditioned");
  if (condition_number_inf(u_) > kMaxCondition) throw ModelError("U is ill-conditioned");
  k_inv_ = mat_inverse(k_);
  u_inv_ = mat_inverse(u_);
  check_inverse(k_inv_, k_, "K");
  check_inverse(u_inv_, u_, "U");

  // A unit transmittance must mix back to the top of the 8-bit range and K is a
  // normalised mixing matrix.
  for (std::size_t i = 0; i < 3; ++i) {
    const double us = u_[i][0] + u_[i][1] + u_[i][2];
    if (std::abs(us - (m_ - 1.0)) > kRowSumTol)
      throw ModelError("row " + std::to_string(i) + " of U does not sum to M-1");
    const double ks = k_[i][0] + k_[i][1] + k_[i][2];
    if (std::abs(ks - 1.0) > kRowSumTol)
      throw ModelError("row " + std::to_string(i) + " of K does not sum to 1");
  }

  a_ = mat_mul(k_inv_, u_);
  b_ = mat_mul(u_inv_, k_);
}

const MixingModel& make_mixing_model() {
  static const MixingModel model(standard_k(), standard_u(), 256.0);
  return model;
}

Colour MixingModel::clamp_gamut(Colour c, ClampStats* stats) const {
  bool clamped = false;
  for (std::size_t i = 0; i < 3; ++i) {
    double x = c[i];
    if (std::isnan(x)) x = gamut_lo();
    const double y = std::clamp(x, gamut_lo(), gamut_hi());
    clamped |= (y != c[i]);
    c[i] = y;
  }
  if (clamped && stats) ++stats->gamut;
  return c;
}

Transmittance MixingModel::to_transmittance(const Colour& c, ClampStats* stats) const {
  const Colour raw = apply(b_, c.v);
  Transmittance t;
  bool clamped = false;
  for (std::size_t i = 0; i < 3; ++i) {
    t[i] = std::clamp(raw[i], t_lo_, t_hi_);
    clamped |= (t[i] != raw[i]);
  }
  if (clamped && stats) ++stats->transmittance;
  return t;
}

Colour MixingModel::mix(const Transmittance& t) const { return apply(a_, t.v); }

Colour MixingModel::from_transmittance(const Transmittance& t, ClampStats* stats) const {
  return clamp_gamut(mix(t), stats);
}

Colour MixingModel::scale(double alpha, const Colour& c, ClampStats* stats) const {
  Transmittance t = to_transmittance(c, stats);
  for (std::size_t i = 0; i < 3; ++i) t[i] = std::pow(t[i], alpha);
  return from_transmittance(t, stats);
}

Colour MixingModel::add(const Colour& c1, const Colour& c2, ClampStats* stats) const {
  const Transmittance t1 = to_transmittance(c1, stats);
  const Transmittance t2 = to_transmittance(c2, stats);
  Transmittance t;
  for (std::size_t i = 0; i < 3; ++i) t[i] = t1[i] * t2[i];
  return from_transmittance(t, stats);
}

Colour MixingModel::white_neutral() const {
  return from_transmittance(Transmittance{{t_hi_, t_hi_, t_hi_}});
}

}  // namespace lipc
