#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lipc/colour.hpp"
#include "lipc/mixing_model.hpp"
#include "lipc/rng.hpp"

namespace lipc::verify {

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Times `body`; a thrown exception becomes a failed check.
Check timed(const std::string& name, const std::function<Check()>& body);

/// Builds a model from the standard constants (optionally with a perturbed K)
/// and reports whether construction accepted it.
Check model_suite(bool perturb_k);

/// Library vs brute-force grid oracle on random colour pairs.
Check oracle_colour_suite(const MixingModel& model, std::size_t pairs, std::uint64_t seed);
/// Library vs brute-force grid oracle on random 1x8 image pairs.
Check oracle_image_suite(const MixingModel& model, std::size_t pairs, std::uint64_t seed);
/// lambda (x) g >= f - 1e-6, mu (x) g <= f + 1e-6, lambda <= mu on the pairs of
/// the two oracle suites.
Check contact_geometry_suite(const MixingModel& model, std::size_t colour_pairs,
                             std::size_t image_pairs, std::uint64_t seed);
/// d(alpha (x) f, f) <= 1e-7 on random non-clamping images.
Check invariance_suite(const MixingModel& model, std::size_t images, std::size_t size,
                       std::uint64_t seed);
/// Non-increasing in p; p = 0 bit-identical to the exact distance.
Check tolerance_suite(const MixingModel& model, std::size_t pairs, std::uint64_t seed);
/// Two injected outliers: tolerant distance vs clean distance and the
/// exhaustive discard oracle.
Check outlier_suite(const MixingModel& model, std::uint64_t seed);
/// Eq. 6: symmetry, the 192/128 example, and the grid oracle.
Check marginal_suite(std::size_t pairs, std::uint64_t seed);
/// Cone laws of (+)c and (x)c, and strict decrease of k -> k (x)c C.
Check algebra_suite(const MixingModel& model, std::size_t colours, std::uint64_t seed);

/// The suites run by `verify`, in order.
std::vector<Check> run_verify(bool quick, bool perturb_k);

/// Random colour whose scalings by every alpha in `alphas` stay clear of
/// both clamps.
Colour stable_colour(const MixingModel& model, Rng& rng, const std::vector<double>& alphas);

}  // namespace lipc::verify
