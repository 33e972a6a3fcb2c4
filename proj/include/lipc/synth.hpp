#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lipc/colour.hpp"
#include "lipc/mixing_model.hpp"
#include "lipc/rng.hpp"

namespace lipc {

enum class SceneKind { TiledTemplate, OneDimSignal, BallGrid };

struct DriftSpec {
  enum class Kind { None, PerRowAlpha, GlobalAlpha };
  Kind kind = Kind::None;
  double alpha_top = 1.0;
  double alpha_bottom = 1.0;
  double alpha = 1.0;
};

struct NoiseSpec {
  enum class Kind { None, Impulse };
  Kind kind = Kind::None;
  double density = 0.0;
  double sigma2 = 0.0;
};

/// Template source: a built-in generator ("brick", "ball", "pulse") or a
/// path to an image file.
struct TemplateSpec {
  std::string builtin = "brick";
  std::string path;
  std::size_t width = 16;
  std::size_t height = 16;
  std::uint64_t seed = 1;
};

/// A tile whose template is recoloured by a channelwise affine map (more
/// contrast, bluer): same structure, different hue. Not part of the ground truth.
struct DecoySpec {
  std::size_t col = 0;
  std::size_t row = 0;
};

struct SceneSpec {
  SceneKind kind = SceneKind::TiledTemplate;
  std::size_t width = 64;
  std::size_t height = 64;
  std::size_t tile_width = 16;
  std::size_t tile_height = 16;
  /// Positions (x) of template copies along a one-dim signal.
  std::vector<std::size_t> positions;
  TemplateSpec templ;
  std::vector<DecoySpec> decoys;
  DriftSpec drift;
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

void to_json(nlohmann::json& j, const SceneSpec& s);
void from_json(const nlohmann::json& j, SceneSpec& s);
SceneSpec load_scene_spec(const std::filesystem::path& path);

struct Position {
  std::size_t x = 0;
  std::size_t y = 0;
  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

struct Scene {
  ColourImage image;
  ColourImage template_image;              ///< the probe, anchored at its centre
  std::vector<Position> ground_truth;      ///< template centres in image coordinates
  std::vector<std::size_t> noise_sites;    ///< linear indices perturbed by noise
};

/// Deterministic scene from the spec: clean layout, then drift, then noise.
Scene synth_scene(const MixingModel& model, const SceneSpec& spec);

/// Built-in templates.
ColourImage brick_template(std::size_t width, std::size_t height, std::uint64_t seed,
                           bool recoloured = false);
ColourImage ball_template(std::size_t size, std::uint64_t seed);
ColourImage pulse_template(std::size_t length, std::uint64_t seed);

struct NoiseResult {
  ColourImage image;
  std::vector<std::size_t> sites;  ///< in selection order
};

/// Perturbs floor(density * W * H) distinct, uniformly chosen pixels with
/// N(0, sigma2) on each channel, then clamps into the gamut. Other pixels are
/// untouched.
NoiseResult add_noise_sites(const MixingModel& model, const ColourImage& img, double density,
                            double sigma2, std::uint64_t seed);
ColourImage add_noise(const MixingModel& model, const ColourImage& img, double density,
                      double sigma2, std::uint64_t seed);

/// Row y gets alpha(y) = exp(lerp(ln top, ln bottom, y / (H-1))) via (x)c.
ColourImage apply_drift(const MixingModel& model, const ColourImage& img, double alpha_top,
                        double alpha_bottom);
double drift_alpha(std::size_t y, std::size_t height, double alpha_top, double alpha_bottom);

}  // namespace lipc
