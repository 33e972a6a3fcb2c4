#include "lipc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "lipc/image_io.hpp"
#include "lipc/lipc_ops.hpp"

namespace lipc {

namespace {

const char* kind_name(SceneKind k) {
  switch (k) {
    case SceneKind::TiledTemplate: return "tiled-template";
    case SceneKind::OneDimSignal: return "one-dim-signal";
    case SceneKind::BallGrid: return "ball-grid";
  }
  return "?";
}

SceneKind parse_kind(const std::string& s) {
  if (s == "tiled-template") return SceneKind::TiledTemplate;
  if (s == "one-dim-signal") return SceneKind::OneDimSignal;
  if (s == "ball-grid") return SceneKind::BallGrid;
  throw DataError("scene spec: unknown kind '" + s + "'");
}

// Colour whose transmittance is t0^s per channel (with channel jitter), i.e. a
// point on or near the orbit of t0. Keeps generated colours mixable.
Colour textured(const MixingModel& model, const Transmittance& t0, double s,
                const std::array<double, 3>& jitter) {
  Transmittance t;
  for (std::size_t i = 0; i < 3; ++i) t[i] = std::pow(t0[i], s * jitter[i]);
  return model.from_transmittance(t);
}

// Channelwise affine recolouring: contrast up, hue towards blue. Per-channel
// correlation cannot tell it from the original.
Colour recolour(Colour c) {
  constexpr std::array<double, 3> gain{1.3, 1.15, 1.25};
  constexpr std::array<double, 3> offset{-120.0, -40.0, -10.0};
  for (std::size_t i = 0; i < 3; ++i) c[i] = gain[i] * c[i] + offset[i];
  return c;
}

ColourImage recolour(ColourImage img) {
  for (auto& p : img.pixels()) p = make_mixing_model().clamp_gamut(recolour(p));
  return img;
}

void paste(ColourImage& dst, const ColourImage& src, std::size_t x0, std::size_t y0) {
  for (std::size_t y = 0; y < src.height(); ++y)
    for (std::size_t x = 0; x < src.width(); ++x) dst.at(x0 + x, y0 + y) = src.at(x, y);
}

ColourImage load_template(const MixingModel& model, const SceneSpec& spec) {
  const auto& t = spec.templ;
  if (!t.path.empty()) return load_image(t.path, model);
  if (t.builtin == "brick") return brick_template(t.width, t.height, t.seed);
  if (t.builtin == "ball") return ball_template(t.width, t.seed);
  if (t.builtin == "pulse") return pulse_template(t.width, t.seed);
  throw DataError("scene spec: unknown builtin template '" + t.builtin + "'");
}

void validate(const SceneSpec& s) {
  if (s.width == 0 || s.height == 0) throw DataError("scene spec: empty image");
  if (s.noise.density < 0.0 || s.noise.density > 1.0)
    throw DataError("scene spec: noise density must lie in [0, 1]");
  if (s.noise.kind == NoiseSpec::Kind::Impulse && !(s.noise.sigma2 > 0.0))
    throw DataError("scene spec: noise sigma2 must be positive");
  const auto& d = s.drift;
  if (!(d.alpha_top > 0.0) || !(d.alpha_bottom > 0.0) || !(d.alpha > 0.0))
    throw DataError("scene spec: drift alphas must be positive");
}

}  // namespace

ColourImage brick_template(std::size_t width, std::size_t height, std::uint64_t seed,
                           bool recoloured) {
  if (width < 2 || height < 2) throw DataError("brick template: too small");
  const MixingModel& model = make_mixing_model();
  Rng rng(seed);
  const Transmittance brick = model.to_transmittance(Colour{{168.0, 84.0, 62.0}});
  const Transmittance mortar = model.to_transmittance(Colour{{208.0, 202.0, 192.0}});
  ColourImage img(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    // Soft vertical shading across the brick body.
    const double shade = 0.9 + 0.25 * static_cast<double>(y) / static_cast<double>(height - 1);
    for (std::size_t x = 0; x < width; ++x) {
      const bool is_mortar = (y == 0 || x == 0);
      const double s = is_mortar ? rng.uniform(0.9, 1.1) : shade * rng.uniform(0.75, 1.3);
      std::array<double, 3> jitter{};
      for (auto& j : jitter) j = rng.uniform(0.94, 1.06);
      img.at(x, y) = textured(model, is_mortar ? mortar : brick, s, jitter);
    }
  }
  return recoloured ? recolour(std::move(img)) : img;
}

ColourImage ball_template(std::size_t size, std::uint64_t seed) {
  if (size < 3) throw DataError("ball template: too small");
  const MixingModel& model = make_mixing_model();
  Rng rng(seed);
  const Transmittance ball = model.to_transmittance(Colour{{64.0, 150.0, 200.0}});
  const Transmittance bg = model.to_transmittance(Colour{{120.0, 112.0, 100.0}});
  const double c = static_cast<double>(size - 1) / 2.0;
  const double r = c - 0.5;
  ColourImage img(size, size);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const double dx = static_cast<double>(x) - c;
      const double dy = static_cast<double>(y) - c;
      const double d2 = (dx * dx + dy * dy) / (r * r);
      std::array<double, 3> jitter{};
      for (auto& j : jitter) j = rng.uniform(0.97, 1.03);
      if (d2 <= 1.0) {
        // Lambert-ish shading, light from the upper left.
        const double z = std::sqrt(1.0 - d2);
        const double lit = std::max(0.0, (-dx / r - dy / r + z * 1.2) / std::sqrt(3.44));
        img.at(x, y) = textured(model, ball, 2.2 - 1.6 * lit, jitter);
      } else {
        img.at(x, y) = textured(model, bg, 1.0, jitter);
      }
    }
  }
  return img;
}

ColourImage pulse_template(std::size_t length, std::uint64_t seed) {
  if (length < 3) throw DataError("pulse template: too short");
  const MixingModel& model = make_mixing_model();
  Rng rng(seed);
  ColourImage img(length, 1);
  for (std::size_t x = 0; x < length; ++x) {
    Transmittance t;
    for (std::size_t i = 0; i < 3; ++i) t[i] = rng.uniform(0.1, 0.9);
    img.at(x, 0) = model.from_transmittance(t);
  }
  return img;
}

double drift_alpha(std::size_t y, std::size_t height, double alpha_top, double alpha_bottom) {
  if (height <= 1) return alpha_top;
  const double u = static_cast<double>(y) / static_cast<double>(height - 1);
  return std::exp(std::lerp(std::log(alpha_top), std::log(alpha_bottom), u));
}

ColourImage apply_drift(const MixingModel& model, const ColourImage& img, double alpha_top,
                        double alpha_bottom) {
  if (!(alpha_top > 0.0) || !(alpha_bottom > 0.0))
    throw std::invalid_argument("apply_drift: alphas must be positive");
  ColourImage out = img;
  for (std::size_t y = 0; y < img.height(); ++y) {
    const double a = drift_alpha(y, img.height(), alpha_top, alpha_bottom);
    for (std::size_t x = 0; x < img.width(); ++x) out.at(x, y) = model.scale(a, img.at(x, y));
  }
  return out;
}

NoiseResult add_noise_sites(const MixingModel& model, const ColourImage& img, double density,
                            double sigma2, std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0))
    throw std::invalid_argument("add_noise: density must lie in [0, 1]");
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("add_noise: sigma2 must be non-negative");
  const std::size_t n = img.size();
  const auto count = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::floor(density * static_cast<double>(n) * (1.0 + 1e-12))));
  Rng rng(seed);
  // Partial Fisher-Yates: the first `count` slots are the chosen sites.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(count);

  NoiseResult res{img, idx};
  const double sigma = std::sqrt(sigma2);
  for (std::size_t site : idx) {
    Colour c = img[site];
    for (std::size_t ch = 0; ch < 3; ++ch) c[ch] += sigma * rng.normal();
    res.image[site] = model.clamp_gamut(c);
  }
  return res;
}

ColourImage add_noise(const MixingModel& model, const ColourImage& img, double density,
                      double sigma2, std::uint64_t seed) {
  return add_noise_sites(model, img, density, sigma2, seed).image;
}

Scene synth_scene(const MixingModel& model, const SceneSpec& spec) {
  validate(spec);
  Scene scene;
  scene.template_image = load_template(model, spec);
  const ColourImage& tpl = scene.template_image;
  const std::size_t ax = (tpl.width() - 1) / 2;
  const std::size_t ay = (tpl.height() - 1) / 2;
  Rng rng(spec.seed);

  switch (spec.kind) {
    case SceneKind::TiledTemplate:
    case SceneKind::BallGrid: {
      const std::size_t tw = spec.tile_width, th = spec.tile_height;
      if (tw == 0 || th == 0) throw DataError("scene spec: empty tile");
      if (tpl.width() > tw || tpl.height() > th)
        throw DataError("scene spec: template larger than tile");
      if (spec.width < tw || spec.height < th) throw DataError("scene spec: image smaller than tile");
      const bool centred = spec.kind == SceneKind::BallGrid;
      const Colour bg = centred ? tpl.at(0, 0) : Colour{{96.0, 92.0, 88.0}};
      scene.image = ColourImage(spec.width, spec.height, bg);
      const ColourImage decoy = recolour(tpl);
      const std::size_t cols = spec.width / tw, rows = spec.height / th;
      for (const auto& d : spec.decoys)
        if (d.col >= cols || d.row >= rows) throw DataError("scene spec: decoy outside the grid");
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const std::size_t ox = c * tw + (centred ? (tw - tpl.width()) / 2 : 0);
          const std::size_t oy = r * th + (centred ? (th - tpl.height()) / 2 : 0);
          const bool is_decoy = std::any_of(spec.decoys.begin(), spec.decoys.end(),
                                            [&](const DecoySpec& d) { return d.col == c && d.row == r; });
          paste(scene.image, is_decoy ? decoy : tpl, ox, oy);
          if (!is_decoy) scene.ground_truth.push_back({ox + ax, oy + ay});
        }
      }
      break;
    }
    case SceneKind::OneDimSignal: {
      if (tpl.height() != 1) throw DataError("scene spec: one-dim signal needs a 1-row template");
      if (tpl.width() > spec.width) throw DataError("scene spec: template larger than signal");
      scene.image = ColourImage(spec.width, 1);
      // Background: random walk in log-transmittance, smooth but unrelated.
      std::array<double, 3> lt{};
      for (auto& v : lt) v = std::log(rng.uniform(0.2, 0.8));
      for (std::size_t x = 0; x < spec.width; ++x) {
        Transmittance t;
        for (std::size_t i = 0; i < 3; ++i) {
          lt[i] = std::clamp(lt[i] + 0.35 * rng.normal(), std::log(0.05), std::log(0.95));
          t[i] = std::exp(lt[i]);
        }
        scene.image.at(x, 0) = model.from_transmittance(t);
      }
      std::vector<std::size_t> pos = spec.positions;
      if (pos.empty()) pos.push_back((spec.width - tpl.width()) / 2);
      for (std::size_t p : pos) {
        if (p + tpl.width() > spec.width) throw DataError("scene spec: template runs off the signal");
        paste(scene.image, tpl, p, 0);
        scene.ground_truth.push_back({p + ax, ay});
      }
      std::sort(scene.ground_truth.begin(), scene.ground_truth.end(),
                [](const Position& a, const Position& b) { return a.x < b.x; });
      break;
    }
  }

  switch (spec.drift.kind) {
    case DriftSpec::Kind::None: break;
    case DriftSpec::Kind::PerRowAlpha:
      scene.image = apply_drift(model, scene.image, spec.drift.alpha_top, spec.drift.alpha_bottom);
      break;
    case DriftSpec::Kind::GlobalAlpha:
      scene.image = lipc_scalar_mul(model, spec.drift.alpha, scene.image);
      break;
  }

  if (spec.noise.kind == NoiseSpec::Kind::Impulse) {
    auto noisy = add_noise_sites(model, scene.image, spec.noise.density, spec.noise.sigma2,
                                 spec.seed ^ 0x9E3779B97F4A7C15ULL);
    scene.image = std::move(noisy.image);
    scene.noise_sites = std::move(noisy.sites);
  }
  return scene;
}

// --- JSON ---------------------------------------------------------------

void to_json(nlohmann::json& j, const SceneSpec& s) {
  j = nlohmann::json{{"kind", kind_name(s.kind)},
                     {"width", s.width},
                     {"height", s.height},
                     {"tile_width", s.tile_width},
                     {"tile_height", s.tile_height},
                     {"seed", s.seed}};
  if (!s.positions.empty()) j["positions"] = s.positions;
  nlohmann::json t{{"width", s.templ.width}, {"height", s.templ.height}, {"seed", s.templ.seed}};
  if (!s.templ.path.empty())
    t["path"] = s.templ.path;
  else
    t["builtin"] = s.templ.builtin;
  j["template"] = t;
  auto decoys = nlohmann::json::array();
  for (const auto& d : s.decoys) decoys.push_back({{"col", d.col}, {"row", d.row}});
  j["decoys"] = decoys;
  switch (s.drift.kind) {
    case DriftSpec::Kind::None: j["drift"] = {{"kind", "none"}}; break;
    case DriftSpec::Kind::PerRowAlpha:
      j["drift"] = {{"kind", "per-row-alpha"},
                    {"alpha_top", s.drift.alpha_top},
                    {"alpha_bottom", s.drift.alpha_bottom}};
      break;
    case DriftSpec::Kind::GlobalAlpha:
      j["drift"] = {{"kind", "global-alpha"}, {"alpha", s.drift.alpha}};
      break;
  }
  if (s.noise.kind == NoiseSpec::Kind::None)
    j["noise"] = {{"kind", "none"}};
  else
    j["noise"] = {{"kind", "impulse"}, {"density", s.noise.density}, {"sigma2", s.noise.sigma2}};
}

void from_json(const nlohmann::json& j, SceneSpec& s) {
  try {
    s = SceneSpec{};
    s.kind = parse_kind(j.at("kind").get<std::string>());
    s.width = j.value("width", s.width);
    s.height = j.value("height", s.height);
    if (s.kind == SceneKind::OneDimSignal) s.height = 1;
    s.tile_width = j.value("tile_width", s.tile_width);
    s.tile_height = j.value("tile_height", s.tile_height);
    s.seed = j.value("seed", s.seed);
    s.positions = j.value("positions", s.positions);
    if (j.contains("template")) {
      const auto& t = j.at("template");
      s.templ.builtin = t.value("builtin", s.templ.builtin);
      s.templ.path = t.value("path", std::string{});
      s.templ.width = t.value("width", s.templ.width);
      s.templ.height = t.value("height", s.templ.height);
      s.templ.seed = t.value("seed", s.templ.seed);
    }
    if (j.contains("decoys"))
      for (const auto& d : j.at("decoys")) s.decoys.push_back({d.at("col"), d.at("row")});
    if (j.contains("drift")) {
      const auto& d = j.at("drift");
      const auto kind = d.at("kind").get<std::string>();
      if (kind == "none") {
        s.drift.kind = DriftSpec::Kind::None;
      } else if (kind == "per-row-alpha") {
        s.drift.kind = DriftSpec::Kind::PerRowAlpha;
        s.drift.alpha_top = d.at("alpha_top");
        s.drift.alpha_bottom = d.at("alpha_bottom");
      } else if (kind == "global-alpha") {
        s.drift.kind = DriftSpec::Kind::GlobalAlpha;
        s.drift.alpha = d.at("alpha");
      } else {
        throw DataError("scene spec: unknown drift kind '" + kind + "'");
      }
    }
    if (j.contains("noise")) {
      const auto& n = j.at("noise");
      const auto kind = n.at("kind").get<std::string>();
      if (kind == "none") {
        s.noise.kind = NoiseSpec::Kind::None;
      } else if (kind == "impulse") {
        s.noise.kind = NoiseSpec::Kind::Impulse;
        s.noise.density = n.at("density");
        s.noise.sigma2 = n.at("sigma2");
      } else {
        throw DataError("scene spec: unknown noise kind '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("scene spec: ") + e.what());
  }
  validate(s);
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scene spec " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("scene spec " + path.string() + ": " + e.what());
  }
  return j.get<SceneSpec>();
}

}  // namespace lipc
