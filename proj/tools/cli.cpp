#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lipc/asplund.hpp"
#include "lipc/errors.hpp"
#include "lipc/image_io.hpp"
#include "lipc/probe_maps.hpp"
#include "lipc/synth.hpp"
#include "verify.hpp"

namespace lipc::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_list(const std::string& s, std::size_t n, const char* what) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size() || item.front() == '-')
      throw UsageError(std::string(what) + ": expected " + std::to_string(n) +
                       " comma-separated non-negative integers, got '" + s + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.size() != n)
    throw UsageError(std::string(what) + ": expected " + std::to_string(n) + " values, got '" +
                     s + "'");
  return out;
}

json clamps_json(const ClampStats& s) {
  return {{"transmittance", s.transmittance}, {"gamut", s.gamut}, {"out_of_range", s.out_of_range}};
}

// Probe given as an image file or as a rectangle cut from an image.
struct ProbeArgs {
  std::string path;
  std::string rect;
  std::string source;
  std::string anchor;

  void add(CLI::App* cmd) {
    auto* p = cmd->add_option("--probe", path, "probe image (PNG/PPM)")->check(CLI::ExistingFile);
    auto* r = cmd->add_option("--probe-rect", rect, "probe cut from an image: x,y,w,h");
    p->excludes(r);
    cmd->add_option("--probe-source", source, "image the probe rect is cut from (default: input)")
        ->check(CLI::ExistingFile)
        ->needs(r);
    cmd->add_option("--anchor", anchor, "probe anchor x,y (default: centre)");
  }

  Probe resolve(const MixingModel& model, const ColourImage& input) const {
    ColourImage img;
    if (!path.empty()) {
      img = load_image(path, model);
    } else if (!rect.empty()) {
      const auto r = parse_list(rect, 4, "--probe-rect");
      const ColourImage src = source.empty() ? input : load_image(source, model);
      if (r[2] == 0 || r[3] == 0 || r[0] + r[2] > src.width() || r[1] + r[3] > src.height())
        throw DataError("--probe-rect " + rect + " does not fit inside the " +
                        std::to_string(src.width()) + "x" + std::to_string(src.height()) +
                        " source image");
      img = ColourImage(r[2], r[3]);
      for (std::size_t y = 0; y < r[3]; ++y)
        for (std::size_t x = 0; x < r[2]; ++x) img.at(x, y) = src.at(r[0] + x, r[1] + y);
    } else {
      throw UsageError("one of --probe or --probe-rect is required");
    }
    Probe p = Probe::centred(std::move(img));
    if (!anchor.empty()) {
      const auto a = parse_list(anchor, 2, "--anchor");
      if (a[0] >= p.image.width() || a[1] >= p.image.height())
        throw UsageError("--anchor lies outside the probe");
      p.anchor_x = a[0];
      p.anchor_y = a[1];
    }
    return p;
  }
};

void add_fraction(CLI::App* cmd, double& p) {
  cmd->add_option("--discard-fraction", p, "fraction p in [0, 1) of points discarded per side")
      ->check(CLI::Validator(
          [](std::string& s) -> std::string {
            try {
              const double v = std::stod(s);
              if (v >= 0.0 && v < 1.0) return {};
            } catch (const std::exception&) {
            }
            return "must be a number in [0, 1)";
          },
          "[0,1)"));
}

void add_threads(CLI::App* cmd, std::size_t& threads) {
  cmd->add_option("--threads", threads, "worker threads (default: $LIPC_THREADS or 1)")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
}

Scene preset_scene(const MixingModel& model, const std::string& name, std::optional<std::uint64_t> seed,
                   SceneSpec& spec) {
  spec = SceneSpec{};
  if (name == "fig4" || name == "fig4-clean") {
    spec.drift.kind = DriftSpec::Kind::PerRowAlpha;
    spec.drift.alpha_top = 0.5;
    spec.drift.alpha_bottom = 3.0;
    spec.decoys.push_back({1, 2});
    spec.seed = 1;
    if (name == "fig4") {
      spec.noise.kind = NoiseSpec::Kind::Impulse;
      spec.noise.density = 0.01;
      spec.noise.sigma2 = 2.6;
    }
  } else if (name == "three-tile") {
    spec.width = 48;
    spec.height = 16;
  } else {
    throw UsageError("unknown preset '" + name + "' (fig4, fig4-clean, three-tile)");
  }
  if (seed) spec.seed = *seed;
  return synth_scene(model, spec);
}

}  // namespace

std::size_t default_threads() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return v;
  }
  return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const MixingModel& model = make_mixing_model();
  CLI::App app{"LIPC colour algebra and Asplund probing distances"};
  app.name(args.empty() ? "lipc" : args.front());
  app.require_subcommand(1);
  bool as_json = false;
  std::size_t threads = default_threads();
  double p = 0.0;

  // distance
  std::string f_path, g_path;
  auto* distance = app.add_subcommand("distance", "Asplund distance between two same-size images");
  distance->add_option("f", f_path, "first image")->required()->check(CLI::ExistingFile);
  distance->add_option("g", g_path, "second image (the probe)")->required()->check(CLI::ExistingFile);
  add_fraction(distance, p);
  distance->add_flag("--json", as_json, "machine-readable output");

  // map
  std::string in_path, out_prefix;
  bool preview = false;
  ProbeArgs probe_args;
  auto* map = app.add_subcommand("map", "sliding-window distance map");
  map->add_option("image", in_path, "input image")->required()->check(CLI::ExistingFile);
  probe_args.add(map);
  map->add_option("--out", out_prefix, "output prefix (writes .f64, .json)")->required();
  map->add_flag("--preview", preview, "also write a 16-bit PGM preview");
  add_fraction(map, p);
  add_threads(map, threads);
  map->add_flag("--json", as_json, "machine-readable output");

  // match
  std::size_t radius = 8, max_count = 100;
  std::optional<double> threshold;
  std::string map_out;
  auto* match = app.add_subcommand("match", "regional minima of the distance map (JSON)");
  match->add_option("image", in_path, "input image")->required()->check(CLI::ExistingFile);
  probe_args.add(match);
  add_fraction(match, p);
  match->add_option("--radius", radius, "suppression radius (Chebyshev)")
      ->check(CLI::Range(std::size_t{0}, std::size_t{4096}));
  match->add_option("--threshold", threshold, "keep minima with value <= threshold");
  match->add_option("--max-count", max_count, "maximum number of matches")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 30));
  match->add_option("--map-out", map_out, "also write the map under this prefix");
  add_threads(match, threads);

  // correlate
  auto* correlate = app.add_subcommand("correlate", "normalised cross-correlation baseline (JSON)");
  correlate->add_option("image", in_path, "input image")->required()->check(CLI::ExistingFile);
  probe_args.add(correlate);
  correlate->add_option("--radius", radius, "suppression radius (Chebyshev)")
      ->check(CLI::Range(std::size_t{0}, std::size_t{4096}));
  correlate->add_option("--max-count", max_count, "number of maxima reported")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 30));
  correlate->add_option("--out", out_prefix, "also write the correlation field");
  add_threads(correlate, threads);

  // synth
  std::string spec_path, preset, template_out, truth_out, spec_out;
  std::optional<std::uint64_t> seed;
  auto* synth = app.add_subcommand("synth", "synthesise a scene with known ground truth");
  auto* spec_opt = synth->add_option("--spec", spec_path, "scene spec JSON")->check(CLI::ExistingFile);
  synth->add_option("--preset", preset, "built-in scene: fig4, fig4-clean, three-tile")
      ->excludes(spec_opt);
  synth->add_option("--seed", seed, "override the spec seed");
  synth->add_option("--out", out_prefix, "output image (.png or .ppm)")->required();
  synth->add_option("--template-out", template_out, "write the template image");
  synth->add_option("--truth-out", truth_out, "write ground truth JSON");
  synth->add_option("--spec-out", spec_out, "write the resolved scene spec JSON");
  synth->add_flag("--json", as_json, "machine-readable output");

  // noise
  std::string noise_out;
  double density = 0.01, sigma2 = 2.6;
  std::uint64_t noise_seed = 0;
  auto* noise = app.add_subcommand("noise", "impulse noise on a fraction of pixels");
  noise->add_option("input", in_path, "input image")->required()->check(CLI::ExistingFile);
  noise->add_option("output", noise_out, "output image")->required();
  noise->add_option("--density", density, "fraction of pixels perturbed")
      ->check(CLI::Range(0.0, 1.0));
  noise->add_option("--sigma2", sigma2, "per-channel noise variance")
      ->check(CLI::NonNegativeNumber);
  noise->add_option("--seed", noise_seed, "RNG seed");
  noise->add_flag("--json", as_json, "machine-readable output");

  // drift
  std::optional<double> alpha, alpha_top, alpha_bottom;
  auto* drift = app.add_subcommand("drift", "illumination drift via LIPC scalar multiplication");
  drift->add_option("input", in_path, "input image")->required()->check(CLI::ExistingFile);
  drift->add_option("output", noise_out, "output image")->required();
  auto* a_opt = drift->add_option("--alpha", alpha, "global factor")->check(CLI::PositiveNumber);
  auto* top = drift->add_option("--alpha-top", alpha_top, "factor on the first row")
                  ->check(CLI::PositiveNumber);
  auto* bottom = drift->add_option("--alpha-bottom", alpha_bottom, "factor on the last row")
                     ->check(CLI::PositiveNumber);
  top->needs(bottom);
  bottom->needs(top);
  a_opt->excludes(top)->excludes(bottom);
  drift->add_flag("--json", as_json, "machine-readable output");

  // verify
  bool quick = false, perturb_k = false;
  auto* verify = app.add_subcommand("verify", "run the oracle and invariant suites");
  verify->add_flag("--quick", quick, "subsampled suites");
  verify->add_flag("--perturb-k", perturb_k, "negative control: corrupt K before construction");
  verify->add_flag("--json", as_json, "machine-readable output");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*distance) {
      const auto f = load_image(f_path, model);
      const auto g = load_image(g_path, model);
      if (!f.same_shape(g))
        throw DataError("images differ in size: " + std::to_string(f.width()) + "x" +
                        std::to_string(f.height()) + " vs " + std::to_string(g.width()) + "x" +
                        std::to_string(g.height()));
      const ToleranceSpec tol{p};
      const auto d = image_pair_distance_tol(model, f, g, tol);
      if (as_json) {
        out << json{{"command", "distance"},
                    {"width", f.width()},
                    {"height", f.height()},
                    {"discard_fraction", p},
                    {"discard_count", tol.discard_count(f.size())},
                    {"distance", d.distance},
                    {"lambda", d.lambda},
                    {"mu", d.mu},
                    {"discarded_low", d.discarded_low},
                    {"discarded_high", d.discarded_high},
                    {"clamps", clamps_json(d.clamps)}}
                   .dump(2)
            << "\n";
      } else {
        out << std::fixed << std::setprecision(6) << "distance " << d.distance << "\n"
            << std::defaultfloat << std::setprecision(12) << (p > 0 ? "lambda' " : "lambda ")
            << d.lambda << "\n"
            << (p > 0 ? "mu' " : "mu ") << d.mu << "\n"
            << "discarded " << d.discarded_low.size() << " (upper probe), "
            << d.discarded_high.size() << " (lower probe)\n"
            << "clamps transmittance " << d.clamps.transmittance << ", gamut " << d.clamps.gamut
            << ", out-of-range " << d.clamps.out_of_range << "\n";
      }
      return kOk;
    }

    if (*map || *match) {
      const auto f = load_image(in_path, model);
      const Probe probe = probe_args.resolve(model, f);
      const auto dm = asplund_map_tol(model, f, probe, ToleranceSpec{p}, MapOptions{threads});
      if (*match) {
        if (!map_out.empty()) write_map(dm, map_out, false);
        const double th = threshold.value_or(std::numeric_limits<double>::infinity());
        const auto ms = extract_minima(dm, radius, max_count, th);
        json list = json::array();
        for (const auto& m : ms.matches)
          list.push_back({{"rank", m.rank}, {"x", m.x}, {"y", m.y}, {"value", m.value}});
        out << json{{"command", "match"},
                    {"radius", radius},
                    {"threshold", threshold ? json(*threshold) : json(nullptr)},
                    {"max_count", max_count},
                    {"discard_fraction", p},
                    {"probe_size", {probe.image.width(), probe.image.height()}},
                    {"anchor", {probe.anchor_x, probe.anchor_y}},
                    {"matches", list}}
                   .dump(2)
            << "\n";
        return kOk;
      }
      write_map(dm, out_prefix, preview);
      std::vector<std::string> files{out_prefix + ".f64", out_prefix + ".json"};
      if (preview) files.push_back(out_prefix + ".pgm");
      std::optional<Match> best;
      const Rect v = dm.valid_rect();
      for (std::size_t y = v.y; y < v.y + v.height; ++y)
        for (std::size_t x = v.x; x < v.x + v.width; ++x)
          if (!best || dm.at(x, y) < best->value) best = Match{x, y, dm.at(x, y), 1};
      if (as_json) {
        std::ifstream hs(out_prefix + ".json");
        out << json{{"command", "map"},
                    {"prefix", out_prefix},
                    {"files", files},
                    {"header", json::parse(hs)},
                    {"minimum", {{"x", best->x}, {"y", best->y}, {"value", best->value}}}}
                   .dump(2)
            << "\n";
      } else {
        for (const auto& file : files) out << "wrote " << file << "\n";
        out << std::setprecision(12) << "minimum " << best->value << " at (" << best->x << ", "
            << best->y << ")\n";
      }
      return kOk;
    }

    if (*correlate) {
      const auto f = load_image(in_path, model);
      const Probe probe = probe_args.resolve(model, f);
      const auto cm = correlation_map(f, probe, MapOptions{threads});
      if (!out_prefix.empty()) write_map(cm.field, out_prefix, false);
      const auto ms = extract_minima(negated(cm.field), radius, max_count,
                                     std::numeric_limits<double>::infinity());
      json list = json::array();
      for (const auto& m : ms.matches)
        list.push_back({{"rank", m.rank}, {"x", m.x}, {"y", m.y}, {"score", cm.field.at(m.x, m.y)}});
      out << json{{"command", "correlate"},
                  {"radius", radius},
                  {"max_count", max_count},
                  {"zero_variance", cm.zero_variance},
                  {"matches", list}}
                 .dump(2)
          << "\n";
      return kOk;
    }

    if (*synth) {
      SceneSpec spec;
      Scene scene;
      if (!spec_path.empty()) {
        spec = load_scene_spec(spec_path);
        if (seed) spec.seed = *seed;
        scene = synth_scene(model, spec);
      } else if (!preset.empty()) {
        scene = preset_scene(model, preset, seed, spec);
      } else {
        throw UsageError("synth needs --spec or --preset");
      }
      save_image(scene.image, out_prefix);
      if (!template_out.empty()) save_image(scene.template_image, template_out);
      json truth = json::array();
      for (const auto& c : scene.ground_truth) truth.push_back({{"x", c.x}, {"y", c.y}});
      if (!truth_out.empty()) {
        std::ofstream ts(truth_out);
        if (!ts) throw DataError("cannot write " + truth_out);
        ts << truth.dump(2) << "\n";
      }
      if (!spec_out.empty()) {
        std::ofstream ss(spec_out);
        if (!ss) throw DataError("cannot write " + spec_out);
        ss << json(spec).dump(2) << "\n";
      }
      if (as_json) {
        out << json{{"command", "synth"},
                    {"image", out_prefix},
                    {"width", scene.image.width()},
                    {"height", scene.image.height()},
                    {"spec", json(spec)},
                    {"ground_truth", truth},
                    {"noise_sites", scene.noise_sites.size()}}
                   .dump(2)
            << "\n";
      } else {
        out << "wrote " << out_prefix << " (" << scene.image.width() << "x"
            << scene.image.height() << ", " << scene.ground_truth.size() << " template centres, "
            << scene.noise_sites.size() << " noise sites)\n";
      }
      return kOk;
    }

    if (*noise || *drift) {
      const auto img = load_image(in_path, model);
      json report{{"command", *noise ? "noise" : "drift"}, {"input", in_path}, {"output", noise_out}};
      ColourImage result;
      if (*noise) {
        auto r = add_noise_sites(model, img, density, sigma2, noise_seed);
        result = std::move(r.image);
        report["sites"] = r.sites.size();
        report["seed"] = noise_seed;
      } else {
        if (!alpha && !alpha_top) throw UsageError("drift needs --alpha or --alpha-top/--alpha-bottom");
        const double a0 = alpha ? *alpha : *alpha_top;
        const double a1 = alpha ? *alpha : *alpha_bottom;
        result = apply_drift(model, img, a0, a1);
        report["alpha_top"] = a0;
        report["alpha_bottom"] = a1;
      }
      save_image(result, noise_out);
      if (as_json)
        out << report.dump(2) << "\n";
      else
        out << "wrote " << noise_out << "\n";
      return kOk;
    }

    if (*verify) {
      const auto checks = verify::run_verify(quick, perturb_k);
      bool all = true;
      json suites = json::array();
      for (const auto& c : checks) {
        all &= c.pass;
        suites.push_back(
            {{"name", c.name}, {"pass", c.pass}, {"seconds", c.seconds}, {"detail", c.detail}});
        if (!as_json)
          out << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << std::fixed
              << std::setprecision(2) << c.seconds << " s): " << c.detail << "\n";
      }
      if (as_json)
        out << json{{"command", "verify"}, {"quick", quick}, {"pass", all}, {"suites", suites}}.dump(2)
            << "\n";
      return all ? kOk : kVerifyFailed;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kData;
  }
  return kUsage;
}

}  // namespace lipc::cli
