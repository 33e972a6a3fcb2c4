// One PASS/FAIL line per acceptance criterion. `--only ACn` runs one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "cli.hpp"
#include "lipc/probe_maps.hpp"
#include "lipc/synth.hpp"
#include "verify.hpp"

namespace {

using namespace lipc;
using verify::Check;

struct Criterion {
  const char* id;
  const char* title;
  double budget_s;  // <= 0: none
  std::function<Check()> run;
};

Check all_of(std::initializer_list<Check> parts) {
  Check c;
  c.pass = true;
  for (const auto& p : parts) {
    c.pass &= p.pass;
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += p.name + (p.pass ? "" : " [FAIL]") + ": " + p.detail;
  }
  return c;
}

SceneSpec wall_spec(std::uint64_t seed, bool noisy) {
  SceneSpec s;
  s.drift.kind = DriftSpec::Kind::PerRowAlpha;
  s.drift.alpha_top = 0.5;
  s.drift.alpha_bottom = 3.0;
  s.decoys.push_back({1, 2});
  s.seed = seed;
  if (noisy) {
    s.noise.kind = NoiseSpec::Kind::Impulse;
    s.noise.density = 0.01;
    s.noise.sigma2 = 2.6;
  }
  return s;
}

// Ground-truth centres with a detection within `slack` pixels (Chebyshev).
std::size_t found(const std::vector<Position>& truth, const MatchSet& ms, std::size_t slack) {
  std::size_t n = 0;
  for (const auto& t : truth) {
    bool hit = false;
    for (const auto& m : ms.matches) {
      const auto dx = m.x > t.x ? m.x - t.x : t.x - m.x;
      const auto dy = m.y > t.y ? m.y - t.y : t.y - m.y;
      hit |= dx <= slack && dy <= slack;
    }
    n += hit;
  }
  return n;
}

bool same_set(const std::vector<Position>& truth, const MatchSet& ms) {
  std::vector<Position> got;
  for (const auto& m : ms.matches) got.push_back({m.x, m.y});
  std::sort(got.begin(), got.end());
  std::vector<Position> want = truth;
  std::sort(want.begin(), want.end());
  return got == want;
}

Check ac1() {
  const auto& m = make_mixing_model();
  Check random = verify::timed("random images", [&] { return verify::invariance_suite(m, 20, 32, 105); });
  Check scene = verify::timed("darkened tiled scene", [&] {
    SceneSpec s;
    s.drift.kind = DriftSpec::Kind::GlobalAlpha;
    s.drift.alpha = 2.0;
    const Scene sc = synth_scene(m, s);
    const auto map = asplund_map(m, sc.image, Probe::centred(sc.template_image));
    double worst = 0.0;
    for (const auto& c : sc.ground_truth) worst = std::max(worst, map.at(c.x, c.y));
    Check c;
    c.pass = worst <= 1e-7;
    std::ostringstream os;
    os << sc.ground_truth.size() << " tile centres of 2 (x) scene, max map value " << worst;
    c.detail = os.str();
    return c;
  });
  return all_of({random, scene});
}

Check ac2() {
  const auto& m = make_mixing_model();
  return all_of({verify::timed("colours", [&] { return verify::oracle_colour_suite(m, 1000, 101); }),
                 verify::timed("images", [&] { return verify::oracle_image_suite(m, 100, 102); })});
}

Check ac3() {
  const auto& m = make_mixing_model();
  // Same pairs as AC2 (seeds 101 and 102).
  return all_of({verify::timed("oracle pairs",
                               [&] { return verify::contact_geometry_suite(m, 1000, 100, 101); })});
}

Check ac4() {
  const auto& m = make_mixing_model();
  return all_of({verify::timed("monotone in p", [&] { return verify::tolerance_suite(m, 50, 106); }),
                 verify::timed("two outliers", [&] { return verify::outlier_suite(m, 48); })});
}

Check ac5() {
  const auto& m = make_mixing_model();
  const std::uint64_t seed = 1;
  const Scene clean = synth_scene(m, wall_spec(seed, false));
  const Scene noisy = synth_scene(m, wall_spec(seed, true));
  const Probe probe = Probe::centred(clean.template_image);
  const auto& gt = clean.ground_truth;
  const std::size_t radius = 8, cap = 100;
  const double threshold = 0.5;

  const auto a = extract_minima(asplund_map(m, clean.image, probe), radius, cap, threshold);
  const auto b0 = extract_minima(asplund_map(m, noisy.image, probe), radius, cap, threshold);
  const auto bt = extract_minima(asplund_map_tol(m, noisy.image, probe, ToleranceSpec{2.0 / 256}),
                                 radius, cap, threshold);
  const auto ncc = correlation_map(clean.image, probe);
  const auto c = extract_minima(negated(ncc.field), radius, gt.size(),
                                std::numeric_limits<double>::infinity());

  const bool pa = same_set(gt, a);
  const bool pb = found(gt, bt, 0) == gt.size() && found(gt, b0, 0) < gt.size();
  const bool pc = found(gt, c, 1) < gt.size();
  std::ostringstream os;
  os << "seed " << seed << ", " << gt.size() << " centres; (a) clean: " << found(gt, a, 0) << "/"
     << gt.size() << " exact, " << a.matches.size() << " minima" << (pa ? "" : " [FAIL]")
     << "; (b) noisy p=2/256: " << found(gt, bt, 0) << "/" << gt.size() << ", p=0: "
     << found(gt, b0, 0) << "/" << gt.size() << (pb ? "" : " [FAIL]") << "; (c) NCC top-"
     << gt.size() << ": " << found(gt, c, 1) << "/" << gt.size() << " within 1 px"
     << (pc ? "" : " [FAIL]");
  Check out;
  out.pass = pa && pb && pc;
  out.detail = os.str();
  return out;
}

Check ac6() { return all_of({verify::timed("marginal", [] { return verify::marginal_suite(100, 103); })}); }

Check ac7() {
  const auto& m = make_mixing_model();
  return all_of({verify::timed("algebra", [&] { return verify::algebra_suite(m, 1000, 107); })});
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Check ac8() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("lipc_ac8_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ostringstream sink;
  const auto cli = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "lipc");
    const int rc = cli::run(args, sink, sink);
    if (rc != 0) throw std::runtime_error("lipc " + args[1] + " exited with " + std::to_string(rc) + ": " + sink.str());
  };
  const std::string scene = (dir / "scene.png").string(), tpl = (dir / "template.png").string();
  cli({"synth", "--preset", "fig4", "--out", scene, "--template-out", tpl});
  Check c;
  c.pass = true;
  std::size_t bytes = 0;
  for (const std::string p : {"0", "0.0078125"}) {
    const std::string one = (dir / ("t1_" + p)).string(), eight = (dir / ("t8_" + p)).string();
    cli({"map", scene, "--probe", tpl, "--discard-fraction", p, "--threads", "1", "--out", one});
    cli({"map", scene, "--probe", tpl, "--discard-fraction", p, "--threads", "8", "--out", eight});
    for (const char* ext : {".f64", ".json"}) {
      const std::string x = slurp(one + ext), y = slurp(eight + ext);
      c.pass &= !x.empty() && x == y;
      bytes += x.size();
    }
  }
  fs::remove_all(dir);
  c.detail = "map sidecars and headers for p=0 and p=2/256, --threads 1 vs 8: " +
             std::string(c.pass ? "byte-identical" : "DIFFER") + " (" + std::to_string(bytes) +
             " bytes compared)";
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--only ACn]\n";
      return 2;
    }
  }
  const std::vector<Criterion> criteria{
      {"AC1", "illumination invariance", 10, ac1},
      {"AC2", "oracle equivalence", 60, ac2},
      {"AC3", "contact geometry", 0, ac3},
      {"AC4", "tolerance behaviour", 0, ac4},
      {"AC5", "brick-wall reconstruction", 120, ac5},
      {"AC6", "marginal metric", 0, ac6},
      {"AC7", "algebra suite", 0, ac7},
      {"AC8", "thread determinism", 0, ac8},
  };
  bool all = true, ran = false;
  for (const auto& cr : criteria) {
    if (!only.empty() && only != cr.id) continue;
    ran = true;
    Check c = verify::timed(cr.id, cr.run);
    const bool in_budget = cr.budget_s <= 0 || c.seconds <= cr.budget_s;
    const bool pass = c.pass && in_budget;
    all &= pass;
    std::printf("%s %s  %s: %s (%.2f s%s)\n", cr.id, pass ? "PASS" : "FAIL", cr.title,
                c.detail.c_str(), c.seconds,
                cr.budget_s > 0 ? (in_budget ? ", within budget" : ", OVER BUDGET") : "");
    std::fflush(stdout);
  }
  if (!ran) {
    std::cerr << "unknown criterion " << only << "\n";
    return 2;
  }
  return all ? 0 : 1;
}
