#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "lipc/asplund.hpp"
#include "lipc/errors.hpp"
#include "lipc/image_io.hpp"
#include "lipc/lip_grey.hpp"
#include "lipc/lipc_ops.hpp"
#include "lipc/probe_maps.hpp"
#include "lipc/synth.hpp"

namespace py = pybind11;
using namespace lipc;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// H x W x 3 float array <-> ColourImage.
ColourImage to_image(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 3)
    throw DataError("expected an H x W x 3 array");
  const auto h = static_cast<std::size_t>(a.shape(0)), w = static_cast<std::size_t>(a.shape(1));
  ColourImage img(w, h);
  const double* p = a.data();
  for (std::size_t i = 0; i < w * h; ++i) img[i] = Colour{{p[3 * i], p[3 * i + 1], p[3 * i + 2]}};
  return img;
}

Array to_array(const ColourImage& img) {
  Array a({img.height(), img.width(), std::size_t{3}});
  double* p = a.mutable_data();
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t ch = 0; ch < 3; ++ch) p[3 * i + ch] = img[i][ch];
  return a;
}

Array to_array(const DistanceMap& m) {
  Array a({m.height(), m.width()});
  std::copy(m.values().begin(), m.values().end(), a.mutable_data());
  return a;
}

Probe make_probe(const Array& probe, std::optional<std::pair<std::size_t, std::size_t>> anchor) {
  Probe p = Probe::centred(to_image(probe));
  if (anchor) {
    if (anchor->first >= p.image.width() || anchor->second >= p.image.height())
      throw DataError("anchor lies outside the probe");
    p.anchor_x = anchor->first;
    p.anchor_y = anchor->second;
  }
  return p;
}

py::dict clamps(const ClampStats& s) {
  py::dict d;
  d["transmittance"] = s.transmittance;
  d["gamut"] = s.gamut;
  d["out_of_range"] = s.out_of_range;
  return d;
}

py::tuple rect(const Rect& r) { return py::make_tuple(r.x, r.y, r.width, r.height); }

}  // namespace

PYBIND11_MODULE(_lipc, m) {
  m.doc() = "LIPC colour algebra and Asplund probing distances";
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_ArithmeticError);

  m.def("model_matrices", [] {
    const auto& mm = make_mixing_model();
    py::dict d;
    d["M"] = mm.M();
    d["K"] = mm.K();
    d["U"] = mm.U();
    d["A"] = mm.to_gamut();
    d["B"] = mm.to_transmittance_matrix();
    return d;
  }, "Constants and derived products of the standard mixing model.");

  m.def("to_transmittance", [](const Array& f) {
    const auto& mm = make_mixing_model();
    ColourImage img = to_image(f);
    for (auto& p : img.pixels()) {
      const Transmittance t = mm.to_transmittance(p);
      p = Colour{{t[0], t[1], t[2]}};
    }
    return to_array(img);
  }, py::arg("image"), "Per-pixel transmittance U^-1 K c (clamped).");

  m.def("scalar_mul", [](double alpha, const Array& f) {
    return to_array(lipc_scalar_mul(make_mixing_model(), alpha, to_image(f)));
  }, py::arg("alpha"), py::arg("image"), "alpha (x)c f.");

  m.def("add", [](const Array& f, const Array& g) {
    return to_array(lipc_add(make_mixing_model(), to_image(f), to_image(g)));
  }, py::arg("f"), py::arg("g"), "f (+)c g.");

  m.def("colour_pair_distance", [](std::array<double, 3> a, std::array<double, 3> b) {
    return colour_pair_distance(make_mixing_model(), Colour{a}, Colour{b});
  }, py::arg("c1"), py::arg("c2"));

  m.def("image_pair_distance", [](const Array& f, const Array& g, double p) {
    const auto d = image_pair_distance_tol(make_mixing_model(), to_image(f), to_image(g),
                                           ToleranceSpec{p});
    py::dict out;
    out["distance"] = d.distance;
    out["lambda"] = d.lambda;
    out["mu"] = d.mu;
    out["discarded_low"] = d.discarded_low;
    out["discarded_high"] = d.discarded_high;
    out["clamps"] = clamps(d.clamps);
    return out;
  }, py::arg("f"), py::arg("g"), py::arg("discard_fraction") = 0.0,
        "Asplund distance between same-size images, optionally with tolerance.");

  m.def("marginal_distance", [](const Array& f, const Array& g) {
    return grey::marginal_asplund_distance(to_image(f), to_image(g)).distance;
  }, py::arg("f"), py::arg("g"), "Channel-by-channel LIP Asplund distance.");

  m.def("asplund_map", [](const Array& f, const Array& probe, double p,
                          std::optional<std::pair<std::size_t, std::size_t>> anchor,
                          std::size_t threads) {
    const auto map = asplund_map_tol(make_mixing_model(), to_image(f), make_probe(probe, anchor),
                                     ToleranceSpec{p}, MapOptions{threads});
    return py::make_tuple(to_array(map), rect(map.valid_rect()));
  }, py::arg("image"), py::arg("probe"), py::arg("discard_fraction") = 0.0,
        py::arg("anchor") = py::none(), py::arg("threads") = 1,
        "Distance map (NaN outside the valid rect) and the valid rect (x, y, w, h).");

  m.def("correlation_map", [](const Array& f, const Array& probe,
                              std::optional<std::pair<std::size_t, std::size_t>> anchor) {
    const auto c = correlation_map(to_image(f), make_probe(probe, anchor));
    return py::make_tuple(to_array(c.field), rect(c.field.valid_rect()));
  }, py::arg("image"), py::arg("probe"), py::arg("anchor") = py::none());

  m.def("match", [](const Array& f, const Array& probe, double p, std::size_t radius,
                    std::size_t max_count, std::optional<double> threshold, std::size_t threads) {
    const auto map = asplund_map_tol(make_mixing_model(), to_image(f), make_probe(probe, {}),
                                     ToleranceSpec{p}, MapOptions{threads});
    const auto ms = extract_minima(map, radius, max_count,
                                   threshold.value_or(std::numeric_limits<double>::infinity()));
    py::list out;
    for (const auto& mt : ms.matches) {
      py::dict d;
      d["rank"] = mt.rank;
      d["x"] = mt.x;
      d["y"] = mt.y;
      d["value"] = mt.value;
      out.append(d);
    }
    return out;
  }, py::arg("image"), py::arg("probe"), py::arg("discard_fraction") = 0.0, py::arg("radius") = 8,
        py::arg("max_count") = 100, py::arg("threshold") = py::none(), py::arg("threads") = 1,
        "Regional minima of the distance map, best first.");

  m.def("synth_scene", [](const std::string& spec_json) {
    SceneSpec spec;
    try {
      spec = nlohmann::json::parse(spec_json).get<SceneSpec>();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("scene spec: ") + e.what());
    }
    const Scene s = synth_scene(make_mixing_model(), spec);
    py::list truth;
    for (const auto& c : s.ground_truth) truth.append(py::make_tuple(c.x, c.y));
    py::dict d;
    d["image"] = to_array(s.image);
    d["template"] = to_array(s.template_image);
    d["ground_truth"] = truth;
    d["noise_sites"] = s.noise_sites;
    return d;
  }, py::arg("spec_json"), "Synthesise a scene from a JSON scene spec.");

  m.def("load_image", [](const std::string& path) { return to_array(load_image(path)); },
        py::arg("path"));
  m.def("save_image", [](const Array& img, const std::string& path) { save_image(to_image(img), path); },
        py::arg("image"), py::arg("path"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    std::vector<std::string> argv{"lipc"};
    argv.insert(argv.end(), args.begin(), args.end());
    int rc = 0;
    {
      py::gil_scoped_release release;
      rc = cli::run(argv, out, err);
    }
    return py::make_tuple(rc, out.str(), err.str());
  }, py::arg("args"), "Run the command-line tool in-process; returns (exit code, stdout, stderr).");
}
