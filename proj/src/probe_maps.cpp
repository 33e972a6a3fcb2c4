#include "lipc/probe_maps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "lipc/contact.hpp"
#include "lipc/parallel.hpp"

namespace lipc {

Probe Probe::centred(ColourImage image) {
  Probe p;
  p.anchor_x = (image.width() - 1) / 2;
  p.anchor_y = (image.height() - 1) / 2;
  p.image = std::move(image);
  return p;
}

DistanceMap::DistanceMap(std::size_t width, std::size_t height, Rect valid)
    : width_(width), height_(height), valid_(valid), values_(width * height, kSentinel) {}

Rect valid_rect_for(std::size_t width, std::size_t height, const Probe& probe) {
  const std::size_t pw = probe.image.width();
  const std::size_t ph = probe.image.height();
  if (pw == 0 || ph == 0) throw DataError("empty probe");
  if (probe.anchor_x >= pw || probe.anchor_y >= ph) throw DataError("probe anchor outside probe");
  if (pw > width || ph > height) throw DataError("probe larger than image");
  return {probe.anchor_x, probe.anchor_y, width - pw + 1, height - ph + 1};
}

namespace {

DistanceMap blank_map(const ColourImage& f, const Probe& probe, double p) {
  DistanceMap map(f.width(), f.height(), valid_rect_for(f.width(), f.height(), probe));
  map.probe_width = probe.image.width();
  map.probe_height = probe.image.height();
  map.anchor_x = probe.anchor_x;
  map.anchor_y = probe.anchor_y;
  map.tolerance_p = p;
  return map;
}

Rect clip(const Rect& a, const Rect& b) {
  const std::size_t x0 = std::max(a.x, b.x);
  const std::size_t y0 = std::max(a.y, b.y);
  const std::size_t x1 = std::min(a.x + a.width, b.x + b.width);
  const std::size_t y1 = std::min(a.y + a.height, b.y + b.height);
  if (x1 <= x0 || y1 <= y0) return {};
  return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace

void fill_asplund_map(const MixingModel& model, const ColourImage& f, const Probe& probe,
                      const ToleranceSpec& tol, const Rect& area, DistanceMap& map,
                      const MapOptions& opts) {
  const Rect valid = valid_rect_for(f.width(), f.height(), probe);
  if (map.width() != f.width() || map.height() != f.height() || !(map.valid_rect() == valid))
    throw DataError("distance map does not match the image and probe");
  const Rect work = clip(area, valid);
  if (work.empty()) return;

  const ColourImage& t = probe.image;
  const std::size_t n = t.size();
  const std::size_t discard = tol.discard_count(n);

  // Probe colours and their scaling curves are shared by every window.
  std::vector<ProbeColour> probes;
  probes.reserve(n);
  for (const auto& c : t.pixels()) probes.emplace_back(model, c);

  parallel_for(work.height, opts.threads, [&](std::size_t row) {
    const std::size_t y = work.y + row;
    std::vector<PointContact> pcs(n);
    for (std::size_t x = work.x; x < work.x + work.width; ++x) {
      const std::size_t ox = x - probe.anchor_x;
      const std::size_t oy = y - probe.anchor_y;
      for (std::size_t ty = 0; ty < t.height(); ++ty)
        for (std::size_t tx = 0; tx < t.width(); ++tx) {
          const std::size_t j = ty * t.width() + tx;
          pcs[j] = point_contact(probes[j], f.at(ox + tx, oy + ty));
        }
      const Sandwich s = sandwich(pcs, discard);
      map.at(x, y) = s.mu >= s.lambda ? std::log(s.mu / s.lambda) : 0.0;
    }
  });
}

DistanceMap asplund_map(const MixingModel& model, const ColourImage& f, const Probe& probe,
                        const MapOptions& opts) {
  return asplund_map_tol(model, f, probe, ToleranceSpec{0.0}, opts);
}

DistanceMap asplund_map_tol(const MixingModel& model, const ColourImage& f, const Probe& probe,
                            const ToleranceSpec& tol, const MapOptions& opts) {
  DistanceMap map = blank_map(f, probe, tol.discard_fraction);
  fill_asplund_map(model, f, probe, tol, map.valid_rect(), map, opts);
  return map;
}

namespace {

// Constant windows accumulate rounding noise in the mean; treat a per-pixel
// spread below 1e-9 relative to the mean as zero variance.
bool flat(double norm, double mean, double n) {
  const double tol = 1e-9 * (1.0 + std::abs(mean));
  return norm <= n * tol * tol;
}

}  // namespace

CorrelationMap correlation_map(const ColourImage& f, const Probe& probe, const MapOptions& opts) {
  CorrelationMap out{blank_map(f, probe, 0.0), 0};
  DistanceMap& map = out.field;
  const Rect valid = map.valid_rect();
  const ColourImage& t = probe.image;
  const auto n = static_cast<double>(t.size());

  std::array<double, 3> t_mean{};
  for (const auto& c : t.pixels())
    for (std::size_t k = 0; k < 3; ++k) t_mean[k] += c[k] / n;
  std::array<double, 3> t_norm{};
  for (const auto& c : t.pixels())
    for (std::size_t k = 0; k < 3; ++k) t_norm[k] += (c[k] - t_mean[k]) * (c[k] - t_mean[k]);

  std::vector<std::size_t> zero_rows(valid.height, 0);
  parallel_for(valid.height, opts.threads, [&](std::size_t row) {
    const std::size_t y = valid.y + row;
    for (std::size_t x = valid.x; x < valid.x + valid.width; ++x) {
      const std::size_t ox = x - probe.anchor_x;
      const std::size_t oy = y - probe.anchor_y;
      std::array<double, 3> w_mean{};
      for (std::size_t ty = 0; ty < t.height(); ++ty)
        for (std::size_t tx = 0; tx < t.width(); ++tx)
          for (std::size_t k = 0; k < 3; ++k) w_mean[k] += f.at(ox + tx, oy + ty)[k] / n;
      std::array<double, 3> cross{}, w_norm{};
      for (std::size_t ty = 0; ty < t.height(); ++ty)
        for (std::size_t tx = 0; tx < t.width(); ++tx) {
          const Colour& a = f.at(ox + tx, oy + ty);
          const Colour& b = t.at(tx, ty);
          for (std::size_t k = 0; k < 3; ++k) {
            const double da = a[k] - w_mean[k];
            cross[k] += da * (b[k] - t_mean[k]);
            w_norm[k] += da * da;
          }
        }
      double score = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        if (flat(w_norm[k], w_mean[k], n) || flat(t_norm[k], t_mean[k], n))
          ++zero_rows[row];
        else
          score += std::clamp(cross[k] / std::sqrt(w_norm[k] * t_norm[k]), -1.0, 1.0);
      }
      map.at(x, y) = score / 3.0;
    }
  });
  for (std::size_t z : zero_rows) out.zero_variance += z;
  return out;
}

MatchSet extract_minima(const DistanceMap& map, std::size_t radius, std::size_t max_count,
                        double threshold) {
  MatchSet out;
  out.radius = radius;
  out.threshold = threshold;
  out.tolerance_p = map.tolerance_p;
  const Rect v = map.valid_rect();
  const auto r = static_cast<std::ptrdiff_t>(radius);

  for (std::size_t y = v.y; y < v.y + v.height; ++y) {
    for (std::size_t x = v.x; x < v.x + v.width; ++x) {
      const double c = map.at(x, y);
      if (!(c <= threshold)) continue;
      bool minimum = true;
      bool above_somewhere = false;
      for (std::ptrdiff_t dy = -r; dy <= r && minimum; ++dy) {
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const auto nx = static_cast<std::ptrdiff_t>(x) + dx;
          const auto ny = static_cast<std::ptrdiff_t>(y) + dy;
          if (nx < 0 || ny < 0) continue;
          const auto ux = static_cast<std::size_t>(nx);
          const auto uy = static_cast<std::size_t>(ny);
          if (!v.contains(ux, uy)) continue;
          const double o = map.at(ux, uy);
          // Plateaus resolve to their first position in (y, x) order.
          if (o < c || (o == c && (dy < 0 || (dy == 0 && dx < 0)))) {
            minimum = false;
            break;
          }
          above_somewhere |= (o > c);
        }
      }
      if (minimum && above_somewhere) out.matches.push_back({x, y, c, 0});
    }
  }
  std::stable_sort(out.matches.begin(), out.matches.end(),
                   [](const Match& a, const Match& b) { return a.value < b.value; });
  if (out.matches.size() > max_count) out.matches.resize(max_count);
  for (std::size_t i = 0; i < out.matches.size(); ++i) out.matches[i].rank = i + 1;
  return out;
}

DistanceMap negated(const DistanceMap& map) {
  DistanceMap out = map;
  for (auto& v : out.values())
    if (!std::isnan(v)) v = -v;
  return out;
}

// -- Serialisation -----------------------------------------------------------

namespace {

constexpr std::uint64_t kQuietNaNBits = 0x7FF8000000000000ULL;

void put_le64(std::ostream& os, std::uint64_t bits) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  os.write(b, 8);
}

std::uint64_t get_le64(const unsigned char* b) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return bits;
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* ext) {
  return std::filesystem::path(prefix.string() + ext);
}

}  // namespace

void write_map(const DistanceMap& map, const std::filesystem::path& prefix, bool preview) {
  using nlohmann::json;
  const Rect v = map.valid_rect();
  {
    std::ofstream os(with_suffix(prefix, ".f64"), std::ios::binary);
    if (!os) throw DataError("cannot write " + with_suffix(prefix, ".f64").string());
    for (double d : map.values())
      put_le64(os, std::isnan(d) ? kQuietNaNBits : std::bit_cast<std::uint64_t>(d));
  }

  json header = {
      {"width", map.width()},
      {"height", map.height()},
      {"valid_rect", {{"x", v.x}, {"y", v.y}, {"width", v.width}, {"height", v.height}}},
      {"probe_size", {map.probe_width, map.probe_height}},
      {"anchor", {map.anchor_x, map.anchor_y}},
      {"tolerance_p", map.tolerance_p},
      {"encoding", "float64-le"},
      {"sentinel", "nan"},
  };

  if (preview) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t y = v.y; y < v.y + v.height; ++y)
      for (std::size_t x = v.x; x < v.x + v.width; ++x) {
        lo = std::min(lo, map.at(x, y));
        hi = std::max(hi, map.at(x, y));
      }
    const double span = hi > lo ? hi - lo : 0.0;
    std::ofstream os(with_suffix(prefix, ".pgm"), std::ios::binary);
    if (!os) throw DataError("cannot write " + with_suffix(prefix, ".pgm").string());
    os << "P5\n" << map.width() << ' ' << map.height() << "\n65535\n";
    for (std::size_t y = 0; y < map.height(); ++y)
      for (std::size_t x = 0; x < map.width(); ++x) {
        std::uint16_t s = 65535;
        if (map.is_valid(x, y))
          s = span > 0.0 ? static_cast<std::uint16_t>(std::lround((map.at(x, y) - lo) / span * 65534.0))
                         : 0;
        const char be[2] = {static_cast<char>(s >> 8), static_cast<char>(s & 0xFF)};
        os.write(be, 2);
      }
    header["preview"] = {{"file", with_suffix(prefix, ".pgm").filename().string()},
                         {"min", lo},
                         {"max", hi},
                         {"sentinel_level", 65535}};
  }

  std::ofstream hs(with_suffix(prefix, ".json"));
  if (!hs) throw DataError("cannot write " + with_suffix(prefix, ".json").string());
  hs << header.dump(2) << '\n';
}

DistanceMap read_map(const std::filesystem::path& prefix) {
  using nlohmann::json;
  std::ifstream hs(with_suffix(prefix, ".json"));
  if (!hs) throw DataError("cannot read " + with_suffix(prefix, ".json").string());
  json h;
  try {
    h = json::parse(hs);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad map header: ") + e.what());
  }
  const auto& vr = h.at("valid_rect");
  DistanceMap map(h.at("width").get<std::size_t>(), h.at("height").get<std::size_t>(),
                  Rect{vr.at("x").get<std::size_t>(), vr.at("y").get<std::size_t>(),
                       vr.at("width").get<std::size_t>(), vr.at("height").get<std::size_t>()});
  map.probe_width = h.at("probe_size").at(0).get<std::size_t>();
  map.probe_height = h.at("probe_size").at(1).get<std::size_t>();
  map.anchor_x = h.at("anchor").at(0).get<std::size_t>();
  map.anchor_y = h.at("anchor").at(1).get<std::size_t>();
  map.tolerance_p = h.at("tolerance_p").get<double>();

  std::ifstream is(with_suffix(prefix, ".f64"), std::ios::binary);
  if (!is) throw DataError("cannot read " + with_suffix(prefix, ".f64").string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() != map.values().size() * 8) throw DataError("map sidecar has the wrong size");
  for (std::size_t i = 0; i < map.values().size(); ++i)
    map.values()[i] = std::bit_cast<double>(get_le64(bytes.data() + 8 * i));
  return map;
}

}  // namespace lipc
