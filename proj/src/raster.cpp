#include "rollpass/raster.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace rollpass {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_same_dims(const Raster& a, const Raster& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch("raster dimensions differ: " + std::to_string(a.width()) +
                            "x" + std::to_string(a.height()) + " vs " +
                            std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

// Mask of the valid (non-padding) bits in the last byte of a row.
std::uint8_t tail_keep_mask(int width_px) {
  const int valid = width_px & 7;
  return valid == 0 ? 0xFF : static_cast<std::uint8_t>(0xFF << (8 - valid));
}

}  // namespace

Raster::Raster(const RasterConfig& cfg) : Raster(cfg.width_px, cfg.height_px, cfg.resolution_mm) {}

Raster::Raster(int width_px, int height_px, double resolution_mm)
    : w_(width_px), h_(height_px), stride_((width_px + 7) / 8), res_(resolution_mm),
      bytes_(static_cast<std::size_t>(stride_) * height_px, 0) {
  if (w_ <= 0 || h_ <= 0 || !(res_ > 0.0)) {
    throw Error("invalid raster configuration");
  }
}

long long Raster::area_px() const {
  long long n = 0;
  for (std::uint8_t b : bytes_) {
    n += std::popcount(static_cast<unsigned>(b));
  }
  return n;
}

int Raster::col_at(double x) const {
  return w_ / 2 + static_cast<int>(std::floor(x / res_));
}

int Raster::row_at(double y) const {
  return h_ / 2 - static_cast<int>(std::floor(y / res_));
}

Raster intersect(const Raster& a, const Raster& b) {
  require_same_dims(a, b);
  Raster out = a;
  auto& bytes = out.bytes();
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] &= b.bytes()[i];
  }
  return out;
}

Raster union_of(const Raster& a, const Raster& b) {
  require_same_dims(a, b);
  Raster out = a;
  auto& bytes = out.bytes();
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] |= b.bytes()[i];
  }
  return out;
}

Raster complement(const Raster& a) {
  Raster out = a;
  auto& bytes = out.bytes();
  const std::uint8_t keep = tail_keep_mask(a.width());
  const int stride = a.byte_stride();
  for (int row = 0; row < a.height(); ++row) {
    for (int k = 0; k < stride; ++k) {
      std::uint8_t& b = bytes[static_cast<std::size_t>(row) * stride + k];
      b = static_cast<std::uint8_t>(~b);
      if (k == stride - 1) {
        b &= keep;
      }
    }
  }
  return out;
}

Raster dilate(const Raster& r, int k) {
  if (k < 1) {
    throw Error("dilation kernel diameter must be >= 1");
  }
  // offsets with sqrt(dx^2 + dy^2) <= k/2
  std::vector<std::pair<int, int>> se;
  const int rad = k / 2 + 1;
  for (int dy = -rad; dy <= rad; ++dy) {
    for (int dx = -rad; dx <= rad; ++dx) {
      if (4 * (dx * dx + dy * dy) <= k * k) {
        se.emplace_back(dx, dy);
      }
    }
  }
  Raster out(r.config());
  for (int i = 0; i < r.height(); ++i) {
    for (int j = 0; j < r.width(); ++j) {
      if (!r.at(i, j)) {
        continue;
      }
      for (auto [dx, dy] : se) {
        const int ii = i + dy;
        const int jj = j + dx;
        if (ii >= 0 && ii < r.height() && jj >= 0 && jj < r.width()) {
          out.set(ii, jj, true);
        }
      }
    }
  }
  return out;
}

double jaccard(const Raster& a, const Raster& b) {
  require_same_dims(a, b);
  long long inter = 0;
  long long uni = 0;
  for (std::size_t i = 0; i < a.bytes().size(); ++i) {
    inter += std::popcount(static_cast<unsigned>(a.bytes()[i] & b.bytes()[i]));
    uni += std::popcount(static_cast<unsigned>(a.bytes()[i] | b.bytes()[i]));
  }
  if (uni == 0) {
    throw BothEmpty("jaccard of two empty rasters is undefined");
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double area_error(const Raster& sim, const Raster& real) {
  require_same_dims(sim, real);
  if (real.empty()) {
    throw EmptyReference("area_error reference raster is empty");
  }
  long long inter = 0;
  long long uni = 0;
  for (std::size_t i = 0; i < sim.bytes().size(); ++i) {
    inter += std::popcount(static_cast<unsigned>(sim.bytes()[i] & real.bytes()[i]));
    uni += std::popcount(static_cast<unsigned>(sim.bytes()[i] | real.bytes()[i]));
  }
  return static_cast<double>(uni - inter) / static_cast<double>(real.area_px());
}

Raster flip_h(const Raster& r) {
  Raster out(r.config());
  for (int i = 0; i < r.height(); ++i) {
    for (int j = 0; j < r.width(); ++j) {
      if (r.at(i, j)) {
        out.set(i, r.width() - 1 - j, true);
      }
    }
  }
  return out;
}

Raster flip_v(const Raster& r) {
  Raster out(r.config());
  for (int i = 0; i < r.height(); ++i) {
    for (int j = 0; j < r.width(); ++j) {
      if (r.at(i, j)) {
        out.set(r.height() - 1 - i, j, true);
      }
    }
  }
  return out;
}

Raster rotate_quarter(const Raster& r, int q) {
  if (r.width() != r.height()) {
    throw DimensionMismatch("quarter rotation requires a square raster");
  }
  if (q != 90 && q != 180 && q != 270) {
    throw Error("quarter rotation angle must be 90, 180 or 270");
  }
  const int n = r.width();
  Raster out(r.config());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      bool v = false;
      if (q == 90) {
        v = r.at(j, n - 1 - i);
      } else if (q == 180) {
        v = r.at(n - 1 - i, n - 1 - j);
      } else {
        v = r.at(n - 1 - j, i);
      }
      if (v) {
        out.set(i, j, true);
      }
    }
  }
  return out;
}

Raster rotate_small(const Raster& r, double angle_deg) {
  if (std::abs(angle_deg) > 10.0) {
    throw Error("rotate_small angle must be within [-10, 10] degrees");
  }
  const double a = angle_deg * kPi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  Raster out(r.config());
  for (int i = 0; i < r.height(); ++i) {
    const double y = r.world_y(i);
    for (int j = 0; j < r.width(); ++j) {
      const double x = r.world_x(j);
      // inverse-mapped source point
      const double xs = x * c + y * s;
      const double ys = -x * s + y * c;
      const int sc = r.col_at(xs);
      const int sr = r.row_at(ys);
      if (sr >= 0 && sr < r.height() && sc >= 0 && sc < r.width() && r.at(sr, sc)) {
        out.set(i, j, true);
      }
    }
  }
  return out;
}

Placement place_profile(const RollProfile& profile) {
  return {-profile.width() / 2.0, -gap_midline(profile)};
}

double closing_distance(const RollProfile& profile, const Placement& placement,
                        double disk_radius) {
  const int n = 4000;
  const double r = disk_radius;
  double c_over = 0.0;
  double c_under = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -r + 2.0 * r * i / n;
    const double px = x - placement.dx;
    if (px < 0.0 || px > profile.width()) {
      continue;
    }
    const double top = std::sqrt(std::max(r * r - x * x, 0.0));
    c_over = std::max(c_over, top - (profile.over()(px) + placement.dy));
    c_under = std::max(c_under, (profile.under()(px) + placement.dy) + top);
  }
  return std::max(c_over, c_under);
}

RollMasks rasterize_rolls(const RollProfile& profile, const Placement& placement,
                          double retract, const RasterConfig& cfg) {
  Raster over(cfg);
  Raster under(cfg);
  for (int j = 0; j < cfg.width_px; ++j) {
    const double x = over.world_x(j);
    const double px = x - placement.dx;
    if (px < 0.0 || px > profile.width()) {
      continue;  // roll material exists over the roll span only
    }
    const double yo = profile.over()(px) + placement.dy + retract;
    const double yu = profile.under()(px) + placement.dy - retract;
    for (int i = 0; i < cfg.height_px; ++i) {
      const double y = over.world_y(i);
      if (y >= yo) {
        over.set(i, j, true);
      } else if (y <= yu) {
        under.set(i, j, true);
      }
    }
  }
  return {std::move(over), std::move(under)};
}

Raster rasterize_disk(double radius_mm, const RasterConfig& cfg) {
  Raster out(cfg);
  const double r2 = radius_mm * radius_mm;
  for (int i = 0; i < cfg.height_px; ++i) {
    const double y = out.world_y(i);
    for (int j = 0; j < cfg.width_px; ++j) {
      const double x = out.world_x(j);
      if (x * x + y * y <= r2) {
        out.set(i, j, true);
      }
    }
  }
  return out;
}

ScenarioRaster rasterize_scenario(const Scenario& scenario, double t,
                                  const RasterConfig& cfg) {
  if (t < 0.0 || t > 1.0) {
    throw Error("closure fraction t must lie in [0, 1]");
  }
  const double r = scenario.diameter_mm / 2.0;
  const double x_lo = -(cfg.width_px / 2) * cfg.resolution_mm;
  const double x_hi = (cfg.width_px - cfg.width_px / 2) * cfg.resolution_mm;
  const double y_lo = (1 - cfg.height_px / 2) * cfg.resolution_mm;
  const double y_hi = (cfg.height_px / 2 + 1) * cfg.resolution_mm;
  if (-r < x_lo || r > x_hi || -r < y_lo || r > y_hi) {
    throw OutOfFrame("workpiece disk of radius " + std::to_string(r) +
                     " mm does not fit the raster window");
  }
  const Placement placement = place_profile(scenario.profile);
  const double c = closing_distance(scenario.profile, placement, r);
  RollMasks masks = rasterize_rolls(scenario.profile, placement, (1.0 - t) * c, cfg);
  return {rasterize_disk(r, cfg), std::move(masks.over), std::move(masks.under)};
}

std::vector<AugmentedChannels> augment(const SampleChannels& sample, RngStream& rng) {
  std::vector<AugmentedChannels> out;
  out.reserve(7);
  out.push_back({sample, "orig"});
  out.push_back({{flip_v(sample.inlet), flip_v(sample.over_mask), flip_v(sample.under_mask),
                  flip_v(sample.outlet)},
                 "flip_v"});
  out.push_back({{flip_h(sample.inlet), flip_h(sample.over_mask), flip_h(sample.under_mask),
                  flip_h(sample.outlet)},
                 "flip_h"});
  for (int k = 0; k < 4; ++k) {
    const double angle = rng.uniform(-3.0, 3.0);
    char tag[32];
    std::snprintf(tag, sizeof tag, "rot(%.6f)", angle);
    out.push_back({{rotate_small(sample.inlet, angle), rotate_small(sample.over_mask, angle),
                    rotate_small(sample.under_mask, angle), rotate_small(sample.outlet, angle)},
                   tag});
  }
  return out;
}

void write_pbm(const Raster& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  out << "P4\n" << r.width() << " " << r.height() << "\n";
  out.write(reinterpret_cast<const char*>(r.bytes().data()),
            static_cast<std::streamsize>(r.bytes().size()));
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

namespace {

int pbm_next_token(std::istream& in) {
  // skips whitespace and '#' comments, returns the next integer
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') {
        c = in.get();
      }
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) {
    throw Error("malformed PBM header");
  }
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  in.unget();
  return value;
}

}  // namespace

Raster read_pbm(const std::filesystem::path& path, double resolution_mm) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  char m0 = 0;
  char m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '4') {
    throw Error(path.string() + " is not a binary PBM (P4) file");
  }
  const int w = pbm_next_token(in);
  const int h = pbm_next_token(in);
  in.get();  // the single whitespace byte after the header
  Raster r(w, h, resolution_mm);
  auto& bytes = r.bytes();
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw Error(path.string() + " truncated");
  }
  const std::uint8_t keep = tail_keep_mask(w);
  for (int row = 0; row < h; ++row) {
    bytes[static_cast<std::size_t>(row + 1) * r.byte_stride() - 1] &= keep;
  }
  return r;
}

}  // namespace rollpass
