#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rollpass/errors.hpp"
#include "rollpass/geometry.hpp"
#include "rollpass/rng.hpp"

namespace rollpass {

struct RasterConfig {
  int width_px = 200;
  int height_px = 200;
  double resolution_mm = 0.5;  // mm per pixel
};

// Fixed-size binary cross-section grid. Pixel (row, col) covers the world
// square [(col - w/2)*res, (col - w/2 + 1)*res) x [(h/2 - row)*res,
// (h/2 - row + 1)*res); membership is tested at the square's center.
// Storage is row-major, 8 pixels per byte, MSB first (the PBM P4 layout).
class Raster {
 public:
  explicit Raster(const RasterConfig& cfg = {});
  Raster(int width_px, int height_px, double resolution_mm);

  int width() const { return w_; }
  int height() const { return h_; }
  double resolution() const { return res_; }
  RasterConfig config() const { return {w_, h_, res_}; }

  bool at(int row, int col) const {
    return (bytes_[static_cast<std::size_t>(row) * stride_ + (col >> 3)] >>
            (7 - (col & 7))) & 1;
  }
  void set(int row, int col, bool v) {
    std::uint8_t& b = bytes_[static_cast<std::size_t>(row) * stride_ + (col >> 3)];
    const std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - (col & 7)));
    b = v ? (b | mask) : (b & static_cast<std::uint8_t>(~mask));
  }

  long long area_px() const;
  bool empty() const { return area_px() == 0; }

  // World coordinates of a pixel center.
  double world_x(int col) const { return (col - w_ / 2) * res_ + res_ / 2.0; }
  double world_y(int row) const { return (h_ / 2 - row) * res_ + res_ / 2.0; }
  // Pixel containing a world point (may fall outside the grid).
  int col_at(double x) const;
  int row_at(double y) const;

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  // Writable storage; padding bits past `width()` in each row must stay zero.
  std::vector<std::uint8_t>& bytes() { return bytes_; }
  int byte_stride() const { return stride_; }

  friend bool operator==(const Raster& a, const Raster& b) = default;

 private:
  int w_;
  int h_;
  int stride_;
  double res_;
  std::vector<std::uint8_t> bytes_;
};

// -- pixel-wise operations ---------------------------------------------------

Raster intersect(const Raster& a, const Raster& b);  // throws DimensionMismatch
Raster union_of(const Raster& a, const Raster& b);
Raster complement(const Raster& a);
inline long long area_px(const Raster& a) { return a.area_px(); }

// Morphological dilation with the circular structuring element
// { (dx, dy) : sqrt(dx^2 + dy^2) <= k/2 }, k the kernel diameter in pixels.
Raster dilate(const Raster& r, int k);

// |a n b| / |a u b|. Throws BothEmpty when both rasters are empty.
double jaccard(const Raster& a, const Raster& b);

// (|sim u real| - |sim n real|) / |real|. Throws EmptyReference.
double area_error(const Raster& sim, const Raster& real);

// -- geometric transforms ----------------------------------------------------

Raster flip_h(const Raster& r);  // mirror left-right
Raster flip_v(const Raster& r);  // mirror top-bottom
// Exact pixel permutation, q in {90, 180, 270} degrees counterclockwise.
Raster rotate_quarter(const Raster& r, int q);
// Nearest-neighbor resampling about the grid center, |angle| <= 10 degrees.
Raster rotate_small(const Raster& r, double angle_deg);

// -- scenario rasterization --------------------------------------------------

struct ScenarioRaster {
  Raster inlet;
  Raster over_mask;
  Raster under_mask;
};

struct RollMasks {
  Raster over;
  Raster under;
};

// Offset taking profile-frame coordinates to world coordinates: the roll
// x-span is recentered to [-width/2, +width/2] and the gap's extreme
// midline is moved onto y = 0.
struct Placement {
  double dx;
  double dy;
};

Placement place_profile(const RollProfile& profile);

// Smallest symmetric retraction that makes both rolls clear the disk
// (world frame, disk from place_disk mapped to the origin).
double closing_distance(const RollProfile& profile, const Placement& placement,
                        double disk_radius);

// Roll solid masks with both boundaries retracted by `retract` mm
// (retract = 0 is the final, fully closed position).
RollMasks rasterize_rolls(const RollProfile& profile, const Placement& placement,
                          double retract, const RasterConfig& cfg = {});

Raster rasterize_disk(double radius_mm, const RasterConfig& cfg = {});

// Rasterize a scenario with the rolls having completed fraction t of their
// closing travel (t = 1: final position). Throws OutOfFrame when the
// workpiece disk does not fit the world window.
ScenarioRaster rasterize_scenario(const Scenario& scenario, double t,
                                  const RasterConfig& cfg = {});

// -- augmentation ------------------------------------------------------------

struct SampleChannels {
  Raster inlet;
  Raster over_mask;
  Raster under_mask;
  Raster outlet;
};

struct AugmentedChannels {
  SampleChannels channels;
  std::string tag;  // "orig", "flip_v", "flip_h", "rot(<deg>)"
};

// The original plus six variants: vertical flip, horizontal flip, and four
// independent rotations with angles drawn uniformly from [-3, +3] degrees.
std::vector<AugmentedChannels> augment(const SampleChannels& sample, RngStream& rng);

// -- PBM I/O -----------------------------------------------------------------

// Binary PBM ("P4"), MSB-first packed rows; bit 1 = material.
void write_pbm(const Raster& r, const std::filesystem::path& path);
Raster read_pbm(const std::filesystem::path& path, double resolution_mm = 0.5);

}  // namespace rollpass
