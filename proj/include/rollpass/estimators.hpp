#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>

#include "rollpass/raster.hpp"

namespace rollpass {

// One stand's deformation query: all three channels at full closure.
struct EstimatorInput {
  Raster inlet;
  Raster over_mask;
  Raster under_mask;
};

// Open region the outlet may occupy: complement(over_mask | under_mask).
// Columns beyond the roll span carry no mask, so side gaps are included.
Raster gap_mask(const EstimatorInput& in);

struct FlowParams {
  double alpha_loss = 0.5;  // fraction of displaced area leaving the plane
};

// Clip the inlet to the gap.
Raster estimate_baseline1(const EstimatorInput& in);

// Dilate the inlet by k = 2..8, clip to the gap, keep the k whose output
// area is closest to the inlet area; ties go to the smallest k.
Raster estimate_baseline2(const EstimatorInput& in);

// Deterministic mass-flow surrogate. The displaced area (inlet pixels under
// the rolls) partly leaves the plane (alpha_loss) and partly re-enters by
// lateral growth: sweep rows top to bottom, extending each occupied row's
// leftmost run one pixel left and rightmost run one pixel right inside the
// gap, until the target area is reached or no growth is possible. A fixed
// schedule, not a physics model; its area bookkeeping is exact.
Raster estimate_flow(const EstimatorInput& in, const FlowParams& params = {});

// Subprocess adapter: writes PROTOCOL, inlet.pbm, over.pbm, under.pbm into
// a fresh directory, runs `<command> <dir>` through /bin/sh, reads
// outlet.pbm on exit 0. The directory is deleted on success and retained
// for debugging on failure. Throws ExternalFailure or Timeout.
Raster estimate_external(const EstimatorInput& in, const std::string& command,
                         std::chrono::milliseconds timeout = std::chrono::seconds(60));

inline constexpr char kExternalProtocolVersion[] = "rollpass-ext/1";

class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual Raster estimate(const EstimatorInput& in) const = 0;
  virtual std::string id() const = 0;
};

// Specs: "baseline1", "baseline2", "flow", "ext:<command>".
// Throws Error on an unknown spec.
std::unique_ptr<Estimator> make_estimator(const std::string& spec,
                                          const FlowParams& flow = {});

}  // namespace rollpass
