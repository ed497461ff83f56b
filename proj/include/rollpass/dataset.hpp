#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "rollpass/estimators.hpp"
#include "rollpass/rollgen.hpp"

namespace rollpass {

inline constexpr char kManifestVersion[] = "rollpass-ds/1";

struct SampleMeta {
  std::string id;
  std::uint64_t scenario_seed = 0;  // RngStream resume key of the scenario
  double diameter_mm = 0.0;
  double width_mm = 0.0;
  double temperature_c = 0.0;
  double alpha_loss = 0.0;
  std::string closure;       // "0.0->1.0" (disk inlet) or "0.5->1.0"
  std::string augmentation;  // "orig", "flip_v", "flip_h", "rot(<deg>)"
};

struct Sample {
  SampleChannels channels;
  SampleMeta meta;
};

struct ManifestEntry {
  std::string id;
  std::string split;  // "unsplit", "train", "val", "eval"
};

struct DatasetManifest {
  std::string version = kManifestVersion;
  std::uint64_t seed = 0;
  double alpha_loss = 0.5;
  RasterConfig raster;
  std::vector<ManifestEntry> samples;
};

// -- persistence -------------------------------------------------------------
// Layout: <root>/manifest.json and <root>/samples/<id>/{inlet,over,under,
// outlet}.pbm + meta.json. Sample directories are written to a temporary
// name and renamed into place, so readers never observe partial samples.

void save_sample(const std::filesystem::path& root, const Sample& sample);
Sample load_sample(const std::filesystem::path& root, const std::string& id,
                   double resolution_mm);
void save_manifest(const std::filesystem::path& root, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& root);

// -- generation --------------------------------------------------------------

// Emits two samples per scenario: the circular inlet with its full-closure
// outlet, and the half-travel deformation as a new inlet paired with the
// same outlet. Roll-mask channels are always the full-closure masks. All
// samples start unsplit; the manifest is written last. Scenario i uses
// stream-id i of `seed`, so results do not depend on `jobs`.
DatasetManifest generate_dataset(const std::filesystem::path& root, int count,
                                 std::uint64_t seed, const FlowParams& params = {},
                                 const GenConfig& gen = {},
                                 const RasterConfig& raster = {}, unsigned jobs = 1);

// -- splitting & augmentation ------------------------------------------------

struct SplitFractions {
  double train = 0.0;
  double val = 0.0;
  double eval = 0.0;  // must sum to 1 within 1e-9
};

// Deterministic shuffled partition; sizes follow largest-remainder
// rounding of fraction * count (remainder ties resolved train, val, eval).
DatasetManifest split_dataset(DatasetManifest manifest, const SplitFractions& fractions,
                              std::uint64_t seed);

// Writes the six augmented variants of every sample in the split (vertical
// flip, horizontal flip, four small rotations; ids suffixed _flip_v,
// _flip_h, _rot1.._rot4) and appends them to the manifest under the same
// split. Other splits are untouched.
DatasetManifest augment_split(const std::filesystem::path& root, DatasetManifest manifest,
                              const std::string& split, std::uint64_t seed,
                              unsigned jobs = 1);

// -- evaluation --------------------------------------------------------------

struct ReportRow {
  std::string id;
  double jaccard = 0.0;
  double area_error = 0.0;
  bool failed = false;  // scored failure (e.g. empty prediction and target)
};

struct Report {
  std::string estimator_id;
  std::vector<ReportRow> rows;      // one per sample of the split, id order
  double mean_jaccard = 0.0;        // over non-failed rows
  std::array<long long, 20> histogram{};  // jaccard counts, bins of 0.05 on [0,1]
};

// closure filter: "all", "full" (disk-inlet samples), "half".
Report evaluate(const std::filesystem::path& root, const DatasetManifest& manifest,
                const Estimator& estimator, const std::string& split = "eval",
                const std::string& closure = "all", unsigned jobs = 1);

// CSV columns: id,jaccard,area_error,estimator. Failed rows carry "nan".
void write_report_csv(const Report& report, const std::filesystem::path& path);
// CSV columns: bin_lo,count.
void write_histogram_csv(const Report& report, const std::filesystem::path& path);

}  // namespace rollpass
