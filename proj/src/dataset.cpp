#include "rollpass/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include "rollpass/json_io.hpp"
#include "rollpass/parallel.hpp"

namespace rollpass {

namespace {

// Stream-id namespaces keeping the shuffle and augmentation draws disjoint
// from the per-scenario generation streams (plain indices).
constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;
constexpr std::uint64_t kAugmentStreamBase = 0x6175670000000000ULL;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::filesystem::path sample_dir(const std::filesystem::path& root, const std::string& id) {
  return root / "samples" / id;
}

}  // namespace

void save_sample(const std::filesystem::path& root, const Sample& sample) {
  const std::filesystem::path dir = sample_dir(root, sample.meta.id);
  const std::filesystem::path tmp = root / "samples" / (".tmp-" + sample.meta.id);
  std::filesystem::remove_all(tmp);
  std::filesystem::create_directories(tmp);
  write_pbm(sample.channels.inlet, tmp / "inlet.pbm");
  write_pbm(sample.channels.over_mask, tmp / "over.pbm");
  write_pbm(sample.channels.under_mask, tmp / "under.pbm");
  write_pbm(sample.channels.outlet, tmp / "outlet.pbm");

  nlohmann::ordered_json meta;
  meta["id"] = sample.meta.id;
  meta["scenario_seed"] = sample.meta.scenario_seed;
  meta["diameter_mm"] = sample.meta.diameter_mm;
  meta["width_mm"] = sample.meta.width_mm;
  meta["temperature_c"] = sample.meta.temperature_c;
  meta["alpha_loss"] = sample.meta.alpha_loss;
  meta["closure"] = sample.meta.closure;
  meta["augmentation"] = sample.meta.augmentation;
  save_json(meta, tmp / "meta.json");

  std::filesystem::remove_all(dir);
  std::filesystem::rename(tmp, dir);
}

namespace {

SampleMeta load_meta(const std::filesystem::path& dir) {
  const nlohmann::json meta = load_json(dir / "meta.json");
  SampleMeta out;
  out.id = meta.at("id").get<std::string>();
  out.scenario_seed = meta.at("scenario_seed").get<std::uint64_t>();
  out.diameter_mm = meta.at("diameter_mm").get<double>();
  out.width_mm = meta.at("width_mm").get<double>();
  out.temperature_c = meta.at("temperature_c").get<double>();
  out.alpha_loss = meta.at("alpha_loss").get<double>();
  out.closure = meta.at("closure").get<std::string>();
  out.augmentation = meta.at("augmentation").get<std::string>();
  return out;
}

}  // namespace

Sample load_sample(const std::filesystem::path& root, const std::string& id,
                   double resolution_mm) {
  const std::filesystem::path dir = sample_dir(root, id);
  Sample sample;
  sample.channels.inlet = read_pbm(dir / "inlet.pbm", resolution_mm);
  sample.channels.over_mask = read_pbm(dir / "over.pbm", resolution_mm);
  sample.channels.under_mask = read_pbm(dir / "under.pbm", resolution_mm);
  sample.channels.outlet = read_pbm(dir / "outlet.pbm", resolution_mm);
  sample.meta = load_meta(dir);
  return sample;
}

void save_manifest(const std::filesystem::path& root, const DatasetManifest& manifest) {
  nlohmann::ordered_json j;
  j["version"] = manifest.version;
  j["seed"] = manifest.seed;
  j["alpha_loss"] = manifest.alpha_loss;
  j["raster"] = {{"width_px", manifest.raster.width_px},
                 {"height_px", manifest.raster.height_px},
                 {"resolution_mm", manifest.raster.resolution_mm}};
  nlohmann::ordered_json counts;
  for (const char* split : {"train", "val", "eval", "unsplit"}) {
    counts[split] = 0;
  }
  for (const ManifestEntry& e : manifest.samples) {
    counts[e.split] = counts.value(e.split, 0) + 1;
  }
  j["counts"] = std::move(counts);
  j["samples"] = nlohmann::ordered_json::array();
  for (const ManifestEntry& e : manifest.samples) {
    j["samples"].push_back({{"id", e.id}, {"split", e.split}});
  }
  save_json(j, root / "manifest.json");
}

DatasetManifest load_manifest(const std::filesystem::path& root) {
  const nlohmann::json j = load_json(root / "manifest.json");
  DatasetManifest manifest;
  manifest.version = j.at("version").get<std::string>();
  if (manifest.version != kManifestVersion) {
    throw Error("unsupported manifest version '" + manifest.version + "'");
  }
  manifest.seed = j.at("seed").get<std::uint64_t>();
  manifest.alpha_loss = j.at("alpha_loss").get<double>();
  manifest.raster.width_px = j.at("raster").at("width_px").get<int>();
  manifest.raster.height_px = j.at("raster").at("height_px").get<int>();
  manifest.raster.resolution_mm = j.at("raster").at("resolution_mm").get<double>();
  for (const auto& e : j.at("samples")) {
    manifest.samples.push_back(
        {e.at("id").get<std::string>(), e.at("split").get<std::string>()});
  }
  return manifest;
}

DatasetManifest generate_dataset(const std::filesystem::path& root, int count,
                                 std::uint64_t seed, const FlowParams& params,
                                 const GenConfig& gen, const RasterConfig& raster,
                                 unsigned jobs) {
  if (count < 1) {
    throw Error("dataset scenario count must be >= 1");
  }
  std::filesystem::create_directories(root / "samples");

  parallel_for(static_cast<std::size_t>(count), jobs, [&](std::size_t i) {
    RngStream rng(seed, i);
    const Scenario scenario = generate_scenario(rng, gen);
    const ScenarioRaster full = rasterize_scenario(scenario, 1.0, raster);
    const ScenarioRaster half = rasterize_scenario(scenario, 0.5, raster);

    const Raster outlet = estimate_flow(
        {full.inlet, full.over_mask, full.under_mask}, params);
    const Raster half_inlet = estimate_flow(
        {full.inlet, half.over_mask, half.under_mask}, params);

    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%06zu", i);

    SampleMeta meta;
    meta.scenario_seed = scenario.seed;
    meta.diameter_mm = scenario.diameter_mm;
    meta.width_mm = scenario.profile.width();
    meta.temperature_c = scenario.temperature_c;
    meta.alpha_loss = params.alpha_loss;
    meta.augmentation = "orig";

    Sample sample;
    sample.meta = meta;
    sample.meta.id = std::string(prefix) + "_full";
    sample.meta.closure = "0.0->1.0";
    sample.channels = {full.inlet, full.over_mask, full.under_mask, outlet};
    save_sample(root, sample);

    sample.meta.id = std::string(prefix) + "_half";
    sample.meta.closure = "0.5->1.0";
    sample.channels = {half_inlet, full.over_mask, full.under_mask, outlet};
    save_sample(root, sample);
  });

  DatasetManifest manifest;
  manifest.seed = seed;
  manifest.alpha_loss = params.alpha_loss;
  manifest.raster = raster;
  manifest.samples.reserve(2 * static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%06d", i);
    manifest.samples.push_back({std::string(prefix) + "_full", "unsplit"});
    manifest.samples.push_back({std::string(prefix) + "_half", "unsplit"});
  }
  save_manifest(root, manifest);
  return manifest;
}

DatasetManifest split_dataset(DatasetManifest manifest, const SplitFractions& fractions,
                              std::uint64_t seed) {
  const double sum = fractions.train + fractions.val + fractions.eval;
  if (std::abs(sum - 1.0) > 1e-9 || fractions.train < 0 || fractions.val < 0 ||
      fractions.eval < 0) {
    throw Error("split fractions must be nonnegative and sum to 1");
  }

  const std::size_t n = manifest.samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  RngStream rng(seed, kSplitStream);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_int(i)]);
  }

  const double targets[3] = {fractions.train * n, fractions.val * n, fractions.eval * n};
  std::size_t sizes[3];
  std::size_t assigned = 0;
  for (int k = 0; k < 3; ++k) {
    sizes[k] = static_cast<std::size_t>(std::floor(targets[k] + 1e-9));
    assigned += sizes[k];
  }
  // largest-remainder rounding, ties resolved train > val > eval
  std::vector<int> by_frac = {0, 1, 2};
  std::stable_sort(by_frac.begin(), by_frac.end(), [&](int a, int b) {
    return targets[a] - std::floor(targets[a] + 1e-9) >
           targets[b] - std::floor(targets[b] + 1e-9);
  });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) {
    ++sizes[by_frac[r % 3]];
  }

  const char* names[3] = {"train", "val", "eval"};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    for (std::size_t c = 0; c < sizes[k]; ++c, ++pos) {
      manifest.samples[order[pos]].split = names[k];
    }
  }
  return manifest;
}

DatasetManifest augment_split(const std::filesystem::path& root, DatasetManifest manifest,
                              const std::string& split, std::uint64_t seed,
                              unsigned jobs) {
  std::vector<std::string> ids;
  for (const ManifestEntry& e : manifest.samples) {
    if (e.split == split) {
      ids.push_back(e.id);
    }
  }
  if (ids.empty()) {
    throw Error("split '" + split + "' has no samples to augment");
  }

  static const char* kSuffixes[7] = {"",       "_flip_v", "_flip_h", "_rot1",
                                     "_rot2",  "_rot3",   "_rot4"};
  std::vector<std::vector<ManifestEntry>> added(ids.size());

  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    const Sample source = load_sample(root, ids[i], manifest.raster.resolution_mm);
    RngStream rng(seed, kAugmentStreamBase + i);
    const std::vector<AugmentedChannels> variants = augment(source.channels, rng);
    for (std::size_t v = 1; v < variants.size(); ++v) {
      Sample sample;
      sample.channels = variants[v].channels;
      sample.meta = source.meta;
      sample.meta.id = ids[i] + kSuffixes[v];
      sample.meta.augmentation = variants[v].tag;
      save_sample(root, sample);
      added[i].push_back({sample.meta.id, split});
    }
  });

  for (const auto& entries : added) {
    manifest.samples.insert(manifest.samples.end(), entries.begin(), entries.end());
  }
  save_manifest(root, manifest);
  return manifest;
}

Report evaluate(const std::filesystem::path& root, const DatasetManifest& manifest,
                const Estimator& estimator, const std::string& split,
                const std::string& closure, unsigned jobs) {
  std::string closure_tag;
  if (closure == "full") {
    closure_tag = "0.0->1.0";
  } else if (closure == "half") {
    closure_tag = "0.5->1.0";
  } else if (closure != "all") {
    throw Error("closure filter must be all, full, or half");
  }

  std::vector<std::string> ids;
  for (const ManifestEntry& e : manifest.samples) {
    if (e.split != split) {
      continue;
    }
    if (!closure_tag.empty()) {
      const nlohmann::json meta = load_json(sample_dir(root, e.id) / "meta.json");
      if (meta.at("closure").get<std::string>() != closure_tag) {
        continue;
      }
    }
    ids.push_back(e.id);
  }
  if (ids.empty()) {
    throw Error("no samples in split '" + split + "' match the evaluation filter");
  }

  Report report;
  report.estimator_id = estimator.id();
  report.rows.resize(ids.size());
  parallel_for(ids.size(), jobs, [&](std::size_t i) {
    ReportRow& row = report.rows[i];
    row.id = ids[i];
    try {
      const Sample sample = load_sample(root, ids[i], manifest.raster.resolution_mm);
      const Raster out = estimator.estimate({sample.channels.inlet,
                                             sample.channels.over_mask,
                                             sample.channels.under_mask});
      row.jaccard = jaccard(out, sample.channels.outlet);
      row.area_error = area_error(out, sample.channels.outlet);
    } catch (const Error& e) {
      std::cerr << "warning: sample " << ids[i] << " failed: " << e.what() << "\n";
      row.failed = true;
      row.jaccard = std::nan("");
      row.area_error = std::nan("");
    }
  });

  double total = 0.0;
  long long scored = 0;
  for (const ReportRow& row : report.rows) {
    if (row.failed) {
      continue;
    }
    total += row.jaccard;
    ++scored;
    const int bin = std::min(19, static_cast<int>(row.jaccard * 20.0));
    ++report.histogram[static_cast<std::size_t>(std::max(0, bin))];
  }
  report.mean_jaccard = scored > 0 ? total / static_cast<double>(scored)
                                   : std::nan("");
  return report;
}

void write_report_csv(const Report& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  out << "id,jaccard,area_error,estimator\n";
  for (const ReportRow& row : report.rows) {
    out << row.id << "," << format_double(row.jaccard) << ","
        << format_double(row.area_error) << "," << report.estimator_id << "\n";
  }
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

void write_histogram_csv(const Report& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path.string() + " for writing");
  }
  out << "bin_lo,count\n";
  for (std::size_t i = 0; i < report.histogram.size(); ++i) {
    char lo[32];
    std::snprintf(lo, sizeof lo, "%g", static_cast<double>(i) * 0.05);
    out << lo << "," << report.histogram[i] << "\n";
  }
  if (!out) {
    throw Error("failed writing " + path.string());
  }
}

}  // namespace rollpass
