#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "rollpass/dataset.hpp"
#include "rollpass/json_io.hpp"

using namespace rollpass;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    char tmpl[] = "/tmp/rollpass-test-XXXXXX";
    path = mkdtemp(tmpl);
  }
  ~TempDir() { fs::remove_all(path); }
};

bool subset(const Raster& a, const Raster& b) {
  return intersect(a, b) == a;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> file bytes for the whole tree.
std::map<std::string, std::string> tree_map(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      out[fs::relative(entry.path(), root).string()] = read_file(entry.path());
    }
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

DatasetManifest synthetic_manifest(std::size_t n) {
  DatasetManifest m;
  m.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.samples.push_back({"s" + std::to_string(i), "unsplit"});
  }
  return m;
}

std::map<std::string, std::size_t> split_counts(const DatasetManifest& m) {
  std::map<std::string, std::size_t> counts;
  for (const ManifestEntry& e : m.samples) {
    ++counts[e.split];
  }
  return counts;
}

class EmptyEstimator final : public Estimator {
 public:
  Raster estimate(const EstimatorInput& in) const override {
    return Raster(in.inlet.config());
  }
  std::string id() const override { return "empty-stub"; }
};

}  // namespace

TEST_CASE("samples persist losslessly") {
  TempDir tmp;
  Sample s;
  s.channels.inlet = rasterize_disk(10.0);
  s.channels.over_mask = rasterize_disk(4.0);
  s.channels.under_mask = Raster();
  s.channels.outlet = rasterize_disk(9.0);
  s.meta = {"demo_full", 0xabcdefULL, 20.0, 123.456, 987.5, 0.5, "0.0->1.0", "orig"};
  save_sample(tmp.path, s);

  const Sample back = load_sample(tmp.path, "demo_full", 0.5);
  CHECK(back.channels.inlet == s.channels.inlet);
  CHECK(back.channels.over_mask == s.channels.over_mask);
  CHECK(back.channels.under_mask == s.channels.under_mask);
  CHECK(back.channels.outlet == s.channels.outlet);
  CHECK(back.meta.id == s.meta.id);
  CHECK(back.meta.scenario_seed == s.meta.scenario_seed);
  CHECK(back.meta.diameter_mm == s.meta.diameter_mm);
  CHECK(back.meta.width_mm == s.meta.width_mm);
  CHECK(back.meta.temperature_c == s.meta.temperature_c);
  CHECK(back.meta.alpha_loss == s.meta.alpha_loss);
  CHECK(back.meta.closure == s.meta.closure);
  CHECK(back.meta.augmentation == s.meta.augmentation);
}

TEST_CASE("generated samples are recomputable from their recorded seeds") {
  TempDir tmp;
  const DatasetManifest manifest = generate_dataset(tmp.path, 3, 2026);
  REQUIRE(manifest.samples.size() == 6);
  CHECK(manifest.version == kManifestVersion);
  CHECK(manifest.alpha_loss == 0.5);

  for (int i = 0; i < 3; ++i) {
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%06d", i);
    CHECK(manifest.samples[2 * i].id == std::string(prefix) + "_full");
    CHECK(manifest.samples[2 * i + 1].id == std::string(prefix) + "_half");
    CHECK(manifest.samples[2 * i].split == "unsplit");

    const Sample full = load_sample(tmp.path, std::string(prefix) + "_full", 0.5);
    const Sample half = load_sample(tmp.path, std::string(prefix) + "_half", 0.5);

    CHECK(full.meta.closure == "0.0->1.0");
    CHECK(half.meta.closure == "0.5->1.0");
    CHECK(full.meta.augmentation == "orig");
    CHECK(full.meta.alpha_loss == 0.5);

    // Both closures of one scenario share the outlet and the final masks.
    CHECK(full.channels.outlet == half.channels.outlet);
    CHECK(full.channels.over_mask == half.channels.over_mask);
    CHECK(full.channels.under_mask == half.channels.under_mask);
    CHECK(subset(full.channels.outlet,
                 complement(union_of(full.channels.over_mask, full.channels.under_mask))));

    // The recorded resume key regenerates every channel bit-for-bit.
    RngStream resumed = RngStream::from_key(full.meta.scenario_seed);
    const Scenario sc = generate_scenario(resumed);
    CHECK(sc.diameter_mm == full.meta.diameter_mm);
    CHECK(sc.profile.width() == full.meta.width_mm);
    CHECK(sc.temperature_c == full.meta.temperature_c);

    const ScenarioRaster fr = rasterize_scenario(sc, 1.0);
    const ScenarioRaster hr = rasterize_scenario(sc, 0.5);
    CHECK(fr.inlet == full.channels.inlet);
    CHECK(fr.over_mask == full.channels.over_mask);
    CHECK(estimate_flow({fr.inlet, fr.over_mask, fr.under_mask}) ==
          full.channels.outlet);
    CHECK(estimate_flow({fr.inlet, hr.over_mask, hr.under_mask}) ==
          half.channels.inlet);
  }
}

TEST_CASE("dataset trees are byte-identical across runs and job counts") {
  TempDir a;
  TempDir b;
  auto ma = generate_dataset(a.path, 4, 7, {}, {}, {}, 1);
  auto mb = generate_dataset(b.path, 4, 7, {}, {}, {}, 4);
  ma = split_dataset(std::move(ma), {0.5, 0.0, 0.5}, 99);
  mb = split_dataset(std::move(mb), {0.5, 0.0, 0.5}, 99);
  save_manifest(a.path, ma);
  save_manifest(b.path, mb);
  ma = augment_split(a.path, std::move(ma), "train", 11, 1);
  mb = augment_split(b.path, std::move(mb), "train", 11, 4);
  CHECK(tree_map(a.path) == tree_map(b.path));
}

TEST_CASE("splitting hits the documented sizes exactly") {
  const auto m = split_dataset(synthetic_manifest(18800),
                               {14000.0 / 18800.0, 2000.0 / 18800.0, 2800.0 / 18800.0},
                               5);
  const auto counts = split_counts(m);
  CHECK(counts.at("train") == 14000);
  CHECK(counts.at("val") == 2000);
  CHECK(counts.at("eval") == 2800);
  CHECK(counts.count("unsplit") == 0);

  const auto small = split_counts(split_dataset(synthetic_manifest(10), {0.6, 0.2, 0.2}, 5));
  CHECK(small.at("train") == 6);
  CHECK(small.at("val") == 2);
  CHECK(small.at("eval") == 2);

  const auto all = split_counts(split_dataset(synthetic_manifest(17), {1.0, 0.0, 0.0}, 5));
  CHECK(all.at("train") == 17);
}

TEST_CASE("splits are deterministic, disjoint, and exhaustive") {
  const auto m1 = split_dataset(synthetic_manifest(500), {0.7, 0.15, 0.15}, 12);
  const auto m2 = split_dataset(synthetic_manifest(500), {0.7, 0.15, 0.15}, 12);
  const auto m3 = split_dataset(synthetic_manifest(500), {0.7, 0.15, 0.15}, 13);

  bool same12 = true;
  bool same13 = true;
  for (std::size_t i = 0; i < 500; ++i) {
    same12 = same12 && m1.samples[i].split == m2.samples[i].split;
    same13 = same13 && m1.samples[i].split == m3.samples[i].split;
    CHECK((m1.samples[i].split == "train" || m1.samples[i].split == "val" ||
           m1.samples[i].split == "eval"));
  }
  CHECK(same12);
  CHECK_FALSE(same13);
}

TEST_CASE("split rejects inconsistent fractions") {
  CHECK_THROWS_AS(split_dataset(synthetic_manifest(10), {0.5, 0.5, 0.5}, 1), Error);
  CHECK_THROWS_AS(split_dataset(synthetic_manifest(10), {-0.2, 0.6, 0.6}, 1), Error);
}

TEST_CASE("augmentation multiplies one split by seven and leaves the rest") {
  TempDir tmp;
  auto manifest = generate_dataset(tmp.path, 2, 31);
  manifest = split_dataset(std::move(manifest), {0.5, 0.0, 0.5}, 8);
  const auto before = split_counts(manifest);
  REQUIRE(before.at("train") == 2);
  REQUIRE(before.at("eval") == 2);
  const std::set<std::string> eval_before = [&] {
    std::set<std::string> ids;
    for (const auto& e : manifest.samples) {
      if (e.split == "eval") {
        ids.insert(e.id);
      }
    }
    return ids;
  }();

  manifest = augment_split(tmp.path, std::move(manifest), "train", 77);
  const auto after = split_counts(manifest);
  CHECK(after.at("train") == 14);
  CHECK(after.at("eval") == 2);

  for (const auto& e : manifest.samples) {
    if (e.split == "eval") {
      CHECK(eval_before.count(e.id) == 1);
    }
  }

  // Flip variants are the exact pixel mirrors of their source.
  std::string train_id;
  for (const auto& e : manifest.samples) {
    if (e.split == "train") {
      train_id = e.id;
      break;
    }
  }
  const Sample src = load_sample(tmp.path, train_id, 0.5);
  const Sample fv = load_sample(tmp.path, train_id + "_flip_v", 0.5);
  CHECK(fv.channels.inlet == flip_v(src.channels.inlet));
  CHECK(fv.channels.over_mask == flip_v(src.channels.over_mask));
  CHECK(fv.channels.under_mask == flip_v(src.channels.under_mask));
  CHECK(fv.channels.outlet == flip_v(src.channels.outlet));
  CHECK(fv.meta.augmentation == "flip_v");
  CHECK(fv.meta.scenario_seed == src.meta.scenario_seed);

  const Sample r1 = load_sample(tmp.path, train_id + "_rot1", 0.5);
  CHECK(r1.meta.augmentation.rfind("rot(", 0) == 0);

  // The manifest on disk reflects the augmented state.
  const DatasetManifest reloaded = load_manifest(tmp.path);
  REQUIRE(reloaded.samples.size() == manifest.samples.size());
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    CHECK(reloaded.samples[i].id == manifest.samples[i].id);
    CHECK(reloaded.samples[i].split == manifest.samples[i].split);
  }

  CHECK_THROWS_AS(augment_split(tmp.path, std::move(manifest), "val", 1), Error);
}

TEST_CASE("the flow surrogate scores perfectly on its own full-closure samples") {
  TempDir tmp;
  auto manifest = generate_dataset(tmp.path, 4, 55);
  manifest = split_dataset(std::move(manifest), {0.0, 0.0, 1.0}, 3);

  const auto flow = make_estimator("flow", {manifest.alpha_loss});
  const Report full = evaluate(tmp.path, manifest, *flow, "eval", "full");
  REQUIRE(full.rows.size() == 4);
  CHECK(full.mean_jaccard == 1.0);
  long long hist_total = 0;
  for (long long c : full.histogram) {
    hist_total += c;
  }
  CHECK(hist_total == 4);
  CHECK(full.histogram[19] == 4);
  for (const ReportRow& row : full.rows) {
    CHECK(row.jaccard == 1.0);
    CHECK(row.area_error == 0.0);
    CHECK_FALSE(row.failed);
    CHECK(row.id.size() == 11);  // 000000_full
  }

  const Report all = evaluate(tmp.path, manifest, *flow, "eval", "all");
  CHECK(all.rows.size() == 8);
  const Report half = evaluate(tmp.path, manifest, *flow, "eval", "half");
  CHECK(half.rows.size() == 4);

  // Baselines are meaningful but imperfect on the same data.
  for (const char* spec : {"baseline1", "baseline2"}) {
    const Report r = evaluate(tmp.path, manifest, *make_estimator(spec), "eval", "full");
    double total = 0.0;
    for (const ReportRow& row : r.rows) {
      total += row.jaccard;
    }
    CHECK(r.mean_jaccard > 0.0);
    CHECK(r.mean_jaccard < 1.0);
    CHECK(r.mean_jaccard == doctest::Approx(total / 4.0).epsilon(1e-12));
  }

  CHECK_THROWS_AS(evaluate(tmp.path, manifest, *flow, "train", "full"), Error);
  CHECK_THROWS_AS(evaluate(tmp.path, manifest, *flow, "eval", "partial"), Error);
}

TEST_CASE("failed samples are reported but excluded from the mean") {
  TempDir tmp;
  auto manifest = generate_dataset(tmp.path, 2, 91);
  manifest = split_dataset(std::move(manifest), {0.0, 0.0, 1.0}, 3);

  // A sample whose outlet is empty: an empty prediction cannot be scored
  // against it, so the row fails.
  Sample bad;
  bad.channels.inlet = rasterize_disk(10.0);
  bad.channels.over_mask = Raster();
  bad.channels.under_mask = Raster();
  bad.channels.outlet = Raster();
  bad.meta = {"zzzzz_bad", 0, 20.0, 100.0, 1000.0, 0.5, "0.0->1.0", "orig"};
  save_sample(tmp.path, bad);
  manifest.samples.push_back({"zzzzz_bad", "eval"});

  const EmptyEstimator stub;
  const Report r = evaluate(tmp.path, manifest, stub, "eval", "all");
  REQUIRE(r.rows.size() == 5);
  int failed = 0;
  for (const ReportRow& row : r.rows) {
    if (row.failed) {
      ++failed;
      CHECK(row.id == "zzzzz_bad");
      CHECK(std::isnan(row.jaccard));
      CHECK(std::isnan(row.area_error));
    } else {
      CHECK(row.jaccard == 0.0);  // empty prediction vs nonempty outlet
      CHECK(row.area_error == 1.0);
    }
  }
  CHECK(failed == 1);
  CHECK(r.mean_jaccard == 0.0);
  long long hist_total = 0;
  for (long long c : r.histogram) {
    hist_total += c;
  }
  CHECK(hist_total == 4);
}

TEST_CASE("report and histogram CSVs carry the documented columns") {
  TempDir tmp;
  Report r;
  r.estimator_id = "flow";
  r.rows.push_back({"000000_full", 1.0, 0.0, false});
  r.rows.push_back({"000001_full", 0.53125, 0.75, false});
  r.rows.push_back({"zzzzz_bad", std::nan(""), std::nan(""), true});
  r.histogram[19] = 1;
  r.histogram[10] = 1;
  r.mean_jaccard = 0.765625;

  write_report_csv(r, tmp.path / "report.csv");
  const auto lines = read_lines(tmp.path / "report.csv");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "id,jaccard,area_error,estimator");
  CHECK(lines[1] == "000000_full,1,0,flow");
  CHECK(lines[2] == "000001_full,0.53125,0.75,flow");
  CHECK(lines[3] == "zzzzz_bad,nan,nan,flow");

  write_histogram_csv(r, tmp.path / "hist.csv");
  const auto hist = read_lines(tmp.path / "hist.csv");
  REQUIRE(hist.size() == 21);
  CHECK(hist[0] == "bin_lo,count");
  CHECK(hist[1] == "0,0");
  CHECK(hist[11] == "0.5,1");
  CHECK(hist[20] == "0.95,1");
}

TEST_CASE("manifests round-trip and reject foreign versions") {
  TempDir tmp;
  DatasetManifest m;
  m.seed = 42;
  m.alpha_loss = 0.25;
  m.raster = {100, 120, 0.25};
  m.samples = {{"a_full", "train"}, {"b_half", "eval"}};
  save_manifest(tmp.path, m);

  const DatasetManifest back = load_manifest(tmp.path);
  CHECK(back.version == kManifestVersion);
  CHECK(back.seed == 42);
  CHECK(back.alpha_loss == 0.25);
  CHECK(back.raster.width_px == 100);
  CHECK(back.raster.height_px == 120);
  CHECK(back.raster.resolution_mm == 0.25);
  REQUIRE(back.samples.size() == 2);
  CHECK(back.samples[0].id == "a_full");
  CHECK(back.samples[1].split == "eval");

  m.version = "rollpass-ds/0";
  save_manifest(tmp.path, m);
  CHECK_THROWS_AS(load_manifest(tmp.path), Error);
}
