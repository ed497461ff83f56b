#include "rollpass/cli.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rollpass/dataset.hpp"
#include "rollpass/json_io.hpp"
#include "rollpass/parallel.hpp"
#include "rollpass/planner.hpp"

namespace rollpass::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string check_estimator_spec(const std::string& spec) {
  if (spec == "baseline1" || spec == "baseline2" || spec == "flow" ||
      (spec.rfind("ext:", 0) == 0 && spec.size() > 4)) {
    return {};
  }
  return "expected baseline1, baseline2, flow, or ext:<command>";
}

// A --final argument: either {profile, rotation} or a bare profile
// document as written by gen-rolls (rotation 0).
StandConfig load_stand_config(const std::filesystem::path& path) {
  const nlohmann::json j = load_json(path);
  if (j.contains("over_knots")) {
    return {profile_from_json(j), 0};
  }
  return {profile_from_json(j.at("profile")), j.at("rotation").get<int>()};
}

void cmd_gen_rolls(int count, std::uint64_t seed, const std::filesystem::path& out) {
  std::cerr << "config: command=gen-rolls count=" << count << " seed=" << seed
            << " out=" << out << "\n";
  std::filesystem::create_directories(out);
  for (int i = 0; i < count; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    char name[32];
    std::snprintf(name, sizeof name, "profile_%06d.json", i);
    save_json(profile_to_json(generate_profile(rng)), out / name);
  }
  std::cout << "wrote " << count << " profiles to " << out.string() << "\n";
}

void cmd_gen_dataset(int count, std::uint64_t seed, double alpha,
                     const std::filesystem::path& out, unsigned jobs) {
  std::cerr << "config: command=gen-dataset count=" << count << " seed=" << seed
            << " alpha=" << fmt(alpha) << " out=" << out << " jobs=" << jobs
            << " raster=200x200@0.5\n";
  const DatasetManifest manifest =
      generate_dataset(out, count, seed, FlowParams{alpha}, {}, {}, jobs);
  std::cout << "wrote " << manifest.samples.size() << " samples to " << out.string()
            << "\n";
}

void cmd_split(const std::filesystem::path& dataset, double train, double val,
               double eval_frac, std::uint64_t seed) {
  std::cerr << "config: command=split dataset=" << dataset << " train=" << fmt(train)
            << " val=" << fmt(val) << " eval=" << fmt(eval_frac) << " seed=" << seed
            << "\n";
  DatasetManifest manifest = load_manifest(dataset);
  manifest = split_dataset(std::move(manifest), {train, val, eval_frac}, seed);
  save_manifest(dataset, manifest);
  std::size_t counts[3] = {0, 0, 0};
  for (const ManifestEntry& e : manifest.samples) {
    if (e.split == "train") {
      ++counts[0];
    } else if (e.split == "val") {
      ++counts[1];
    } else if (e.split == "eval") {
      ++counts[2];
    }
  }
  std::cout << "split " << manifest.samples.size() << " samples: train=" << counts[0]
            << " val=" << counts[1] << " eval=" << counts[2] << "\n";
}

void cmd_augment(const std::filesystem::path& dataset, const std::string& split,
                 std::uint64_t seed, unsigned jobs) {
  std::cerr << "config: command=augment dataset=" << dataset << " split=" << split
            << " seed=" << seed << " jobs=" << jobs << "\n";
  const DatasetManifest manifest =
      augment_split(dataset, load_manifest(dataset), split, seed, jobs);
  std::size_t count = 0;
  for (const ManifestEntry& e : manifest.samples) {
    count += e.split == split;
  }
  std::cout << "split '" << split << "' now has " << count << " samples\n";
}

void cmd_estimate(const std::string& spec, double alpha,
                  const std::filesystem::path& sample,
                  const std::filesystem::path& out) {
  std::cerr << "config: command=estimate estimator=" << spec << " alpha=" << fmt(alpha)
            << " sample=" << sample << " out=" << out << "\n";
  const auto estimator = make_estimator(spec, FlowParams{alpha});
  const Raster outlet = estimator->estimate({read_pbm(sample / "inlet.pbm"),
                                             read_pbm(sample / "over.pbm"),
                                             read_pbm(sample / "under.pbm")});
  write_pbm(outlet, out);
  std::cout << "wrote " << out.string() << " (area " << outlet.area_px() << " px)\n";
}

void cmd_evaluate(const std::string& spec, const std::filesystem::path& dataset,
                  const std::string& split, const std::string& closure,
                  std::optional<double> alpha, const std::filesystem::path& report_path,
                  unsigned jobs) {
  const DatasetManifest manifest = load_manifest(dataset);
  const double alpha_used = alpha.value_or(manifest.alpha_loss);
  std::cerr << "config: command=evaluate estimator=" << spec << " dataset=" << dataset
            << " split=" << split << " closure=" << closure
            << " alpha=" << fmt(alpha_used) << " report=" << report_path
            << " jobs=" << jobs << "\n";
  const auto estimator = make_estimator(spec, FlowParams{alpha_used});
  const Report report = evaluate(dataset, manifest, *estimator, split, closure, jobs);
  write_report_csv(report, report_path);
  std::filesystem::path hist = report_path;
  hist.replace_filename(report_path.stem().string() + "_hist" +
                        report_path.extension().string());
  write_histogram_csv(report, hist);
  std::cout << "mean jaccard " << fmt(report.mean_jaccard) << " over "
            << report.rows.size() << " samples\n";
}

void cmd_plan(const std::filesystem::path& inlet_path,
              const std::filesystem::path& target_path, const std::string& spec,
              double alpha, int n, int d, const std::string& final_path,
              std::uint64_t seed, const std::filesystem::path& out) {
  std::cerr << "config: command=plan inlet=" << inlet_path << " target=" << target_path
            << " estimator=" << spec << " alpha=" << fmt(alpha) << " n=" << n
            << " d=" << d << " final=" << (final_path.empty() ? "<none>" : final_path)
            << " seed=" << seed << " out=" << out << "\n";
  const auto estimator = make_estimator(spec, FlowParams{alpha});
  std::optional<StandConfig> final_config;
  if (!final_path.empty()) {
    final_config = load_stand_config(final_path);
  }
  RngStream rng(seed);
  const Plan result = plan(read_pbm(inlet_path), read_pbm(target_path), *estimator, n,
                           d, final_config, rng);
  save_json(plan_to_json(result), out);
  std::cout << "best score " << fmt(result.score) << " with " << result.steps.size()
            << " step(s), written to " << out.string() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Deterministic hot-rolling pass-design toolkit"};
  app.require_subcommand(1);

  const auto estimator_check = CLI::Validator(check_estimator_spec, "ESTIMATOR");

  // gen-rolls
  auto* gen_rolls = app.add_subcommand("gen-rolls", "Generate roll profiles as JSON");
  int gr_count = 1;
  std::uint64_t gr_seed = 0;
  std::string gr_out;
  gen_rolls->add_option("--count", gr_count, "Number of profiles")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_rolls->add_option("--seed", gr_seed, "Generator seed")->envname("ROLLPASS_SEED");
  gen_rolls->add_option("--out", gr_out, "Output directory")->required();
  gen_rolls->callback([&] { cmd_gen_rolls(gr_count, gr_seed, gr_out); });

  // gen-dataset
  auto* gen_dataset =
      app.add_subcommand("gen-dataset", "Generate a scenario dataset (2 samples each)");
  int gd_count = 1;
  std::uint64_t gd_seed = 0;
  double gd_alpha = 0.5;
  std::string gd_out;
  unsigned gd_jobs = 0;
  gen_dataset->add_option("--count", gd_count, "Number of scenarios")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_dataset->add_option("--seed", gd_seed, "Generator seed")->envname("ROLLPASS_SEED");
  gen_dataset->add_option("--alpha", gd_alpha, "Flow surrogate loss fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  gen_dataset->add_option("--out", gd_out, "Dataset root directory")->required();
  gen_dataset->add_option("--jobs", gd_jobs, "Worker threads (0 = machine)")
      ->capture_default_str();
  gen_dataset->callback(
      [&] { cmd_gen_dataset(gd_count, gd_seed, gd_alpha, gd_out, gd_jobs); });

  // split
  auto* split = app.add_subcommand("split", "Assign train/val/eval splits");
  std::string sp_dataset;
  double sp_train = 0.0;
  double sp_val = 0.0;
  double sp_eval = 0.0;
  std::uint64_t sp_seed = 0;
  split->add_option("--dataset", sp_dataset, "Dataset root")->required();
  split->add_option("--train", sp_train, "Train fraction")->required();
  split->add_option("--val", sp_val, "Validation fraction")->required();
  split->add_option("--eval", sp_eval, "Evaluation fraction")->required();
  split->add_option("--seed", sp_seed, "Shuffle seed")->envname("ROLLPASS_SEED");
  split->callback([&] { cmd_split(sp_dataset, sp_train, sp_val, sp_eval, sp_seed); });

  // augment
  auto* augment = app.add_subcommand("augment", "Augment one split sevenfold");
  std::string au_dataset;
  std::string au_split = "train";
  std::uint64_t au_seed = 0;
  unsigned au_jobs = 0;
  augment->add_option("--dataset", au_dataset, "Dataset root")->required();
  augment->add_option("--split", au_split, "Split to augment")->capture_default_str();
  augment->add_option("--seed", au_seed, "Angle seed")->envname("ROLLPASS_SEED");
  augment->add_option("--jobs", au_jobs, "Worker threads (0 = machine)")
      ->capture_default_str();
  augment->callback([&] { cmd_augment(au_dataset, au_split, au_seed, au_jobs); });

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Run one estimator on one sample");
  std::string es_spec;
  double es_alpha = 0.5;
  std::string es_sample;
  std::string es_out;
  estimate->add_option("--estimator", es_spec, "baseline1|baseline2|flow|ext:<cmd>")
      ->required()
      ->check(estimator_check);
  estimate->add_option("--alpha", es_alpha, "Flow surrogate loss fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  estimate->add_option("--sample", es_sample, "Sample directory")->required();
  estimate->add_option("--out", es_out, "Output PBM path")->required();
  estimate->callback([&] { cmd_estimate(es_spec, es_alpha, es_sample, es_out); });

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score an estimator over a split");
  std::string ev_spec;
  std::string ev_dataset;
  std::string ev_split = "eval";
  std::string ev_closure = "all";
  double ev_alpha = -1.0;
  bool ev_alpha_set = false;
  std::string ev_report;
  unsigned ev_jobs = 0;
  eval_cmd->add_option("--estimator", ev_spec, "baseline1|baseline2|flow|ext:<cmd>")
      ->required()
      ->check(estimator_check);
  eval_cmd->add_option("--dataset", ev_dataset, "Dataset root")->required();
  eval_cmd->add_option("--split", ev_split, "Split to score")->capture_default_str();
  eval_cmd
      ->add_option("--closure", ev_closure, "Sample filter: all, full, or half")
      ->check(CLI::IsMember({"all", "full", "half"}))
      ->capture_default_str();
  eval_cmd
      ->add_option_function<double>(
          "--alpha",
          [&](const double& v) {
            ev_alpha = v;
            ev_alpha_set = true;
          },
          "Flow loss fraction (default: the dataset's recorded value)")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--report", ev_report, "Report CSV path")->required();
  eval_cmd->add_option("--jobs", ev_jobs, "Worker threads (0 = machine)")
      ->capture_default_str();
  eval_cmd->callback([&] {
    cmd_evaluate(ev_spec, ev_dataset, ev_split, ev_closure,
                 ev_alpha_set ? std::optional<double>(ev_alpha) : std::nullopt,
                 ev_report, ev_jobs);
  });

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Search for a rolling sequence");
  std::string pl_inlet;
  std::string pl_target;
  std::string pl_spec = "flow";
  double pl_alpha = 0.5;
  int pl_n = 0;
  int pl_d = 1;
  std::string pl_final;
  std::uint64_t pl_seed = 0;
  std::string pl_out;
  plan_cmd->add_option("--inlet", pl_inlet, "Inlet PBM")->required();
  plan_cmd->add_option("--target", pl_target, "Target PBM")->required();
  plan_cmd->add_option("--estimator", pl_spec, "baseline1|baseline2|flow|ext:<cmd>")
      ->check(estimator_check)
      ->capture_default_str();
  plan_cmd->add_option("--alpha", pl_alpha, "Flow surrogate loss fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  plan_cmd->add_option("-n,--n", pl_n, "Random stands per node")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  plan_cmd->add_option("-d,--d", pl_d, "Search depth")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  plan_cmd->add_option("--final", pl_final,
                       "Stand config JSON always added at every level");
  plan_cmd->add_option("--seed", pl_seed, "Search seed")->envname("ROLLPASS_SEED");
  plan_cmd->add_option("--out", pl_out, "Plan JSON path")->required();
  plan_cmd->callback([&] {
    cmd_plan(pl_inlet, pl_target, pl_spec, pl_alpha, pl_n, pl_d, pl_final, pl_seed,
             pl_out);
  });

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace rollpass::cli
