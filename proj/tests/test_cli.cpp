#include <sys/stat.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "rollpass/dataset.hpp"
#include "rollpass/json_io.hpp"
#include "rollpass/planner.hpp"

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

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs the installed binary through the shell, capturing both streams.
RunResult run_cli(const std::string& args, const std::string& env = {}) {
  const TempDir cap;
  const fs::path out = cap.path / "out";
  const fs::path err = cap.path / "err";
  const std::string cmd = (env.empty() ? "" : env + " ") + ROLLPASS_BIN + " " + args +
                          " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out), read_file(err)};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("help requests succeed and name every subcommand") {
  const RunResult r = run_cli("--help");
  CHECK(r.code == 0);
  for (const char* cmd : {"gen-rolls", "gen-dataset", "split", "augment", "estimate",
                          "evaluate", "plan"}) {
    CHECK(contains(r.out, cmd));
  }
}

TEST_CASE("usage mistakes exit with code one") {
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("").code == 1);  // a subcommand is required
  CHECK(run_cli("gen-rolls --count 2").code == 1);  // --out missing
  CHECK(run_cli("gen-rolls --count 2 --bogus 3 --out /tmp/x").code == 1);
  TempDir tmp;
  CHECK(run_cli("estimate --estimator wat --sample \"" + tmp.path.string() +
                "\" --out \"" + (tmp.path / "o.pbm").string() + "\"")
            .code == 1);
}

TEST_CASE("runtime failures exit with code two and an error line") {
  TempDir tmp;
  const RunResult r =
      run_cli("evaluate --estimator flow --dataset \"" +
              (tmp.path / "missing").string() + "\" --report \"" +
              (tmp.path / "rep.csv").string() + "\"");
  CHECK(r.code == 2);
  CHECK(contains(r.err, "error: "));
}

TEST_CASE("gen-rolls writes reproducible loadable profiles") {
  TempDir tmp;
  const fs::path dir_a = tmp.path / "a";
  const fs::path dir_b = tmp.path / "b";
  const fs::path dir_c = tmp.path / "c";

  const RunResult a = run_cli("gen-rolls --count 3 --seed 5 --out \"" +
                              dir_a.string() + "\"");
  CHECK(a.code == 0);
  CHECK(contains(a.out, "wrote 3 profiles"));
  CHECK(contains(a.err, "config: command=gen-rolls"));

  for (const char* name :
       {"profile_000000.json", "profile_000001.json", "profile_000002.json"}) {
    const RollProfile p = profile_from_json(load_json(dir_a / name));
    CHECK(p.width() >= 80.0);
    CHECK(p.width() <= 200.0);
  }

  // Profile i is the library generator under stream i of the seed.
  RngStream rng(5, 0);
  const RollProfile direct = generate_profile(rng);
  const RollProfile loaded = profile_from_json(load_json(dir_a / "profile_000000.json"));
  REQUIRE(loaded.over().knots().size() == direct.over().knots().size());
  for (std::size_t i = 0; i < loaded.over().knots().size(); ++i) {
    CHECK(loaded.over().knots()[i].x == direct.over().knots()[i].x);
    CHECK(loaded.over().knots()[i].y == direct.over().knots()[i].y);
  }

  CHECK(run_cli("gen-rolls --count 3 --seed 5 --out \"" + dir_b.string() + "\"").code ==
        0);
  CHECK(run_cli("gen-rolls --count 3 --out \"" + dir_c.string() + "\"",
                "ROLLPASS_SEED=5")
            .code == 0);
  for (const char* name :
       {"profile_000000.json", "profile_000001.json", "profile_000002.json"}) {
    const std::string bytes = read_file(dir_a / name);
    CHECK(read_file(dir_b / name) == bytes);
    CHECK(read_file(dir_c / name) == bytes);  // env seed equals flag seed
  }
}

TEST_CASE("the dataset pipeline runs end to end through the binary") {
  TempDir tmp;
  const fs::path ds = tmp.path / "ds";

  const RunResult gen = run_cli("gen-dataset --count 2 --seed 9 --out \"" +
                                ds.string() + "\" --jobs 2");
  CHECK(gen.code == 0);
  CHECK(contains(gen.out, "wrote 4 samples"));
  CHECK(contains(gen.err, "config: command=gen-dataset"));
  CHECK(load_manifest(ds).samples.size() == 4);

  const RunResult sp = run_cli("split --dataset \"" + ds.string() +
                               "\" --train 0 --val 0 --eval 1 --seed 3");
  CHECK(sp.code == 0);
  CHECK(contains(sp.out, "split 4 samples: train=0 val=0 eval=4"));

  const fs::path rep = tmp.path / "rep.csv";
  const RunResult ev = run_cli("evaluate --estimator flow --dataset \"" + ds.string() +
                               "\" --split eval --closure full --report \"" +
                               rep.string() + "\"");
  CHECK(ev.code == 0);
  CHECK(contains(ev.out, "mean jaccard 1 over 2 samples"));
  CHECK(contains(ev.err, "config: command=evaluate"));
  {
    std::ifstream f(rep);
    std::string header;
    std::getline(f, header);
    CHECK(header == "id,jaccard,area_error,estimator");
    std::string row;
    std::getline(f, row);
    CHECK(contains(row, ",1,0,flow"));
  }
  CHECK(fs::exists(tmp.path / "rep_hist.csv"));

  const RunResult resplit = run_cli("split --dataset \"" + ds.string() +
                                    "\" --train 1 --val 0 --eval 0 --seed 3");
  CHECK(resplit.code == 0);
  const RunResult aug = run_cli("augment --dataset \"" + ds.string() + "\" --seed 7");
  CHECK(aug.code == 0);
  CHECK(contains(aug.out, "split 'train' now has 28 samples"));
  CHECK(load_manifest(ds).samples.size() == 28);
}

TEST_CASE("estimate reproduces a stored outlet and honors ext commands") {
  TempDir tmp;
  const fs::path ds = tmp.path / "ds";
  REQUIRE(run_cli("gen-dataset --count 1 --seed 4 --out \"" + ds.string() + "\"").code ==
          0);
  const fs::path sample = ds / "samples" / "000000_full";

  const fs::path out = tmp.path / "est.pbm";
  const RunResult r = run_cli("estimate --estimator flow --alpha 0.5 --sample \"" +
                              sample.string() + "\" --out \"" + out.string() + "\"");
  CHECK(r.code == 0);
  CHECK(contains(r.err, "config: command=estimate"));
  CHECK(read_file(out) == read_file(sample / "outlet.pbm"));

  const fs::path script = tmp.path / "identity.sh";
  {
    std::ofstream f(script);
    f << "#!/bin/sh\ncp \"$1/inlet.pbm\" \"$1/outlet.pbm\"\n";
  }
  chmod(script.c_str(), 0755);
  const fs::path out2 = tmp.path / "ext.pbm";
  const RunResult e = run_cli("estimate --estimator \"ext:" + script.string() +
                              "\" --sample \"" + sample.string() + "\" --out \"" +
                              out2.string() + "\"");
  CHECK(e.code == 0);
  CHECK(read_file(out2) == read_file(sample / "inlet.pbm"));
}

TEST_CASE("plan finds a provided final stand and serializes the result") {
  TempDir tmp;
  REQUIRE(run_cli("gen-rolls --count 1 --seed 5 --out \"" + tmp.path.string() +
                  "\"").code == 0);
  const fs::path profile_json = tmp.path / "profile_000000.json";

  const Raster inlet = rasterize_disk(10.0);
  const StandConfig stand{profile_from_json(load_json(profile_json)), 0};
  const auto flow = make_estimator("flow", {0.5});
  const Raster target = apply_stand(inlet, stand, *flow);

  const fs::path inlet_p = tmp.path / "inlet.pbm";
  const fs::path target_p = tmp.path / "target.pbm";
  write_pbm(inlet, inlet_p);
  write_pbm(target, target_p);

  const fs::path plan_p = tmp.path / "plan.json";
  const RunResult r = run_cli("plan --inlet \"" + inlet_p.string() + "\" --target \"" +
                              target_p.string() + "\" -n 0 -d 1 --final \"" +
                              profile_json.string() + "\" --seed 1 --out \"" +
                              plan_p.string() + "\"");
  CHECK(r.code == 0);
  CHECK(contains(r.out, "best score 1 with 1 step(s)"));
  CHECK(contains(r.err, "config: command=plan"));

  const Plan loaded = plan_from_json(load_json(plan_p));
  CHECK(loaded.score == 1.0);
  CHECK(loaded.estimator_id == "flow");
  REQUIRE(loaded.steps.size() == 1);
  CHECK(loaded.steps[0].rotation == 0);
  CHECK(replay(loaded, inlet, *flow) == target);
}
