#include "rollpass/estimators.hpp"

#include <sys/types.h>
#include <sys/wait.h>

#include <cmath>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <unistd.h>

namespace rollpass {

namespace {

void validate_input(const EstimatorInput& in) {
  if (in.inlet.width() != in.over_mask.width() || in.inlet.height() != in.over_mask.height() ||
      in.inlet.width() != in.under_mask.width() ||
      in.inlet.height() != in.under_mask.height()) {
    throw DimensionMismatch("estimator input channels have differing dimensions");
  }
  if (in.inlet.empty()) {
    throw Error("estimator input inlet is empty");
  }
}

}  // namespace

Raster gap_mask(const EstimatorInput& in) {
  return complement(union_of(in.over_mask, in.under_mask));
}

Raster estimate_baseline1(const EstimatorInput& in) {
  validate_input(in);
  return intersect(in.inlet, gap_mask(in));
}

Raster estimate_baseline2(const EstimatorInput& in) {
  validate_input(in);
  const Raster gap = gap_mask(in);
  const long long inlet_area = in.inlet.area_px();
  Raster best = intersect(dilate(in.inlet, 2), gap);
  long long best_diff = std::llabs(best.area_px() - inlet_area);
  for (int k = 3; k <= 8; ++k) {
    Raster out = intersect(dilate(in.inlet, k), gap);
    const long long diff = std::llabs(out.area_px() - inlet_area);
    if (diff < best_diff) {
      best = std::move(out);
      best_diff = diff;
    }
  }
  return best;
}

Raster estimate_flow(const EstimatorInput& in, const FlowParams& params) {
  validate_input(in);
  if (params.alpha_loss < 0.0 || params.alpha_loss > 1.0) {
    throw Error("alpha_loss must lie in [0, 1]");
  }
  const Raster gap = gap_mask(in);
  Raster out = intersect(in.inlet, gap);
  const long long displaced = in.inlet.area_px() - out.area_px();
  const long long target =
      in.inlet.area_px() - std::llround(params.alpha_loss * static_cast<double>(displaced));

  long long area = out.area_px();
  while (area < target) {
    long long added = 0;
    for (int i = 0; i < out.height() && area < target; ++i) {
      int left = -1;
      int right = -1;
      for (int j = 0; j < out.width(); ++j) {
        if (out.at(i, j)) {
          if (left < 0) {
            left = j;
          }
          right = j;
        }
      }
      if (left < 0) {
        continue;
      }
      if (left > 0 && gap.at(i, left - 1) && !out.at(i, left - 1)) {
        out.set(i, left - 1, true);
        ++area;
        ++added;
        if (area == target) {
          break;
        }
      }
      if (right + 1 < out.width() && gap.at(i, right + 1) && !out.at(i, right + 1)) {
        out.set(i, right + 1, true);
        ++area;
        ++added;
      }
    }
    if (added == 0) {
      break;  // gap capacity reached along every occupied row
    }
  }
  return out;
}

namespace {

std::filesystem::path make_work_dir() {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / "rollpass-ext-XXXXXX").string();
  if (!mkdtemp(tmpl.data())) {
    throw Error("cannot create external-estimator working directory");
  }
  return tmpl;
}

void write_protocol_files(const EstimatorInput& in, const std::filesystem::path& dir) {
  std::ofstream proto(dir / "PROTOCOL");
  proto << kExternalProtocolVersion << "\n";
  proto.close();
  write_pbm(in.inlet, dir / "inlet.pbm");
  write_pbm(in.over_mask, dir / "over.pbm");
  write_pbm(in.under_mask, dir / "under.pbm");
}

}  // namespace

Raster estimate_external(const EstimatorInput& in, const std::string& command,
                         std::chrono::milliseconds timeout) {
  validate_input(in);
  const std::filesystem::path dir = make_work_dir();
  write_protocol_files(in, dir);

  const pid_t pid = fork();
  if (pid < 0) {
    throw Error("fork failed for external estimator");
  }
  if (pid == 0) {
    // child: <command> "$1" with $1 bound to the working directory
    execl("/bin/sh", "sh", "-c", (command + " \"$1\"").c_str(), "rollpass-ext",
          dir.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      break;
    }
    if (r < 0) {
      throw Error("waitpid failed for external estimator");
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      throw Timeout("external estimator exceeded " +
                    std::to_string(timeout.count()) + " ms; inputs kept in " +
                    dir.string());
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }

  const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
  if (exit_code != 0) {
    throw ExternalFailure("external estimator exited with code " +
                              std::to_string(exit_code) + "; inputs kept in " +
                              dir.string(),
                          exit_code);
  }
  Raster out = [&] {
    try {
      return read_pbm(dir / "outlet.pbm", in.inlet.resolution());
    } catch (const Error& e) {
      throw ExternalFailure(std::string("external estimator produced no readable "
                                        "outlet.pbm: ") +
                                e.what(),
                            0);
    }
  }();
  if (out.width() != in.inlet.width() || out.height() != in.inlet.height()) {
    throw ExternalFailure("external estimator outlet.pbm dimensions differ from the "
                          "inlet; inputs kept in " + dir.string(),
                          0);
  }
  std::filesystem::remove_all(dir);
  return out;
}

namespace {

class Baseline1Estimator final : public Estimator {
 public:
  Raster estimate(const EstimatorInput& in) const override {
    return estimate_baseline1(in);
  }
  std::string id() const override { return "baseline1"; }
};

class Baseline2Estimator final : public Estimator {
 public:
  Raster estimate(const EstimatorInput& in) const override {
    return estimate_baseline2(in);
  }
  std::string id() const override { return "baseline2"; }
};

class FlowEstimator final : public Estimator {
 public:
  explicit FlowEstimator(FlowParams params) : params_(params) {}
  Raster estimate(const EstimatorInput& in) const override {
    return estimate_flow(in, params_);
  }
  std::string id() const override { return "flow"; }

 private:
  FlowParams params_;
};

class ExternalEstimator final : public Estimator {
 public:
  explicit ExternalEstimator(std::string command) : command_(std::move(command)) {}
  Raster estimate(const EstimatorInput& in) const override {
    return estimate_external(in, command_);
  }
  std::string id() const override { return "ext:" + command_; }

 private:
  std::string command_;
};

}  // namespace

std::unique_ptr<Estimator> make_estimator(const std::string& spec,
                                          const FlowParams& flow) {
  if (spec == "baseline1") {
    return std::make_unique<Baseline1Estimator>();
  }
  if (spec == "baseline2") {
    return std::make_unique<Baseline2Estimator>();
  }
  if (spec == "flow") {
    return std::make_unique<FlowEstimator>(flow);
  }
  if (spec.rfind("ext:", 0) == 0 && spec.size() > 4) {
    return std::make_unique<ExternalEstimator>(spec.substr(4));
  }
  throw Error("unknown estimator spec '" + spec +
              "' (expected baseline1, baseline2, flow, or ext:<command>)");
}

}  // namespace rollpass
