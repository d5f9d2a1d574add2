#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "coiso/problems.hpp"
#include "coiso/shake_rattle.hpp"

namespace coiso::cli {

inline const std::vector<std::string>& emit_names() {
  static const std::vector<std::string> names{"trajectory", "energy",           "residuals",  "hopf",
                                              "fibre-scan", "structure-report", "convergence"};
  return names;
}

struct InitialSpec {
  std::string name;             // z_a, z_b, z_c, default, or empty for an explicit vector
  std::optional<Vec> explicitZ;
};

struct ConvergenceSpec {
  std::vector<double> hList{0.1, 0.05, 0.025, 0.0125};
  double T = 1.0;
};

struct RunConfig {
  std::string problem;
  ProblemParams params;
  Mode mode = Mode::Rattle;
  std::string underlying = "implicit-midpoint";
  double h = 0.1;
  std::size_t steps = 1000;
  InitialSpec initial{"default", std::nullopt};
  NewtonConfig newton;
  std::vector<std::string> emit;
  ConvergenceSpec convergence;
  int fibreScanSamples = 360;
  int structureSamples = 64;
  std::string outputDir = "out";
  unsigned seed = 0;

  bool emits(const std::string& what) const;
  nlohmann::ordered_json echo() const;
};

/// Parse or validation failure. `issues` lists every problem found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Accepts the TOML subset, or JSON when the first non-blank character is '{'.
RunConfig parse_config(const std::string& text);

/// Re-checks fields after command-line overrides.
void validate(const RunConfig& cfg);

std::vector<std::string> split_list(const std::string& s);

}  // namespace coiso::cli
