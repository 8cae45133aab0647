#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nutgauge/core.hpp"
#include "nutgauge/geometry.hpp"

namespace nutgauge::cli {

enum class Command {
  VerifyGeometry,
  GreenIdentity,
  HarmonicSuite,
  BuildInstanton,
  Energy,
  Decay,
  TwistorLines,
  Equivariance,
  ModuliSample,
};

const std::vector<std::pair<std::string, Command>>& command_names();
Command parse_command(const std::string& name);

enum class OutputFormat { Json, Csv };

struct SourceConfig {
  Vec3 y{};
  double tau = 0;
  double lambda = 1;
};

/// Instanton family selector for the gauge commands.
enum class Family { Caloron, Collapsed, Bpst };

struct RunConfig {
  geom::NutConfiguration geometry;
  Command command = Command::VerifyGeometry;

  // numeric knobs with documented defaults
  double h = 1e-3;
  double R_max = 24.0;
  double epsilon = 0.0;  // 0: per-source default
  int K = 1000;
  int j_max = 3;
  unsigned seed = 0;
  std::map<std::string, double> tolerances;

  // gauge-family inputs
  Family family = Family::Caloron;
  std::vector<SourceConfig> sources;
  bool pure_green = false;
  int lens_s = 1;
  double lambda = 1.0;

  std::string out_path;
  OutputFormat format = OutputFormat::Json;

  double tol(const std::string& key, double fallback) const {
    auto it = tolerances.find(key);
    return it == tolerances.end() ? fallback : it->second;
  }
};

/// Parse and validate a JSON configuration document. Defaults: c = 1,
/// K = 1000, j_max = 3, seed = 0. Throws ParseError / ValidationError with
/// field diagnostics.
RunConfig parse_config(const std::string& text);

/// Serialize a double with 17 significant digits (deterministic output).
std::string format_double(double v);

}  // namespace nutgauge::cli
