#include "nutgauge/config.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

namespace nutgauge::cli {

using json = nlohmann::json;

const std::vector<std::pair<std::string, Command>>& command_names() {
  static const std::vector<std::pair<std::string, Command>> names = {
      {"verify-geometry", Command::VerifyGeometry},
      {"green-identity", Command::GreenIdentity},
      {"harmonic-suite", Command::HarmonicSuite},
      {"build-instanton", Command::BuildInstanton},
      {"energy", Command::Energy},
      {"decay", Command::Decay},
      {"twistor-lines", Command::TwistorLines},
      {"equivariance", Command::Equivariance},
      {"moduli-sample", Command::ModuliSample},
  };
  return names;
}

Command parse_command(const std::string& name) {
  for (const auto& [n, c] : command_names())
    if (n == name) return c;
  std::string valid;
  for (const auto& [n, c] : command_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ValidationError("unknown command '" + name + "'; valid commands: " + valid);
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config parse error: ") + e.what());
  }
  RunConfig rc;
  try {
    rc.geometry.c = doc.value("c", 1.0);
    if (doc.contains("nuts")) {
      for (const auto& row : doc.at("nuts")) {
        if (!row.is_array() || row.size() != 3)
          throw ValidationError("field 'nuts': each entry must be [x,y,z]");
        rc.geometry.points.push_back(Vec3{row[0].get<double>(), row[1].get<double>(),
                                          row[2].get<double>()});
      }
    }
    if (doc.contains("command")) rc.command = parse_command(doc.at("command").get<std::string>());
    rc.h = doc.value("h", 1e-3);
    rc.R_max = doc.value("R_max", 24.0);
    rc.epsilon = doc.value("epsilon", 0.0);
    rc.K = doc.value("K", 1000);
    rc.j_max = doc.value("j_max", 3);
    rc.seed = doc.value("seed", 0u);
    rc.pure_green = doc.value("pure_green", false);
    rc.lens_s = doc.value("s", 1);
    rc.lambda = doc.value("lambda", 1.0);
    if (doc.contains("tolerances"))
      for (const auto& [k, v] : doc.at("tolerances").items())
        rc.tolerances[k] = v.get<double>();
    if (doc.contains("family")) {
      const std::string f = doc.at("family").get<std::string>();
      if (f == "caloron")
        rc.family = Family::Caloron;
      else if (f == "collapsed")
        rc.family = Family::Collapsed;
      else if (f == "bpst")
        rc.family = Family::Bpst;
      else
        throw ValidationError("field 'family': expected caloron|collapsed|bpst");
    }
    if (doc.contains("sources")) {
      for (const auto& s : doc.at("sources")) {
        SourceConfig sc;
        const auto& y = s.at("y");
        sc.y = Vec3{y[0].get<double>(), y[1].get<double>(), y[2].get<double>()};
        sc.tau = s.value("tau", 0.0);
        sc.lambda = s.value("lambda", 1.0);
        rc.sources.push_back(sc);
      }
    }
    if (doc.contains("out")) rc.out_path = doc.at("out").get<std::string>();
    if (doc.contains("format")) {
      const std::string f = doc.at("format").get<std::string>();
      if (f == "json")
        rc.format = OutputFormat::Json;
      else if (f == "csv")
        rc.format = OutputFormat::Csv;
      else
        throw ValidationError("field 'format': expected json|csv");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("config field error: ") + e.what());
  }

  // validation
  if (!(rc.h > 0)) throw ValidationError("field 'h' must be positive");
  if (!(rc.R_max > 0)) throw ValidationError("field 'R_max' must be positive");
  if (rc.epsilon < 0) throw ValidationError("field 'epsilon' must be non-negative");
  if (rc.K < 1) throw ValidationError("field 'K' must be >= 1");
  if (rc.j_max < 0) throw ValidationError("field 'j_max' must be >= 0");
  if (rc.lens_s < 1) throw ValidationError("field 's' must be >= 1");
  if (!(rc.lambda > 0)) throw ValidationError("field 'lambda' must be positive");
  if (!rc.geometry.points.empty()) rc.geometry.validate();
  return rc;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace nutgauge::cli
