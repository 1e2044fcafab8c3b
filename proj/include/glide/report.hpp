#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "glide/eval.hpp"
#include "glide/invariance.hpp"

namespace glide {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

Json to_json(const GlideConfig& cfg);
/// Overrides the fields present in `j`. Unknown keys and mistyped values throw
/// InvalidArgument; the result is validated and `cfg` is left untouched on
/// failure.
void apply_config(GlideConfig& cfg, const Json& j);

/// Deterministic run report: everything except wall-clock timings and
/// cache counters, which go to the manifest.
Json to_json(const GlideReport& report, const std::vector<std::string>& names);
Json to_json(const MetricReport& metrics, const std::vector<std::string>& names);

/// Provenance written next to every artifact as `<artifact>.manifest.json`.
/// Artifacts are pure functions of (command, config, inputs, seed); the
/// manifest additionally records when and how long the run took.
struct RunManifest {
  std::string command;
  Json config = Json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  std::map<std::string, double> timings;
  /// Scheduling-dependent counters (e.g. independence-test cache hits).
  Json diagnostics = Json::object();
};

Json to_json(const IndepStats& stats);
Json to_json(const RunManifest& manifest);
std::string manifest_path(const std::string& artifact);
void write_manifest(const std::string& artifact, const RunManifest& manifest);
std::string utc_now();

/// Writes `text` to `path`, throwing IoError on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace glide
