#include "glide/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "glide/error.hpp"

namespace glide {
namespace {

Json names_of(const NodeSet& set, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (NodeId v : set) out.push_back(names.at(v));
  return out;
}

Json edges_of(const std::vector<Edge>& edges, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (const auto& [p, c] : edges) out.push_back(Json::array({names.at(p), names.at(c)}));
  return out;
}

// JSON has no infinity; unscorable values become null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::InvalidArgument, std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

Json to_json(const GlideConfig& cfg) {
  return Json{{"m", cfg.m},
              {"gamma", cfg.gamma_o},
              {"epsilon", cfg.epsilon},
              {"alpha", cfg.ci_alpha},
              {"bins", cfg.bins},
              {"laplace", cfg.laplace_alpha},
              {"pool", cfg.pool},
              {"seed", cfg.seed},
              {"min_rows", cfg.min_rows},
              {"cap_k", cfg.cap_k},
              {"max_candidates", cfg.max_candidates},
              {"budget", std::string(to_string(cfg.budget))},
              {"min_support", cfg.min_support},
              {"refine_max_size", cfg.refine_max_size},
              {"threads", cfg.threads}};
}

void apply_config(GlideConfig& target, const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
  GlideConfig cfg = target;
  for (const auto& [key, value] : j.items()) {
    if (key == "m") cfg.m = field<int>(j, "m");
    else if (key == "gamma") cfg.gamma_o = field<double>(j, "gamma");
    else if (key == "epsilon") cfg.epsilon = field<double>(j, "epsilon");
    else if (key == "alpha") cfg.ci_alpha = field<double>(j, "alpha");
    else if (key == "bins") cfg.bins = field<int>(j, "bins");
    else if (key == "laplace") cfg.laplace_alpha = field<double>(j, "laplace");
    else if (key == "pool") cfg.pool = field<std::size_t>(j, "pool");
    else if (key == "seed") cfg.seed = field<std::uint64_t>(j, "seed");
    else if (key == "min_rows") cfg.min_rows = field<std::size_t>(j, "min_rows");
    else if (key == "cap_k") cfg.cap_k = field<int>(j, "cap_k");
    else if (key == "max_candidates") cfg.max_candidates = field<std::size_t>(j, "max_candidates");
    else if (key == "budget") cfg.budget = parse_prior_budget(field<std::string>(j, "budget"));
    else if (key == "min_support") cfg.min_support = field<std::size_t>(j, "min_support");
    else if (key == "refine_max_size") cfg.refine_max_size = field<int>(j, "refine_max_size");
    else if (key == "threads") cfg.threads = field<unsigned>(j, "threads");
    else if (key == "mode") continue;  // consumed by the command line layer
    else throw Error(ErrorKind::InvalidArgument, "unknown config field '" + key + "'");
  }
  cfg.validate();
  target = cfg;
}

Json to_json(const GlideReport& report, const std::vector<std::string>& names) {
  Json envs = Json::array();
  for (const auto& env : report.environments) {
    Json priors = Json::array();
    for (const auto& prior : env.priors) {
      priors.push_back(Json{{"variable", names.at(prior.variable)}, {"probs", prior.probs}, {"gamma", prior.gamma}});
    }
    envs.push_back(Json{{"rows", env.rows},
                        {"achieved_gamma", env.achieved_gamma},
                        {"step_gamma", env.step_gamma},
                        {"priors", priors}});
  }
  Json nodes = Json::array();
  for (const auto& node : report.nodes) {
    Json candidates = Json::array();
    for (const auto& c : node.candidates) candidates.push_back(names_of(c, names));
    Json flags = Json::array();
    if (node.in_basis) flags.push_back("basis");
    if (node.below_confidence) flags.push_back("below_confidence");
    if (node.no_support) flags.push_back("no_support");
    if (node.assumptions_hold.has_value() && !*node.assumptions_hold) flags.push_back("assumptions_violated");
    Json n{{"name", node.name},
           {"blanket", names_of(node.blanket, names)},
           {"core", names_of(node.core, names)},
           {"spouses", names_of(node.spouses, names)},
           {"degeneracy", node.degeneracy},
           {"candidates", candidates},
           {"winner", names_of(node.parents, names)},
           {"variance", finite_or_null(node.variance)},
           {"runner_up", finite_or_null(node.runner_up)},
           {"margin", finite_or_null(node.margin)},
           {"flags", flags}};
    nodes.push_back(std::move(n));
  }
  double mean_gamma = 0.0;
  for (const auto& env : report.environments) mean_gamma += env.achieved_gamma;
  if (!report.environments.empty()) mean_gamma /= static_cast<double>(report.environments.size());
  return Json{{"version", kVersion},
              {"config", to_json(report.config)},
              {"backend", report.oracle ? "oracle" : "data"},
              {"rows", report.rows},
              {"variables", names},
              {"basis", names_of(report.basis, names)},
              {"variable_gamma", report.variable_gamma},
              {"mean_achieved_gamma", mean_gamma},
              {"environments", envs},
              {"nodes", nodes},
              {"edges", edges_of(report.edges, names)},
              {"cycle_repairs", edges_of(report.removed_edges, names)},
              {"warnings", report.warnings}};
}

Json to_json(const MetricReport& metrics, const std::vector<std::string>& names) {
  return Json{{"shd", metrics.shd},
              {"spurious_rate", metrics.spurious_rate},
              {"tpr", metrics.tpr},
              {"missing", metrics.missing.size()},
              {"extra", metrics.extra.size()},
              {"reversed", metrics.reversed.size()},
              {"missing_edges", edges_of(metrics.missing, names)},
              {"extra_edges", edges_of(metrics.extra, names)},
              {"reversed_edges", edges_of(metrics.reversed, names)}};
}

Json to_json(const RunManifest& manifest) {
  return Json{{"tool", "glide"},
              {"version", kVersion},
              {"command", manifest.command},
              {"seed", manifest.seed},
              {"config", manifest.config},
              {"inputs", manifest.inputs},
              {"outputs", manifest.outputs},
              {"started", manifest.started},
              {"finished", manifest.finished},
              {"timings", manifest.timings},
              {"diagnostics", manifest.diagnostics}};
}

Json to_json(const IndepStats& stats) {
  return Json{{"computed", stats.tests},
              {"cache_hits", stats.cache_hits},
              {"degenerate", stats.degenerate},
              {"skipped_strata", stats.skipped_strata}};
}

std::string manifest_path(const std::string& artifact) { return artifact + ".manifest.json"; }

void write_manifest(const std::string& artifact, const RunManifest& manifest) {
  write_text(manifest_path(artifact), to_json(manifest).dump(2) + "\n");
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%FT%TZ", &utc);
  return buffer;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

}  // namespace glide
