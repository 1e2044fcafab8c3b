#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "glide/graph.hpp"
#include "glide/invariance.hpp"
#include "glide/report.hpp"

namespace glide {

enum class DataModel { Categorical, LinearGaussian, NonlinearNonGaussian };

DataModel parse_data_model(std::string_view text);  // cat | lg | nlng
std::string_view to_string(DataModel model);

struct SimulationOptions {
  int min_cats = 2;
  int max_cats = 5;
  double weight_low = 0.5;
  double weight_high = 2.0;
  double noise_sd = 1.0;
};

/// Dataset ready for discovery: categorical samples as-is, continuous samples
/// discretized into `bins` equal-width bins.
Dataset simulate_for_discovery(const Dag& dag, DataModel model, std::size_t n, int bins, std::uint64_t seed,
                               const SimulationOptions& options = {});

struct BenchCell {
  std::string name;
  GraphKind kind = GraphKind::ErdosRenyi;
  int d = 10;
  std::size_t e = 10;
  DataModel model = DataModel::Categorical;
  std::size_t n = 10000;
  std::vector<std::uint64_t> seeds;
  GlideConfig config;
  SimulationOptions simulation;
};

struct BenchSuite {
  std::vector<BenchCell> cells;
  unsigned workers = 1;
};

/// Suite file layout:
///   { "workers": 1, "seeds": 10 | [..], "glide": {...},
///     "cells": [ { "name", "kind", "d", "e", "model", "n", "seeds", "glide" } ] }
/// Cell-level "seeds"/"glide" override the suite-level ones.
BenchSuite parse_suite(const Json& j);

struct RunRecord {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  int shd = 0;
  double spurious_rate = 0.0;
  double tpr = 0.0;
  std::size_t predicted_edges = 0;
  double runtime = 0.0;  // seconds spent in discovery
};

/// Sample mean with a two-sided 95% Student-t interval; NaN bounds for fewer
/// than two values.
struct Interval {
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

Interval t_interval(const std::vector<double>& values, double level = 0.95);

struct CellSummary {
  BenchCell cell;
  std::vector<RunRecord> runs;  // seed order
  std::size_t failures = 0;
  Interval shd, spurious_rate, tpr, runtime;
};

RunRecord run_bench_once(const BenchCell& cell, std::uint64_t seed);

/// Runs every (cell, seed) pair on a pool of `suite.workers` threads. Failed
/// runs are recorded and excluded from the intervals. Output order follows
/// the suite, not completion order.
std::vector<CellSummary> run_bench(const BenchSuite& suite,
                                   const std::function<void(const std::string&)>& progress = {});

/// Table with one row per cell. Runtime columns are the only
/// non-reproducible values; `include_runtime = false` drops them.
std::string bench_csv(const std::vector<CellSummary>& cells, bool include_runtime = true);
Json bench_json(const std::vector<CellSummary>& cells, bool include_runtime = true);

}  // namespace glide
