#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "halftsp/cuts.hpp"
#include "halftsp/degreecut.hpp"
#include "halftsp/instance.hpp"
#include "halftsp/ojoin.hpp"
#include "halftsp/rational.hpp"

namespace halftsp {

enum class NumberMode { Rational, Float };

const char* to_string(NumberMode mode);
NumberMode parse_number_mode(const std::string& text);

struct RunConfig {
  std::string command = "run";
  std::string instance_path;
  std::string generator;  // "family:size"
  long samples = 1000;
  std::uint64_t seed = 1;
  NumberMode mode = NumberMode::Rational;
  ChargingParams params;
  std::string out;
  std::string csv;
  int jobs = 1;
  StatsMethod stats = StatsMethod::Exact;
  long stats_samples = 100000;

  void validate() const;
};

/// Reads --instance or builds --gen (the random family uses the run seed).
HalfIntegralInstance load_instance(const RunConfig& config);

struct SampleRecord {
  long index = 0;
  std::uint64_t seed = 0;
  Rational tree_cost;
  Rational join_cost;  // exact minimum T-join
  Rational tour_cost;  // after shortcutting
  double y_cost = 0;   // c(y), an upper bound on the join cost when y is feasible
  int odd_vertices = 0;
  bool feasible = true;
  VertexSet witness;  // violated odd cut when infeasible
  double min_y = 0;
};

struct MeanStat {
  double mean = 0;
  double stddev = 0;
  double stderr_ = 0;
  double ci_low = 0;  // 99%
  double ci_high = 0;
};

MeanStat mean_stat(const std::vector<double>& values);

struct CutLoad {
  VertexSet side;
  CutClass kind = CutClass::Unclassified;
  MeanStat load;  // y(delta(S)) over samples
};

struct RunResult {
  RunConfig config;
  std::string instance;
  int n = 0;          // instance vertices
  int support_n = 0;  // after the e+ split
  Rational lp_cost;
  EvenAtLastStats stats;
  std::vector<SampleRecord> samples;
  std::vector<CutLoad> cuts;
  MeanStat ratio;  // (c(T) + join) / c(x)
  MeanStat tour_ratio;
  MeanStat y_ratio;
  Rational mean_tree_cost, mean_join_cost, mean_tour_cost;
  long infeasible = 0;
  double min_y = 1;
  long first_failure_index = -1;
  VertexSet first_failure;
};

/// End-to-end hierarchical sampling plus the dual-charging O-join per sample.
RunResult run_ojoin(const HalfIntegralInstance& inst, const RunConfig& config);

struct DegreeCutRunResult {
  RunConfig config;
  std::string instance;
  int n = 0;
  Rational lp_cost;
  MatchingDecomposition decomposition;
  std::vector<SampleRecord> samples;
  std::vector<long> matching_draws;  // per decomposition term
  std::vector<MeanStat> vertex_load;  // empirical y(delta(u))
  std::vector<double> vertex_load_exact;  // exact under the fitted lambda
  std::vector<std::string> vertex_load_rational;  // rational mode only
  Rational vertex_bound;
  std::vector<long> normal_count, normal_even;  // per edge
  double min_normal_exact = 1;  // min over normal edges of P[even at last]
  MeanStat ratio;
  MeanStat tour_ratio;
  Rational mean_tree_cost, mean_join_cost, mean_tour_cost;
  long infeasible = 0;
  long first_failure_index = -1;
  VertexSet first_failure;
  double min_y = 1;
  double fit_error = 0;
};

DegreeCutRunResult run_degreecut(const HalfIntegralInstance& inst, const RunConfig& config);

/// Canonical JSON (sorted keys) and one-line-per-sample CSV.
std::string report_json(const RunResult& r);
std::string report_json(const DegreeCutRunResult& r);
std::string report_csv(const std::vector<SampleRecord>& samples);

/// Runs f(i) for i in [0, count) on `jobs` threads; results are written by index.
void parallel_for(long count, int jobs, const std::function<void(long)>& f);

}  // namespace halftsp
