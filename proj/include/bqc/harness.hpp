#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace bqc::harness {

/// P(X >= k) for X ~ Binomial(n, p).
double binomial_tail_geq(long long n, long long k, double p);

/// One-sided Clopper-Pearson upper confidence limit for the success rate.
double binomial_upper_confidence(long long n, long long k, double alpha);

/// One-sided exact test of the observed count against an analytic ceiling:
/// the bound is falsified only when seeing `count` or more successes would
/// be less than `significance`-probable at rate = bound.
struct BinomialCheck {
  long long trials = 0;
  long long count = 0;
  double rate = 0.0;
  double bound = 0.0;
  double p_value = 1.0;
  double upper_999 = 0.0;
  bool pass = true;
};
BinomialCheck one_sided_binomial_check(long long trials, long long count,
                                       double bound,
                                       double significance = 1e-3);

struct Report {
  nlohmann::json summary;
  bool pass = true;
};

struct RunUbqcConfig {
  int cols = 2;
  int rows = 1;
  std::vector<int> phi;      // angle indices, column-major; zeros if empty
  std::string pattern_file;  // overrides the inline pattern when set
  std::string preparation = "ideal";  // "ideal" | "rbsp"
  double epsilon = 0.01;              // rbsp: target blindness/robustness
  double transmittance = 0.5;         // rbsp
  double source_mean = 0.0;           // rbsp; 0 means mu = T
  int pulses = 0;                     // rbsp; 0 means required_pulses(S, eps, T)
  long long trials = 1;
  bool compare_plain = false;
  double tv_tolerance = 0.05;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

struct RbspMcConfig {
  int pulses = 2000;
  double transmittance = 0.5;
  double source_mean = 0.0;  // 0 means mu = T
  std::string strategy = "honest";  // "honest" | "suppress-singles"
  long long trials = 10000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool write_trials_csv = false;
};

struct BoundTableConfig {
  std::vector<int> sizes = {1, 10, 100};
  std::vector<double> epsilons = {1e-3, 1e-6};
  std::vector<double> transmittances = {0.25, 0.5, 0.9, 1.0};
  std::string out_dir = ".";
};

struct BlindnessConfig {
  int size = 1;
  std::string prep = "ideal";  // "ideal" | "rbsp" | "depolarized"
  double p_fail = 0.0;         // rbsp
  double depolarize_q = 0.0;   // depolarized
  std::string out_dir = ".";
};

struct I1dcTestConfig {
  int max_k = 10;
  long long instances = 1000;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

Report cmd_run_ubqc(const RunUbqcConfig& config);
Report cmd_rbsp_montecarlo(const RbspMcConfig& config);
Report cmd_bound_table(const BoundTableConfig& config);
Report cmd_blindness_check(const BlindnessConfig& config);
Report cmd_i1dc_test(const I1dcTestConfig& config);

RunUbqcConfig run_ubqc_config_from_json(const nlohmann::json& j);
RbspMcConfig rbsp_mc_config_from_json(const nlohmann::json& j);
BoundTableConfig bound_table_config_from_json(const nlohmann::json& j);
BlindnessConfig blindness_config_from_json(const nlohmann::json& j);
I1dcTestConfig i1dc_test_config_from_json(const nlohmann::json& j);

}  // namespace bqc::harness
