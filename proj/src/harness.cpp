#include "bqc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bqc/analysis.hpp"
#include "bqc/i1dc.hpp"
#include "bqc/mbqc.hpp"
#include "bqc/rbsp.hpp"
#include "bqc/rng.hpp"
#include "bqc/ubqc.hpp"

namespace bqc::harness {

double binomial_tail_geq(long long n, long long k, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  // Log-space accumulation: the term at j = k can underflow a double when
  // k sits far below the mode, yet the tail is still ~1.
  const double log_odds = std::log(p) - std::log1p(-p);
  double log_term = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) -
                    std::lgamma(nd - kd + 1.0) + kd * std::log(p) +
                    (nd - kd) * std::log1p(-p);
  double log_sum = log_term;
  for (long long j = k; j < n; ++j) {
    log_term += std::log(static_cast<double>(n - j)) -
                std::log(static_cast<double>(j + 1)) + log_odds;
    if (log_term <= log_sum) {
      log_sum += std::log1p(std::exp(log_term - log_sum));
      // Terms decay monotonically past the mode; the remainder is bounded
      // by (n - j) times the current term.
      if (log_term - log_sum < -42.0 &&
          static_cast<double>(n - j) * p < (j + 1) * (1.0 - p))
        break;
    } else {
      log_sum = log_term + std::log1p(std::exp(log_sum - log_term));
    }
  }
  return std::min(1.0, std::exp(log_sum));
}

double binomial_upper_confidence(long long n, long long k, double alpha) {
  if (n <= 0) throw std::invalid_argument("binomial_upper_confidence: n <= 0");
  if (k >= n) return 1.0;
  // Smallest p with P(X <= k | p) <= alpha; the CDF is decreasing in p.
  double lo = static_cast<double>(k) / static_cast<double>(n);
  double hi = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 1.0 - binomial_tail_geq(n, k + 1, mid);
    (cdf > alpha ? lo : hi) = mid;
  }
  return hi;
}

BinomialCheck one_sided_binomial_check(long long trials, long long count,
                                       double bound, double significance) {
  BinomialCheck check;
  check.trials = trials;
  check.count = count;
  check.rate = trials > 0 ? static_cast<double>(count) / trials : 0.0;
  check.bound = bound;
  check.p_value = binomial_tail_geq(trials, count, std::min(bound, 1.0));
  check.upper_999 = binomial_upper_confidence(trials, count, 1e-3);
  check.pass = check.p_value >= significance;
  return check;
}

namespace {

nlohmann::json check_to_json(const BinomialCheck& check) {
  return {{"trials", check.trials},   {"count", check.count},
          {"rate", check.rate},       {"bound", check.bound},
          {"p_value", check.p_value}, {"upper_999", check.upper_999},
          {"pass", check.pass}};
}

std::string format_double(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_summary(const std::filesystem::path& dir, const std::string& name,
                   const nlohmann::json& summary) {
  write_file(dir / name, summary.dump(2) + "\n");
}

// Distribution-free 99.9% half-width on the total-variation error of an
// empirical distribution over k categories (Bretagnolle-Huber-Carol):
// P(sum |p_hat - p| >= lambda) <= 2^k exp(-n lambda^2 / 2).
double tv_half_width_999(std::size_t categories, long long samples) {
  if (samples <= 0) return 1.0;
  const double log_term =
      categories * std::log(2.0) + std::log(2.0 / 1e-3);
  return 0.5 * std::sqrt(2.0 * log_term / samples);
}

BrickworkPattern pattern_from_config(const RunUbqcConfig& config) {
  if (!config.pattern_file.empty()) return load_pattern(config.pattern_file);
  std::vector<Angle8> phi;
  if (config.phi.empty()) {
    phi.assign(static_cast<std::size_t>(config.cols) * config.rows, Angle8(0));
  } else {
    for (int k : config.phi) phi.emplace_back(k);
  }
  return {config.cols, config.rows, std::move(phi)};
}

const char* kind_label(TranscriptEvent::Kind kind) {
  switch (kind) {
    case TranscriptEvent::Kind::Prepare: return "prepare";
    case TranscriptEvent::Kind::Delta: return "delta";
    case TranscriptEvent::Kind::Outcome: return "outcome";
    case TranscriptEvent::Kind::Output: return "output";
    case TranscriptEvent::Kind::Abort: return "abort";
  }
  return "?";
}

}  // namespace

Report cmd_run_ubqc(const RunUbqcConfig& config) {
  const BrickworkPattern pattern = pattern_from_config(config);
  const int size = pattern.size();

  Preparation preparation = IdealPreparation{};
  int pulses = 0;
  double mu = 0.0;
  double abort_bound = 0.0;
  if (config.preparation == "rbsp") {
    pulses = config.pulses > 0
                 ? config.pulses
                 : required_pulses(size, config.epsilon, config.transmittance);
    mu = config.source_mean > 0.0 ? config.source_mean : config.transmittance;
    preparation = RbspPreparation{pulses, {config.transmittance, mu}};
    abort_bound =
        std::min(1.0, size * fail_abort_bound(pulses, config.transmittance));
  } else if (config.preparation != "ideal") {
    throw std::invalid_argument("run-ubqc: unknown preparation \"" +
                                config.preparation + "\"");
  }

  const std::filesystem::path dir = prepare_out_dir(config.out_dir);
  std::ostringstream transcripts;
  std::vector<long long> output_counts(std::size_t(1) << pattern.rows(), 0);
  long long aborts = 0;

  HonestServer server;
  for (long long t = 0; t < config.trials; ++t) {
    SplitMix64 rng = derive_stream(config.seed, static_cast<std::uint64_t>(t));
    UbqcRunResult run = run_ubqc(pattern, server, preparation, rng);
    for (const TranscriptEvent& e : run.transcript.events()) {
      nlohmann::json line{{"trial", t},
                          {"kind", kind_label(e.kind)},
                          {"col", e.pos.col},
                          {"row", e.pos.row},
                          {"value", e.value}};
      transcripts << line.dump() << '\n';
    }
    if (run.aborted) {
      ++aborts;
      continue;
    }
    int index = 0;
    for (int bit : run.result.corrected_outputs) index = (index << 1) | bit;
    ++output_counts[index];
  }
  write_file(dir / "run_ubqc_transcripts.jsonl", transcripts.str());

  const long long completed = config.trials - aborts;
  std::vector<double> blind_dist(output_counts.size(), 0.0);
  for (std::size_t i = 0; i < output_counts.size(); ++i)
    blind_dist[i] = completed > 0
                        ? static_cast<double>(output_counts[i]) / completed
                        : 0.0;

  nlohmann::json summary{
      {"command", "run-ubqc"},
      {"config",
       {{"n", pattern.cols()},
        {"m", pattern.rows()},
        {"preparation", config.preparation},
        {"pulses", pulses},
        {"transmittance", config.transmittance},
        {"source_mean", mu},
        {"epsilon", config.epsilon},
        {"trials", config.trials},
        {"compare_plain", config.compare_plain},
        {"tv_tolerance", config.tv_tolerance},
        {"seed", config.seed}}},
      {"trials", config.trials},
      {"aborts", aborts},
      {"blind_output_distribution", blind_dist},
      {"blind_distribution_tv_ci_999",
       tv_half_width_999(blind_dist.size(), completed)}};

  bool pass = true;
  if (config.preparation == "rbsp") {
    const BinomialCheck abort_check =
        one_sided_binomial_check(config.trials, aborts, abort_bound);
    summary["abort_check"] = check_to_json(abort_check);
    pass = pass && abort_check.pass;
  }

  if (config.compare_plain) {
    std::vector<long long> plain_counts(output_counts.size(), 0);
    for (long long t = 0; t < config.trials; ++t) {
      SplitMix64 rng = derive_stream(
          config.seed, static_cast<std::uint64_t>(config.trials + t));
      MbqcRunResult plain = run_plain_mbqc(pattern, branch_source(rng));
      int index = 0;
      for (int bit : plain.corrected_outputs) index = (index << 1) | bit;
      ++plain_counts[index];
    }
    std::vector<double> plain_dist(plain_counts.size(), 0.0);
    double tv = 0.0;
    for (std::size_t i = 0; i < plain_counts.size(); ++i) {
      plain_dist[i] = static_cast<double>(plain_counts[i]) / config.trials;
      tv += std::abs(plain_dist[i] - blind_dist[i]);
    }
    tv /= 2.0;
    summary["plain_output_distribution"] = plain_dist;
    summary["total_variation"] = tv;
    summary["total_variation_ci_999"] =
        tv_half_width_999(plain_dist.size(), completed) +
        tv_half_width_999(plain_dist.size(), config.trials);
    summary["tv_pass"] = tv <= config.tv_tolerance;
    pass = pass && tv <= config.tv_tolerance;
  }

  summary["pass"] = pass;
  write_summary(dir, "run_ubqc_summary.json", summary);
  return {summary, pass};
}

Report cmd_rbsp_montecarlo(const RbspMcConfig& config) {
  if (config.trials < 1)
    throw std::invalid_argument("rbsp-mc: trials must be >= 1");
  const double mu = config.source_mean > 0.0 ? config.source_mean
                                             : config.transmittance;
  const ChannelModel channel{config.transmittance, mu};
  channel.validate();

  std::unique_ptr<ServerStrategy> strategy;
  if (config.strategy == "honest") {
    strategy = std::make_unique<HonestStrategy>();
  } else if (config.strategy == "suppress-singles") {
    strategy = std::make_unique<SuppressSinglesStrategy>();
  } else {
    throw std::invalid_argument("rbsp-mc: unknown strategy \"" +
                                config.strategy + "\"");
  }

  const std::filesystem::path dir = prepare_out_dir(config.out_dir);
  std::ostringstream csv;
  if (config.write_trials_csv) csv << "trial,aborted,fail_event,theta\n";

  long long aborts = 0, fails = 0, undetected_fails = 0;
  for (long long t = 0; t < config.trials; ++t) {
    SplitMix64 rng = derive_stream(config.seed, static_cast<std::uint64_t>(t));
    RbspOutcome outcome = run_rbsp(config.pulses, channel, *strategy, rng);
    if (outcome.aborted) ++aborts;
    if (outcome.fail_event) ++fails;
    if (!outcome.aborted && outcome.fail_event) ++undetected_fails;
    if (config.write_trials_csv)
      csv << t << ',' << (outcome.aborted ? 1 : 0) << ','
          << (outcome.fail_event ? 1 : 0) << ','
          << (outcome.theta_client ? outcome.theta_client->index() : -1)
          << '\n';
  }
  if (config.write_trials_csv)
    write_file(dir / "rbsp_trials.csv", csv.str());

  const double bound = fail_abort_bound(config.pulses, config.transmittance);
  const long long tested_count =
      config.strategy == "honest" ? aborts : undetected_fails;
  const BinomialCheck check =
      one_sided_binomial_check(config.trials, tested_count, bound);

  nlohmann::json summary{
      {"command", "rbsp-mc"},
      {"config",
       {{"pulses", config.pulses},
        {"transmittance", config.transmittance},
        {"source_mean", mu},
        {"strategy", config.strategy},
        {"trials", config.trials},
        {"seed", config.seed}}},
      {"trials", config.trials},
      {"seed", config.seed},
      {"aborts", aborts},
      {"fails", fails},
      {"undetected_fails", undetected_fails},
      {"bound", bound},
      {"check", check_to_json(check)},
      {"pass", check.pass}};
  write_summary(dir, "rbsp_mc_summary.json", summary);
  return {summary, check.pass};
}

Report cmd_bound_table(const BoundTableConfig& config) {
  if (config.sizes.empty() || config.epsilons.empty() ||
      config.transmittances.empty())
    throw std::invalid_argument("bound-table: grids must be non-empty");
  const std::filesystem::path dir = prepare_out_dir(config.out_dir);

  std::ostringstream csv;
  csv << "S,epsilon,T,N,bound,S_bound\n";
  bool pass = true;
  long long rows = 0;
  for (int s : config.sizes)
    for (double eps : config.epsilons)
      for (double t : config.transmittances) {
        const int n = required_pulses(s, eps, t);
        const double bound = fail_abort_bound(n, t);
        const double s_bound = s * bound;
        pass = pass && s_bound <= eps;
        csv << s << ',' << format_double(eps) << ',' << format_double(t)
            << ',' << n << ',' << format_double(bound) << ','
            << format_double(s_bound) << '\n';
        ++rows;
      }
  write_file(dir / "bound_table.csv", csv.str());

  nlohmann::json summary{{"command", "bound-table"},
                         {"rows", rows},
                         {"all_rows_within_epsilon", pass},
                         {"pass", pass}};
  write_summary(dir, "bound_table_summary.json", summary);
  return {summary, pass};
}

Report cmd_blindness_check(const BlindnessConfig& config) {
  PreparationModel prep = PreparationModel::ideal();
  CptpMap map = CptpMap::identity(2);
  if (config.prep == "rbsp") {
    prep = PreparationModel::rbsp_endstate(config.p_fail);
    map = CptpMap::append_success_flag();
  } else if (config.prep == "depolarized") {
    prep = PreparationModel::depolarized(config.depolarize_q);
  } else if (config.prep != "ideal") {
    throw std::invalid_argument("blindness-check: unknown preparation \"" +
                                config.prep + "\"");
  }

  const double eps = epsilon_prep(prep, map);
  const double certified = blindness_bound(config.size, eps);

  const JointState actual = build_joint_state(config.size, prep);
  const JointState reference =
      build_joint_state(config.size, PreparationModel::mapped_ideal(map));
  const double measured = joint_trace_distance(actual, reference);

  // phi-independence of the exact ideal construction, against phi = 0.
  const JointState ideal_joint =
      build_joint_state(config.size, PreparationModel::ideal());
  double ideal_spread = 0.0;
  const Matrix ideal_ref = server_marginal(ideal_joint, 0);
  const int phi_space = config.size == 1 ? 8 : 64;
  for (int phi_key = 1; phi_key < phi_space; ++phi_key)
    ideal_spread = std::max(
        ideal_spread,
        trace_distance(server_marginal(ideal_joint, phi_key), ideal_ref));

  const bool pass = measured <= certified + 1e-9 && ideal_spread < 1e-12;

  nlohmann::json summary{
      {"command", "blindness-check"},
      {"config",
       {{"size", config.size},
        {"prep", prep.description()},
        {"p_fail", config.p_fail},
        {"depolarize_q", config.depolarize_q}}},
      {"epsilon_prep", eps},
      {"certified_epsilon", certified},
      {"measured_joint_distance", measured},
      {"ideal_phi_independence_spread", ideal_spread},
      {"pass", pass}};

  const std::filesystem::path dir = prepare_out_dir(config.out_dir);
  write_summary(dir, "blindness_summary.json", summary);
  return {summary, pass};
}

Report cmd_i1dc_test(const I1dcTestConfig& config) {
  if (config.max_k < 2)
    throw std::invalid_argument("i1dc-test: max_k must be >= 2");
  if (config.instances < 1)
    throw std::invalid_argument("i1dc-test: instances must be >= 1");

  double min_fidelity = 1.0;
  for (long long t = 0; t < config.instances; ++t) {
    SplitMix64 rng = derive_stream(config.seed, static_cast<std::uint64_t>(t));
    const int k =
        2 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(
                                              config.max_k - 1));
    std::vector<Angle8> sigmas;
    sigmas.reserve(k);
    for (int i = 0; i < k; ++i) sigmas.emplace_back(rng.next_angle_index());
    const I1dcResult result = run_i1dc(sigmas, branch_source(rng));
    const Angle8 theta = client_theta(sigmas, result.t_bits);
    const double fidelity =
        std::norm(inner(PureState::plus(theta), result.final_state));
    min_fidelity = std::min(min_fidelity, fidelity);
  }
  const bool pass = min_fidelity >= 1.0 - 1e-9;

  nlohmann::json summary{{"command", "i1dc-test"},
                         {"config",
                          {{"max_k", config.max_k},
                           {"instances", config.instances},
                           {"seed", config.seed}}},
                         {"min_fidelity", min_fidelity},
                         {"pass", pass}};
  const std::filesystem::path dir = prepare_out_dir(config.out_dir);
  write_summary(dir, "i1dc_summary.json", summary);
  return {summary, pass};
}

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* name, T& field) {
  if (j.contains(name)) field = j.at(name).get<T>();
}

}  // namespace

RunUbqcConfig run_ubqc_config_from_json(const nlohmann::json& j) {
  RunUbqcConfig c;
  read_field(j, "n", c.cols);
  read_field(j, "m", c.rows);
  read_field(j, "phi", c.phi);
  read_field(j, "pattern_file", c.pattern_file);
  read_field(j, "preparation", c.preparation);
  read_field(j, "epsilon", c.epsilon);
  read_field(j, "transmittance", c.transmittance);
  read_field(j, "source_mean", c.source_mean);
  read_field(j, "pulses", c.pulses);
  read_field(j, "trials", c.trials);
  read_field(j, "compare_plain", c.compare_plain);
  read_field(j, "tv_tolerance", c.tv_tolerance);
  read_field(j, "master_seed", c.seed);
  return c;
}

RbspMcConfig rbsp_mc_config_from_json(const nlohmann::json& j) {
  RbspMcConfig c;
  read_field(j, "N", c.pulses);
  read_field(j, "T", c.transmittance);
  read_field(j, "mu", c.source_mean);
  read_field(j, "strategy", c.strategy);
  read_field(j, "trials", c.trials);
  read_field(j, "master_seed", c.seed);
  read_field(j, "write_trials_csv", c.write_trials_csv);
  return c;
}

BoundTableConfig bound_table_config_from_json(const nlohmann::json& j) {
  BoundTableConfig c;
  read_field(j, "S", c.sizes);
  read_field(j, "epsilon", c.epsilons);
  read_field(j, "T", c.transmittances);
  return c;
}

BlindnessConfig blindness_config_from_json(const nlohmann::json& j) {
  BlindnessConfig c;
  read_field(j, "S", c.size);
  read_field(j, "prep", c.prep);
  read_field(j, "p_fail", c.p_fail);
  read_field(j, "q", c.depolarize_q);
  return c;
}

I1dcTestConfig i1dc_test_config_from_json(const nlohmann::json& j) {
  I1dcTestConfig c;
  read_field(j, "max_k", c.max_k);
  read_field(j, "instances", c.instances);
  read_field(j, "master_seed", c.seed);
  return c;
}

}  // namespace bqc::harness
