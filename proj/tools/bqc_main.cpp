// Command-line harness: end-to-end UBQC runs, RBSP Monte Carlo campaigns,
// bound tables, blindness checks, and the I1DC property runner. Every
// command echoes its configuration into the output files so a rerun with
// the same config and seed reproduces them byte for byte.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bqc/harness.hpp"
#include "json.hpp"

namespace {

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

struct CommonFlags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_file, "JSON config file");
  cmd->add_option("--seed", flags.seed, "master seed (64-bit)");
  cmd->add_option("--trials", flags.trials, "number of trials");
  cmd->add_option("--out", flags.out_dir, "output directory");
}

int finish(const bqc::harness::Report& report,
           std::chrono::steady_clock::time_point started) {
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  std::cout << report.summary.dump(2) << '\n';
  std::cout << (report.pass ? "PASS" : "FAIL") << " (" << elapsed.count()
            << " ms)\n";
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind quantum computation protocol simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags, mc_flags, table_flags, blind_flags, i1dc_flags;
  std::string pattern_file;
  bool compare_plain = false;
  auto* run_cmd =
      app.add_subcommand("run-ubqc", "run the blind protocol end to end");
  add_common(run_cmd, run_flags);
  run_cmd->add_option("--pattern", pattern_file, "pattern JSON file");
  run_cmd->add_flag("--compare-plain", compare_plain,
                    "also sample the unblinded reference machine");

  int mc_pulses = 0;
  double mc_transmittance = 0.0;
  std::string mc_strategy;
  auto* mc_cmd =
      app.add_subcommand("rbsp-mc", "Monte Carlo over RBSP rounds");
  add_common(mc_cmd, mc_flags);
  mc_cmd->add_option("--pulses", mc_pulses, "pulses per round (N)");
  mc_cmd->add_option("--transmittance", mc_transmittance,
                     "channel transmittance lower bound (T)");
  mc_cmd->add_option("--strategy", mc_strategy,
                     "honest | suppress-singles");

  auto* table_cmd =
      app.add_subcommand("bound-table", "emit the (S, epsilon, T, N) table");
  add_common(table_cmd, table_flags);

  int blind_size = 0;
  std::string blind_prep;
  double blind_p_fail = -1.0;
  double blind_q = -1.0;
  auto* blind_cmd = app.add_subcommand(
      "blindness-check", "exact joint-state distances at S <= 2");
  add_common(blind_cmd, blind_flags);
  blind_cmd->add_option("--size", blind_size, "computation size S");
  blind_cmd->add_option("--prep", blind_prep,
                        "ideal | rbsp | depolarized");
  blind_cmd->add_option("--p-fail", blind_p_fail, "rbsp failure weight");
  blind_cmd->add_option("--q", blind_q, "depolarization weight");

  int i1dc_max_k = 0;
  auto* i1dc_cmd =
      app.add_subcommand("i1dc-test", "random-instance I1DC property run");
  add_common(i1dc_cmd, i1dc_flags);
  i1dc_cmd->add_option("--max-k", i1dc_max_k, "largest chain length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    if (run_cmd->parsed()) {
      auto config = bqc::harness::run_ubqc_config_from_json(
          load_config(run_flags.config_file));
      if (!pattern_file.empty()) config.pattern_file = pattern_file;
      if (compare_plain) config.compare_plain = true;
      if (run_flags.seed) config.seed = *run_flags.seed;
      if (run_flags.trials) config.trials = *run_flags.trials;
      config.out_dir = run_flags.out_dir;
      return finish(bqc::harness::cmd_run_ubqc(config), started);
    }
    if (mc_cmd->parsed()) {
      auto config = bqc::harness::rbsp_mc_config_from_json(
          load_config(mc_flags.config_file));
      if (mc_pulses > 0) config.pulses = mc_pulses;
      if (mc_transmittance > 0.0) config.transmittance = mc_transmittance;
      if (!mc_strategy.empty()) config.strategy = mc_strategy;
      if (mc_flags.seed) config.seed = *mc_flags.seed;
      if (mc_flags.trials) config.trials = *mc_flags.trials;
      config.out_dir = mc_flags.out_dir;
      return finish(bqc::harness::cmd_rbsp_montecarlo(config), started);
    }
    if (table_cmd->parsed()) {
      auto config = bqc::harness::bound_table_config_from_json(
          load_config(table_flags.config_file));
      config.out_dir = table_flags.out_dir;
      return finish(bqc::harness::cmd_bound_table(config), started);
    }
    if (blind_cmd->parsed()) {
      auto config = bqc::harness::blindness_config_from_json(
          load_config(blind_flags.config_file));
      if (blind_size > 0) config.size = blind_size;
      if (!blind_prep.empty()) config.prep = blind_prep;
      if (blind_p_fail >= 0.0) config.p_fail = blind_p_fail;
      if (blind_q >= 0.0) config.depolarize_q = blind_q;
      config.out_dir = blind_flags.out_dir;
      return finish(bqc::harness::cmd_blindness_check(config), started);
    }
    if (i1dc_cmd->parsed()) {
      auto config = bqc::harness::i1dc_test_config_from_json(
          load_config(i1dc_flags.config_file));
      if (i1dc_max_k > 0) config.max_k = i1dc_max_k;
      if (i1dc_flags.seed) config.seed = *i1dc_flags.seed;
      if (i1dc_flags.trials) config.instances = *i1dc_flags.trials;
      config.out_dir = i1dc_flags.out_dir;
      return finish(bqc::harness::cmd_i1dc_test(config), started);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
