#include "bqc/rbsp.hpp"

#include <cmath>
#include <stdexcept>

#include "bqc/i1dc.hpp"

namespace bqc {

void ChannelModel::validate() const {
  if (!(transmittance > 0.0 && transmittance <= 1.0))
    throw std::invalid_argument("ChannelModel: transmittance outside (0,1]");
  if (!(source_mean > 0.0))
    throw std::invalid_argument("ChannelModel: source mean must be positive");
}

int strategy_suppress_singles(int true_count) {
  return true_count <= 1 ? 0 : true_count;
}

int sample_received_count(const ChannelModel& channel, SplitMix64& rng) {
  channel.validate();
  return poisson_sample(channel.transmittance * channel.source_mean, rng);
}

bool vacuum_abort_test(int num_pulses, double transmittance,
                       int reported_zero_count) {
  if (num_pulses < 1)
    throw std::invalid_argument("vacuum_abort_test: need at least one pulse");
  if (reported_zero_count < 0 || reported_zero_count > num_pulses)
    throw std::invalid_argument("vacuum_abort_test: count outside [0, N]");
  const double t2 = transmittance * transmittance;
  const double threshold = num_pulses * (std::exp(-t2) + t2 / 6.0);
  return reported_zero_count > threshold;
}

int required_pulses(int computation_size, double epsilon,
                    double transmittance) {
  if (computation_size < 1)
    throw std::invalid_argument("required_pulses: size must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("required_pulses: epsilon outside (0,1)");
  if (!(transmittance > 0.0 && transmittance <= 1.0))
    throw std::invalid_argument("required_pulses: transmittance outside (0,1]");
  const double t4 = std::pow(transmittance, 4);
  return static_cast<int>(
      std::ceil(18.0 * std::log(computation_size / epsilon) / t4));
}

namespace {

// Worst-case end state: a 9-dim register carrying either the qubit
// (span of |0>,|1>) or the classical angle |k>, tensored with a success
// flag that is |0> on success and |1> on failure.
DensityMatrix endstate_success(const PureState& qubit) {
  Matrix reg = Matrix::Zero(9, 9);
  reg.topLeftCorner<2, 2>() = pure_to_density(qubit);
  return tensor(reg, basis_projector(0, 2));
}

DensityMatrix endstate_failure(Angle8 theta) {
  return tensor(basis_projector(theta.index(), 9), basis_projector(1, 2));
}

}  // namespace

RbspOutcome run_rbsp(int num_pulses, const ChannelModel& channel,
                     ServerStrategy& strategy, SplitMix64& rng) {
  if (num_pulses < 1)
    throw std::invalid_argument("run_rbsp: need at least one pulse");
  channel.validate();

  const double mean = strategy.lossless_channel()
                          ? channel.source_mean
                          : channel.transmittance * channel.source_mean;

  RbspOutcome outcome;
  outcome.pulses.reserve(num_pulses);
  bool single_declared_honestly = false;
  int declared_zeros = 0;
  for (int l = 0; l < num_pulses; ++l) {
    PulseRecord pulse;
    pulse.sigma = Angle8(rng.next_angle_index());
    pulse.true_count = poisson_sample(mean, rng);
    pulse.declared_count = strategy.declare(
        pulse.true_count, pulse.true_count >= 2
                              ? std::optional<Angle8>(pulse.sigma)
                              : std::nullopt);
    if (pulse.true_count == 1 && pulse.declared_count == 1)
      single_declared_honestly = true;
    if (pulse.declared_count == 0) ++declared_zeros;
    outcome.pulses.push_back(pulse);
  }
  outcome.fail_event = !single_declared_honestly;

  if (vacuum_abort_test(num_pulses, channel.transmittance, declared_zeros)) {
    outcome.aborted = true;
    return outcome;
  }

  std::vector<Angle8> kept;
  for (const PulseRecord& pulse : outcome.pulses)
    if (pulse.declared_count > 0) kept.push_back(pulse.sigma);
  if (kept.empty())
    throw std::logic_error(
        "run_rbsp: all-zero declaration passed the vacuum test");

  I1dcResult chain = run_i1dc(kept, branch_source(rng));
  outcome.theta_client = client_theta(kept, chain.t_bits);
  outcome.server_qubit = std::move(chain.final_state);
  outcome.server_state =
      outcome.fail_event ? endstate_failure(*outcome.theta_client)
                         : endstate_success(outcome.server_qubit);
  return outcome;
}

}  // namespace bqc
