#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bqc/angle.hpp"
#include "bqc/linalg.hpp"
#include "bqc/qsim.hpp"
#include "bqc/rng.hpp"

namespace bqc {

/// Lossy channel of transmittance lower bound T plus the weak-coherent
/// source mean mu. mu = T is the analyzed operating point; other values
/// remain configurable.
struct ChannelModel {
  double transmittance;
  double source_mean;

  static ChannelModel with_default_mean(double t) { return {t, t}; }
  void validate() const;
};

struct PulseRecord {
  Angle8 sigma;        // client-private polarization
  int true_count;      // photons reaching the server
  int declared_count;  // photon number the server reports
};

/// Photon-number declaration policy. The analysis reduces the adversary to
/// memoryless per-pulse declarations; sigma is disclosed to the strategy
/// only for multi-photon pulses (full leakage assumed at >= 2 photons).
class ServerStrategy {
 public:
  virtual ~ServerStrategy() = default;
  virtual std::string_view name() const = 0;
  /// Whether the adversary swaps in a lossless channel (true counts then
  /// follow Poisson(mu) instead of Poisson(T*mu)).
  virtual bool lossless_channel() const = 0;
  virtual int declare(int true_count, std::optional<Angle8> sigma) = 0;
};

class HonestStrategy final : public ServerStrategy {
 public:
  std::string_view name() const override { return "honest"; }
  bool lossless_channel() const override { return false; }
  int declare(int true_count, std::optional<Angle8>) override {
    return true_count;
  }
};

/// Declare 0 for zero or one photon, truthfully at two or more.
int strategy_suppress_singles(int true_count);

class SuppressSinglesStrategy final : public ServerStrategy {
 public:
  std::string_view name() const override { return "suppress-singles"; }
  bool lossless_channel() const override { return true; }
  int declare(int true_count, std::optional<Angle8>) override {
    return strategy_suppress_singles(true_count);
  }
};

/// Poisson(T*mu) photon count behind the lossy channel (Poisson thinning).
int sample_received_count(const ChannelModel& channel, SplitMix64& rng);

/// Abort iff reported_zero_count > N(e^{-T^2} + T^2/6), strictly.
bool vacuum_abort_test(int num_pulses, double transmittance,
                       int reported_zero_count);

/// Pulse-count rule N = ceil(18 ln(S/epsilon) / T^4) delivering epsilon-level
/// robustness and blindness for a size-S computation.
int required_pulses(int computation_size, double epsilon,
                    double transmittance);

struct RbspOutcome {
  bool aborted = false;
  std::optional<Angle8> theta_client;  // present iff not aborted
  bool fail_event = false;  // no single photon was honestly declared as one
  std::vector<PulseRecord> pulses;
  PureState server_qubit{0};  // I1DC output qubit when not aborted
  DensityMatrix server_state;  // 18-dim (register ⊗ success flag) cq-state
};

/// One full remote-preparation round: N random-polarization pulses, photon
/// number declarations under the given strategy, vacuum test, then the I1DC
/// chain over one qubit per declared-nonzero pulse in sending order.
RbspOutcome run_rbsp(int num_pulses, const ChannelModel& channel,
                     ServerStrategy& strategy, SplitMix64& rng);

}  // namespace bqc
