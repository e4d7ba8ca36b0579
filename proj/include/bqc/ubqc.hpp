#pragma once

#include <iosfwd>
#include <variant>
#include <vector>

#include "bqc/angle.hpp"
#include "bqc/linalg.hpp"
#include "bqc/mbqc.hpp"
#include "bqc/rbsp.hpp"
#include "bqc/rng.hpp"

namespace bqc {

/// delta = phi' + theta + pi*r.
Angle8 blind_angle(Angle8 phi_prime, Angle8 theta, int r);

/// s XOR r.
int decode_outcome(int s, int r);

/// Per-position blinding data, drawn uniformly from the client's stream.
struct ClientSecret {
  std::vector<Angle8> theta;  // column-major order
  std::vector<int> r;
};

struct TranscriptEvent {
  enum class Kind { Prepare, Delta, Outcome, Output, Abort };
  Kind kind = Kind::Abort;
  Position pos{};  // unused for Abort; Output carries (cols, row)
  int value = 0;   // angle index / bit, depending on kind
  bool operator==(const TranscriptEvent&) const = default;
};

/// Ordered protocol record. Prepare events carry the client-view theta;
/// Delta/Outcome interleave strictly in measurement order.
class Transcript {
 public:
  void add(TranscriptEvent event) { events_.push_back(event); }
  const std::vector<TranscriptEvent>& events() const { return events_; }
  bool operator==(const Transcript&) const = default;

  /// One JSON object per line: {"kind":..., "col":..., "row":..., "value":...}
  void write_jsonl(std::ostream& out) const;
  static Transcript read_jsonl(std::istream& in);

 private:
  std::vector<TranscriptEvent> events_;
};

/// Server deviation hook. The honest measurement always happens; a strategy
/// may misreport the outcome (blindness holds regardless, and the response
/// tests exercise exactly this surface).
class ServerBehavior {
 public:
  virtual ~ServerBehavior() = default;
  virtual int report(Position pos, Angle8 delta, int measured_bit) = 0;
};

class HonestServer final : public ServerBehavior {
 public:
  int report(Position, Angle8, int measured_bit) override {
    return measured_bit;
  }
};

class FixedReportServer final : public ServerBehavior {
 public:
  explicit FixedReportServer(int bit) : bit_(bit & 1) {}
  int report(Position, Angle8, int) override { return bit_; }

 private:
  int bit_;
};

class RandomReportServer final : public ServerBehavior {
 public:
  explicit RandomReportServer(std::uint64_t seed) : rng_(seed) {}
  int report(Position, Angle8, int) override { return rng_.next_bit(); }

 private:
  SplitMix64 rng_;
};

struct IdealPreparation {};

struct RbspPreparation {
  int pulses;
  ChannelModel channel;
};

using Preparation = std::variant<IdealPreparation, RbspPreparation>;

struct UbqcRunResult {
  Transcript transcript;
  bool aborted = false;
  ClientSecret secret;
  MbqcRunResult result;  // decoded outcomes; valid when not aborted
};

/// Full protocol run: preparation of blinded qubits (ideal or one RBSP call
/// per position), entangling per edge_rule, then the adaptive loop with
/// delta = phi' + theta + pi*r where phi' is computed from decoded previous
/// outcomes. Aborts can only originate in RBSP preparation.
UbqcRunResult run_ubqc(const BrickworkPattern& pattern, ServerBehavior& server,
                       const Preparation& preparation, SplitMix64& rng);

/// Exact server-side view at computation size 1: the 16-dim cq-state
/// (1/16) sum_{theta,r} |+_theta><+_theta| ⊗ |delta><delta| for the given
/// computational angle. Blindness at S=1 makes this phi-independent.
Matrix server_view_state(Angle8 phi);

}  // namespace bqc
