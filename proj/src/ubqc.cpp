#include "bqc/ubqc.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace bqc {

Angle8 blind_angle(Angle8 phi_prime, Angle8 theta, int r) {
  return Angle8(phi_prime.index() + theta.index() + 4 * (r & 1));
}

int decode_outcome(int s, int r) { return (s ^ r) & 1; }

namespace {

const char* kind_name(TranscriptEvent::Kind kind) {
  switch (kind) {
    case TranscriptEvent::Kind::Prepare: return "prepare";
    case TranscriptEvent::Kind::Delta: return "delta";
    case TranscriptEvent::Kind::Outcome: return "outcome";
    case TranscriptEvent::Kind::Output: return "output";
    case TranscriptEvent::Kind::Abort: return "abort";
  }
  throw std::logic_error("unknown transcript kind");
}

TranscriptEvent::Kind kind_from_name(const std::string& name) {
  using Kind = TranscriptEvent::Kind;
  if (name == "prepare") return Kind::Prepare;
  if (name == "delta") return Kind::Delta;
  if (name == "outcome") return Kind::Outcome;
  if (name == "output") return Kind::Output;
  if (name == "abort") return Kind::Abort;
  throw std::invalid_argument("unknown transcript kind: " + name);
}

}  // namespace

void Transcript::write_jsonl(std::ostream& out) const {
  for (const TranscriptEvent& e : events_) {
    nlohmann::json j{{"kind", kind_name(e.kind)},
                     {"col", e.pos.col},
                     {"row", e.pos.row},
                     {"value", e.value}};
    out << j.dump() << '\n';
  }
}

Transcript Transcript::read_jsonl(std::istream& in) {
  Transcript t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    t.add({kind_from_name(j.at("kind").get<std::string>()),
           {j.at("col").get<int>(), j.at("row").get<int>()},
           j.at("value").get<int>()});
  }
  return t;
}

UbqcRunResult run_ubqc(const BrickworkPattern& pattern, ServerBehavior& server,
                       const Preparation& preparation, SplitMix64& rng) {
  using Kind = TranscriptEvent::Kind;
  const int size = pattern.size();

  UbqcRunResult run;
  run.secret.theta.resize(size, Angle8(0));
  run.secret.r.resize(size, 0);
  for (int k = 0; k < size; ++k) {
    run.secret.theta[k] = Angle8(rng.next_angle_index());
    run.secret.r[k] = rng.next_bit();
  }

  // Preparation phase: the server ends up holding one blinded qubit per
  // position. Under RBSP the angle comes out of the subprotocol instead of
  // being drawn above.
  PureState register_state(0);
  if (std::holds_alternative<IdealPreparation>(preparation)) {
    register_state = PureState::product_plus(run.secret.theta);
  } else {
    const auto& rbsp = std::get<RbspPreparation>(preparation);
    HonestStrategy honest;
    for (int k = 0; k < size; ++k) {
      RbspOutcome prepared =
          run_rbsp(rbsp.pulses, rbsp.channel, honest, rng);
      if (prepared.aborted) {
        run.transcript.add({Kind::Abort, {}, 1});
        run.aborted = true;
        return run;
      }
      run.secret.theta[k] = *prepared.theta_client;
      register_state = tensor(register_state, prepared.server_qubit);
    }
  }
  for (int k = 0; k < size; ++k)
    run.transcript.add({Kind::Prepare, pattern.position_at(k),
                        run.secret.theta[k].index()});

  for (const Edge& e : pattern.edges())
    register_state = apply_cz(register_state, pattern.index_of(e.first),
                              pattern.index_of(e.second));

  // Interaction: phi' is always computed from decoded outcomes so the
  // adaptive structure matches the unblinded reference machine.
  run.result.outcomes.assign(size, 0);
  for (int k = 0; k < size; ++k) {
    const Position pos = pattern.position_at(k);
    int s_x = 0, s_z = 0;
    for (const Position& p : pattern.x_deps(pos))
      s_x ^= run.result.outcomes[pattern.index_of(p)];
    for (const Position& p : pattern.z_deps(pos))
      s_z ^= run.result.outcomes[pattern.index_of(p)];
    const Angle8 phi_prime = adapted_angle(pattern.phi(pos), s_x, s_z);
    const Angle8 delta =
        blind_angle(phi_prime, run.secret.theta[k], run.secret.r[k]);
    run.transcript.add({Kind::Delta, pos, delta.index()});

    MeasurementOutcome measured =
        measure_rotated(register_state, 0, delta, rng.next_unit());
    register_state = std::move(measured.post_state);
    const int reported = server.report(pos, delta, measured.bit) & 1;
    run.transcript.add({Kind::Outcome, pos, reported});
    run.result.outcomes[k] = decode_outcome(reported, run.secret.r[k]);
  }

  run.result.corrected_outputs.resize(pattern.rows());
  for (int y = 1; y <= pattern.rows(); ++y) {
    const int bit = run.result.outcomes[pattern.index_of({pattern.cols(), y})];
    run.result.corrected_outputs[y - 1] = bit;
    run.transcript.add({Kind::Output, {pattern.cols(), y}, bit});
  }
  run.result.final_state = std::move(register_state);
  return run;
}

Matrix server_view_state(Angle8 phi) {
  Matrix view = Matrix::Zero(16, 16);
  for (int theta = 0; theta < 8; ++theta) {
    for (int r = 0; r < 2; ++r) {
      const Angle8 delta = blind_angle(phi, Angle8(theta), r);
      const Eigen::Vector2cd qubit = plus_state(Angle8(theta));
      view += tensor(qubit * qubit.adjoint(),
                     basis_projector(delta.index(), 8));
    }
  }
  return view / 16.0;
}

}  // namespace bqc
