#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "bqc/ubqc.hpp"

using namespace bqc;

namespace {

// Exact corrected-output distribution of the blind protocol: enumerate all
// theta and r assignments and every measurement branch with its Born
// weight. Independent of run_ubqc's sampling path.
std::vector<double> exact_blind_distribution(const BrickworkPattern& pattern) {
  const int size = pattern.size();
  const int theta_space = 1 << (3 * size);
  const int r_space = 1 << size;
  std::vector<double> dist(std::size_t(1) << pattern.rows(), 0.0);

  std::vector<int> decoded(size, 0);
  std::function<void(const std::vector<Angle8>&, const std::vector<int>&,
                     const PureState&, int, double)>
      walk = [&](const std::vector<Angle8>& theta, const std::vector<int>& r,
                 const PureState& state, int next, double weight) {
        if (next == size) {
          int index = 0;
          for (int y = 1; y <= pattern.rows(); ++y)
            index = (index << 1) |
                    decoded[pattern.index_of({pattern.cols(), y})];
          dist[index] += weight;
          return;
        }
        const Position pos = pattern.position_at(next);
        int s_x = 0, s_z = 0;
        for (const Position& p : pattern.x_deps(pos))
          s_x ^= decoded[pattern.index_of(p)];
        for (const Position& p : pattern.z_deps(pos))
          s_z ^= decoded[pattern.index_of(p)];
        const Angle8 delta = blind_angle(
            adapted_angle(pattern.phi(pos), s_x, s_z), theta[next], r[next]);
        for (int bit = 0; bit < 2; ++bit) {
          const ProjectionResult projection =
              project_rotated(state, 0, delta, bit);
          if (projection.probability <= 1e-15) continue;
          decoded[next] = decode_outcome(bit, r[next]);
          walk(theta, r, projection.post_state, next + 1,
               weight * projection.probability);
        }
        decoded[next] = 0;
      };

  for (int theta_key = 0; theta_key < theta_space; ++theta_key)
    for (int r_key = 0; r_key < r_space; ++r_key) {
      std::vector<Angle8> theta;
      std::vector<int> r;
      for (int i = 0; i < size; ++i) {
        theta.emplace_back((theta_key >> (3 * i)) & 7);
        r.push_back((r_key >> i) & 1);
      }
      PureState state = PureState::product_plus(theta);
      for (const Edge& e : pattern.edges())
        state = apply_cz(state, pattern.index_of(e.first),
                         pattern.index_of(e.second));
      walk(theta, r, state, 0, 1.0 / (theta_space * r_space));
    }
  return dist;
}

// Classical replay of the client's delta computation under a fixed
// reporting rule; counts the joint delta-tuple distribution over all
// (theta, r) assignments.
std::map<std::vector<int>, int> delta_distribution(
    const BrickworkPattern& pattern,
    const std::function<int(int, Angle8)>& reported_bit) {
  const int size = pattern.size();
  const int theta_space = 1 << (3 * size);
  const int r_space = 1 << size;
  std::map<std::vector<int>, int> histogram;
  for (int theta_key = 0; theta_key < theta_space; ++theta_key)
    for (int r_key = 0; r_key < r_space; ++r_key) {
      std::vector<int> decoded(size, 0), deltas;
      for (int k = 0; k < size; ++k) {
        const Position pos = pattern.position_at(k);
        int s_x = 0, s_z = 0;
        for (const Position& p : pattern.x_deps(pos))
          s_x ^= decoded[pattern.index_of(p)];
        for (const Position& p : pattern.z_deps(pos))
          s_z ^= decoded[pattern.index_of(p)];
        const Angle8 delta =
            blind_angle(adapted_angle(pattern.phi(pos), s_x, s_z),
                        Angle8((theta_key >> (3 * k)) & 7), (r_key >> k) & 1);
        deltas.push_back(delta.index());
        decoded[k] = decode_outcome(reported_bit(k, delta), (r_key >> k) & 1);
      }
      ++histogram[deltas];
    }
  return histogram;
}

void check_transcript_order(const Transcript& transcript,
                            const BrickworkPattern& pattern) {
  using Kind = TranscriptEvent::Kind;
  const int size = pattern.size();
  int prepares = 0, pending_delta = 0, outcomes = 0;
  for (const TranscriptEvent& e : transcript.events()) {
    switch (e.kind) {
      case Kind::Prepare:
        CHECK(pending_delta == 0);
        CHECK(outcomes == 0);
        ++prepares;
        break;
      case Kind::Delta:
        CHECK(prepares == size);
        CHECK(pending_delta == 0);
        // Strict column-major measurement order.
        CHECK(pattern.index_of(e.pos) == outcomes);
        ++pending_delta;
        break;
      case Kind::Outcome:
        CHECK(pending_delta == 1);
        CHECK(pattern.index_of(e.pos) == outcomes);
        pending_delta = 0;
        ++outcomes;
        break;
      case Kind::Output:
        CHECK(outcomes == size);
        break;
      case Kind::Abort:
        break;
    }
  }
  CHECK(prepares == size);
  CHECK(outcomes == size);
}

}  // namespace

TEST_CASE("blind_angle arithmetic") {
  CHECK(blind_angle(Angle8(1), Angle8(3), 1) == Angle8(0));
  CHECK(blind_angle(Angle8(0), Angle8(0), 0) == Angle8(0));
  CHECK(blind_angle(Angle8(5), Angle8(6), 0) == Angle8(3));
  for (int phi = 0; phi < 8; ++phi)
    for (int theta = 0; theta < 8; ++theta)
      CHECK(blind_angle(Angle8(phi), Angle8(theta), 1) ==
            blind_angle(Angle8(phi), Angle8(theta), 0) + Angle8(4));
}

TEST_CASE("decode_outcome is XOR") {
  CHECK(decode_outcome(0, 0) == 0);
  CHECK(decode_outcome(1, 1) == 0);
  CHECK(decode_outcome(0, 1) == 1);
  CHECK(decode_outcome(1, 0) == 1);
}

TEST_CASE("delta marginal is exactly uniform for every phi") {
  for (int phi = 0; phi < 8; ++phi) {
    std::array<int, 8> counts{};
    for (int theta = 0; theta < 8; ++theta)
      for (int r = 0; r < 2; ++r)
        ++counts[blind_angle(Angle8(phi), Angle8(theta), r).index()];
    for (int count : counts) CHECK(count == 2);
  }
}

TEST_CASE("server view state is phi independent and maximally mixed") {
  const Matrix reference = server_view_state(Angle8(0));
  CHECK(reference.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((reference - Matrix::Identity(16, 16) / 16.0).cwiseAbs().maxCoeff() <
        1e-12);
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b)
      CHECK(trace_distance(server_view_state(Angle8(a)),
                           server_view_state(Angle8(b))) < 1e-12);
}

TEST_CASE("fixed seed reproduces the transcript bit for bit") {
  const BrickworkPattern pattern(2, 2,
                                 {Angle8(1), Angle8(4), Angle8(2), Angle8(7)});
  HonestServer server;
  auto run_once = [&]() {
    SplitMix64 rng(0xdead);
    return run_ubqc(pattern, server, IdealPreparation{}, rng);
  };
  const UbqcRunResult a = run_once();
  const UbqcRunResult b = run_once();
  CHECK(a.transcript == b.transcript);
  CHECK(a.result.outcomes == b.result.outcomes);
  CHECK(a.result.corrected_outputs == b.result.corrected_outputs);
}

TEST_CASE("transcript event order follows the protocol") {
  const BrickworkPattern pattern(3, 2, std::vector<Angle8>(6, Angle8(2)));
  HonestServer server;
  SplitMix64 rng(0xbeef);
  const UbqcRunResult run = run_ubqc(pattern, server, IdealPreparation{}, rng);
  REQUIRE(!run.aborted);
  check_transcript_order(run.transcript, pattern);
}

TEST_CASE("delta messages are consistent with the recorded secret") {
  const BrickworkPattern pattern(2, 2,
                                 {Angle8(3), Angle8(0), Angle8(6), Angle8(5)});
  HonestServer server;
  SplitMix64 rng(0x1ead);
  const UbqcRunResult run = run_ubqc(pattern, server, IdealPreparation{}, rng);
  REQUIRE(!run.aborted);

  using Kind = TranscriptEvent::Kind;
  std::vector<int> reported(pattern.size(), 0);
  std::vector<int> deltas(pattern.size(), -1);
  for (const TranscriptEvent& e : run.transcript.events()) {
    if (e.kind == Kind::Delta) deltas[pattern.index_of(e.pos)] = e.value;
    if (e.kind == Kind::Outcome) reported[pattern.index_of(e.pos)] = e.value;
  }
  std::vector<int> decoded(pattern.size(), 0);
  for (int k = 0; k < pattern.size(); ++k) {
    const Position pos = pattern.position_at(k);
    int s_x = 0, s_z = 0;
    for (const Position& p : pattern.x_deps(pos))
      s_x ^= decoded[pattern.index_of(p)];
    for (const Position& p : pattern.z_deps(pos))
      s_z ^= decoded[pattern.index_of(p)];
    const Angle8 expected =
        blind_angle(adapted_angle(pattern.phi(pos), s_x, s_z),
                    run.secret.theta[k], run.secret.r[k]);
    CHECK(deltas[k] == expected.index());
    decoded[k] = decode_outcome(reported[k], run.secret.r[k]);
    CHECK(run.result.outcomes[k] == decoded[k]);
  }
}

TEST_CASE("transcripts survive the JSONL round trip") {
  const BrickworkPattern pattern(2, 1, {Angle8(5), Angle8(1)});
  HonestServer server;
  SplitMix64 rng(0xfaded);
  const UbqcRunResult run = run_ubqc(pattern, server, IdealPreparation{}, rng);
  std::stringstream buffer;
  run.transcript.write_jsonl(buffer);
  const Transcript parsed = Transcript::read_jsonl(buffer);
  CHECK(parsed == run.transcript);
}

TEST_CASE("blind output distribution equals the plain machine exactly") {
  SplitMix64 rng(0x417);
  for (int sample = 0; sample < 3; ++sample) {
    std::vector<Angle8> phi{Angle8(rng.next_angle_index()),
                            Angle8(rng.next_angle_index())};
    const BrickworkPattern pattern(2, 1, phi);
    const std::vector<double> blind = exact_blind_distribution(pattern);
    const std::vector<double> plain = exact_output_distribution(pattern);
    REQUIRE(blind.size() == plain.size());
    for (std::size_t i = 0; i < blind.size(); ++i)
      CHECK(blind[i] == doctest::Approx(plain[i]).epsilon(1e-9));
  }
}

TEST_CASE("blind output distribution equals the plain machine exactly at 2x2") {
  const BrickworkPattern pattern(2, 2,
                                 {Angle8(5), Angle8(2), Angle8(7), Angle8(1)});
  const std::vector<double> blind = exact_blind_distribution(pattern);
  const std::vector<double> plain = exact_output_distribution(pattern);
  REQUIRE(blind.size() == plain.size());
  for (std::size_t i = 0; i < blind.size(); ++i)
    CHECK(blind[i] == doctest::Approx(plain[i]).epsilon(1e-9));
}

TEST_CASE("blind sampling matches the plain machine at 4x2") {
  const BrickworkPattern pattern(
      4, 2, {Angle8(1), Angle8(0), Angle8(3), Angle8(7), Angle8(2), Angle8(5),
             Angle8(6), Angle8(4)});
  const std::vector<double> plain = exact_output_distribution(pattern);

  HonestServer server;
  std::vector<double> blind(plain.size(), 0.0);
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng = derive_stream(0x8a8a, t);
    const UbqcRunResult run =
        run_ubqc(pattern, server, IdealPreparation{}, rng);
    int index = 0;
    for (int bit : run.result.corrected_outputs) index = (index << 1) | bit;
    blind[index] += 1.0 / trials;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < plain.size(); ++i)
    tv += std::abs(plain[i] - blind[i]);
  CHECK(tv / 2.0 <= 0.02);
}

TEST_CASE("client responses do not depend on the reporting strategy") {
  const BrickworkPattern pattern(2, 1, {Angle8(3), Angle8(6)});
  const auto honest_zero =
      delta_distribution(pattern, [](int, Angle8) { return 0; });
  const auto all_ones =
      delta_distribution(pattern, [](int, Angle8) { return 1; });
  const auto delta_dependent = delta_distribution(
      pattern, [](int k, Angle8 delta) { return (delta.index() + k) & 1; });
  CHECK(honest_zero == all_ones);
  CHECK(honest_zero == delta_dependent);
}

TEST_CASE("misreporting servers still yield well-formed runs") {
  const BrickworkPattern pattern(2, 2, std::vector<Angle8>(4, Angle8(1)));
  FixedReportServer ones(1);
  SplitMix64 rng(0x5eed);
  const UbqcRunResult run = run_ubqc(pattern, ones, IdealPreparation{}, rng);
  REQUIRE(!run.aborted);
  check_transcript_order(run.transcript, pattern);
  for (const TranscriptEvent& e : run.transcript.events())
    if (e.kind == TranscriptEvent::Kind::Outcome) CHECK(e.value == 1);
}

TEST_CASE("rbsp-prepared runs match the plain machine in distribution") {
  const BrickworkPattern pattern(2, 1, {Angle8(1), Angle8(3)});
  const std::vector<double> plain = exact_output_distribution(pattern);
  const Preparation prep =
      RbspPreparation{60, ChannelModel::with_default_mean(0.9)};
  HonestServer server;
  std::vector<double> sampled(plain.size(), 0.0);
  long long completed = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng = derive_stream(0x96, t);
    const UbqcRunResult run = run_ubqc(pattern, server, prep, rng);
    if (run.aborted) continue;
    ++completed;
    int index = 0;
    for (int bit : run.result.corrected_outputs) index = (index << 1) | bit;
    sampled[index] += 1.0;
  }
  REQUIRE(completed > trials / 2);
  double tv = 0.0;
  for (std::size_t i = 0; i < plain.size(); ++i)
    tv += std::abs(plain[i] - sampled[i] / completed);
  CHECK(tv / 2.0 <= 0.05);
}

TEST_CASE("rbsp preparation feeds the protocol and can abort it") {
  const BrickworkPattern pattern(2, 1, {Angle8(2), Angle8(4)});
  HonestServer server;
  const Preparation prep = RbspPreparation{8, ChannelModel::with_default_mean(0.9)};

  bool saw_abort = false, saw_success = false;
  for (std::uint64_t seed = 0; seed < 60 && !(saw_abort && saw_success);
       ++seed) {
    SplitMix64 rng(seed);
    const UbqcRunResult run = run_ubqc(pattern, server, prep, rng);
    if (run.aborted) {
      saw_abort = true;
      CHECK(run.transcript.events().back().kind ==
            TranscriptEvent::Kind::Abort);
    } else {
      saw_success = true;
      check_transcript_order(run.transcript, pattern);
      for (int bit : run.result.corrected_outputs)
        CHECK((bit == 0 || bit == 1));
    }
  }
  CHECK(saw_abort);
  CHECK(saw_success);
}
