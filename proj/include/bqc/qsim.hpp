#pragma once

#include <span>

#include "bqc/angle.hpp"
#include "bqc/linalg.hpp"

namespace bqc {

/// Dense state vector over a register of qubits. Values are immutable:
/// gates and measurements return new states. Qubit 0 owns the highest-order
/// bit of the basis index, so tensor(a, b) keeps a's qubits first.
///
/// Measured qubits are removed from the register; a zero-qubit state (the
/// scalar 1) is the result of measuring out the last qubit.
class PureState {
 public:
  static constexpr int kMaxQubits = 14;

  /// |0...0> on num_qubits qubits.
  explicit PureState(int num_qubits);
  PureState(int num_qubits, Vector amplitudes);

  static PureState plus(Angle8 theta);
  /// Product state |+_{theta_1}> ⊗ ... ⊗ |+_{theta_k}>.
  static PureState product_plus(std::span<const Angle8> thetas);

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex amplitude(Eigen::Index i) const { return amplitudes_(i); }
  double norm() const { return amplitudes_.norm(); }

  /// Bit of `qubit` within basis index `i`.
  int bit_of(Eigen::Index i, int qubit) const {
    return static_cast<int>((i >> (num_qubits_ - 1 - qubit)) & 1);
  }

 private:
  int num_qubits_;
  Vector amplitudes_;
};

struct MeasurementOutcome {
  int bit;             // 0 = +1 eigenvalue branch
  double probability;  // Born probability of this bit
  PureState post_state;
};

struct ProjectionResult {
  double probability;
  PureState post_state;  // normalized when probability > 0, zeros otherwise
};

PureState apply_h(const PureState& state, int target);
PureState apply_cz(const PureState& state, int a, int b);
PureState tensor(const PureState& a, const PureState& b);

/// Projects qubit `target` onto |+_delta> (bit 0) or |-_delta> (bit 1) and
/// removes it from the register. Deterministic; the enumeration primitive
/// behind measure_rotated.
ProjectionResult project_rotated(const PureState& state, int target,
                                 Angle8 delta, int bit);

/// Samples the {|+_delta>, |-_delta>} measurement of `target`. The branch
/// whose cumulative Born probability first exceeds branch_select is taken,
/// so a zero-probability branch is never selected.
MeasurementOutcome measure_rotated(const PureState& state, int target,
                                   Angle8 delta, double branch_select);

/// Pauli-X basis measurement: measure_rotated with delta = 0.
MeasurementOutcome measure_pauli_x(const PureState& state, int target,
                                   double branch_select);

DensityMatrix pure_to_density(const PureState& state);

/// <a|b>; states must have equal dimension.
Complex inner(const PureState& a, const PureState& b);

}  // namespace bqc
