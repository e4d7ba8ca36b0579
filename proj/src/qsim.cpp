#include "bqc/qsim.hpp"

#include <cmath>
#include <stdexcept>

namespace bqc {

namespace {

void check_target(const PureState& state, int target, const char* op) {
  if (target < 0 || target >= state.num_qubits())
    throw std::out_of_range(std::string(op) + ": qubit index out of range");
}

}  // namespace

PureState::PureState(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 0 || num_qubits > kMaxQubits)
    throw std::invalid_argument("PureState: qubit count outside [0, 14]");
  amplitudes_ = Vector::Zero(Eigen::Index(1) << num_qubits);
  amplitudes_(0) = Complex(1.0, 0.0);
}

PureState::PureState(int num_qubits, Vector amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
  if (num_qubits < 0 || num_qubits > kMaxQubits)
    throw std::invalid_argument("PureState: qubit count outside [0, 14]");
  if (amplitudes_.size() != (Eigen::Index(1) << num_qubits))
    throw std::invalid_argument("PureState: amplitude vector has wrong size");
}

PureState PureState::plus(Angle8 theta) {
  return PureState(1, plus_state(theta));
}

PureState PureState::product_plus(std::span<const Angle8> thetas) {
  if (thetas.empty()) return PureState(0);
  PureState state = plus(thetas[0]);
  for (std::size_t i = 1; i < thetas.size(); ++i)
    state = tensor(state, plus(thetas[i]));
  return state;
}

PureState apply_h(const PureState& state, int target) {
  check_target(state, target, "apply_h");
  const double inv_sqrt2 = 0.70710678118654752440;
  const Eigen::Index stride = Eigen::Index(1)
                              << (state.num_qubits() - 1 - target);
  Vector out(state.dim());
  const Vector& a = state.amplitudes();
  for (Eigen::Index i = 0; i < state.dim(); ++i) {
    if (i & stride) continue;
    const Complex lo = a(i), hi = a(i | stride);
    out(i) = inv_sqrt2 * (lo + hi);
    out(i | stride) = inv_sqrt2 * (lo - hi);
  }
  return PureState(state.num_qubits(), std::move(out));
}

PureState apply_cz(const PureState& state, int a, int b) {
  check_target(state, a, "apply_cz");
  check_target(state, b, "apply_cz");
  if (a == b) throw std::invalid_argument("apply_cz: identical qubits");
  const Eigen::Index mask_a = Eigen::Index(1)
                              << (state.num_qubits() - 1 - a);
  const Eigen::Index mask_b = Eigen::Index(1)
                              << (state.num_qubits() - 1 - b);
  Vector out = state.amplitudes();
  for (Eigen::Index i = 0; i < state.dim(); ++i)
    if ((i & mask_a) && (i & mask_b)) out(i) = -out(i);
  return PureState(state.num_qubits(), std::move(out));
}

PureState tensor(const PureState& a, const PureState& b) {
  const int n = a.num_qubits() + b.num_qubits();
  if (n > PureState::kMaxQubits)
    throw std::invalid_argument("tensor: combined register exceeds 14 qubits");
  Vector out(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    out.segment(i * b.dim(), b.dim()) = a.amplitude(i) * b.amplitudes();
  return PureState(n, std::move(out));
}

ProjectionResult project_rotated(const PureState& state, int target,
                                 Angle8 delta, int bit) {
  check_target(state, target, "project_rotated");
  const double inv_sqrt2 = 0.70710678118654752440;
  // <+_d| = (<0| + e^{-id}<1|)/sqrt2, <-_d| = (<0| - e^{-id}<1|)/sqrt2
  const Complex w = std::conj(delta.phase()) * (bit == 0 ? 1.0 : -1.0);
  const int shift = state.num_qubits() - 1 - target;
  const Eigen::Index stride = Eigen::Index(1) << shift;
  const Eigen::Index low_mask = stride - 1;

  Vector out(state.dim() / 2);
  const Vector& a = state.amplitudes();
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const Eigen::Index i0 = ((j & ~low_mask) << 1) | (j & low_mask);
    out(j) = inv_sqrt2 * (a(i0) + w * a(i0 | stride));
  }
  const double probability = out.squaredNorm();
  if (probability > 0.0) out /= std::sqrt(probability);
  return {probability, PureState(state.num_qubits() - 1, std::move(out))};
}

MeasurementOutcome measure_rotated(const PureState& state, int target,
                                   Angle8 delta, double branch_select) {
  ProjectionResult zero = project_rotated(state, target, delta, 0);
  // Amplitude rounding noise squares into probabilities ~1e-32; snap it so
  // a measure-zero branch can never be selected.
  constexpr double kProbabilityFloor = 1e-24;
  double p0 = zero.probability;
  if (p0 < kProbabilityFloor) p0 = 0.0;
  if (p0 > 1.0 - kProbabilityFloor) p0 = 1.0;
  if (p0 > branch_select)
    return {0, zero.probability, std::move(zero.post_state)};
  ProjectionResult one = project_rotated(state, target, delta, 1);
  return {1, one.probability, std::move(one.post_state)};
}

MeasurementOutcome measure_pauli_x(const PureState& state, int target,
                                   double branch_select) {
  return measure_rotated(state, target, Angle8(0), branch_select);
}

DensityMatrix pure_to_density(const PureState& state) {
  return state.amplitudes() * state.amplitudes().adjoint();
}

Complex inner(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("inner: dimension mismatch");
  return a.amplitudes().dot(b.amplitudes());
}

}  // namespace bqc
