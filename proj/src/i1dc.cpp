#include "bqc/i1dc.hpp"

#include <stdexcept>

namespace bqc {

std::vector<int> t_from_s(std::span<const int> s_bits) {
  const std::size_t k = s_bits.size() + 1;
  std::vector<int> t(k, 0);
  int parity = 0;
  for (std::size_t i = k - 1; i-- > 0;) {
    parity ^= s_bits[i] & 1;
    t[i] = parity;
  }
  return t;
}

Angle8 client_theta(std::span<const Angle8> sigmas,
                    std::span<const int> t_bits) {
  if (sigmas.size() != t_bits.size())
    throw std::invalid_argument("client_theta: length mismatch");
  int sum = 0;
  for (std::size_t l = 0; l < sigmas.size(); ++l)
    sum += (t_bits[l] & 1) ? -sigmas[l].index() : sigmas[l].index();
  return Angle8(sum);
}

I1dcResult run_i1dc(std::span<const Angle8> sigmas,
                    const BranchSelect& branch) {
  if (sigmas.empty()) throw std::invalid_argument("run_i1dc: empty input");

  PureState carry = PureState::plus(sigmas[0]);
  std::vector<int> s_bits;
  s_bits.reserve(sigmas.size() - 1);
  for (std::size_t i = 1; i < sigmas.size(); ++i) {
    PureState pair = tensor(carry, PureState::plus(sigmas[i]));
    pair = apply_h(pair, 0);
    pair = apply_cz(pair, 0, 1);
    MeasurementOutcome outcome = measure_pauli_x(pair, 0, branch());
    s_bits.push_back(outcome.bit);
    carry = std::move(outcome.post_state);
  }
  return {t_from_s(s_bits), std::move(s_bits), std::move(carry)};
}

}  // namespace bqc
