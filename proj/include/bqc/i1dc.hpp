#pragma once

#include <span>
#include <vector>

#include "bqc/angle.hpp"
#include "bqc/qsim.hpp"
#include "bqc/rng.hpp"

namespace bqc {

struct I1dcResult {
  std::vector<int> t_bits;  // length k, last entry always 0
  std::vector<int> s_bits;  // raw outcomes, length k-1
  PureState final_state;    // single unmeasured qubit
};

/// Suffix parities t_i = s_i ^ ... ^ s_{k-1} for i < k, t_k = 0,
/// where k = s_bits.size() + 1.
std::vector<int> t_from_s(std::span<const int> s_bits);

/// theta = sum_l (-1)^{t_l} sigma_l mod 8.
Angle8 client_theta(std::span<const Angle8> sigmas,
                    std::span<const int> t_bits);

/// Interlaced 1-D cluster computation: couple qubits i and i+1 with
/// ctrl-Z(H⊗1), measure qubit i in the Pauli-X basis, repeat. The remaining
/// qubit ends in |+_theta> with theta = client_theta(sigmas, t_from_s(s)).
I1dcResult run_i1dc(std::span<const Angle8> sigmas,
                    const BranchSelect& branch);

}  // namespace bqc
