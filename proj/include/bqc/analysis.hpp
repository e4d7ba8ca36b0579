#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bqc/angle.hpp"
#include "bqc/linalg.hpp"

namespace bqc {

/// CPTP map given by Kraus operators (shared input dimension, shared output
/// dimension, sum K†K = 1). Deviations are always evaluated at a fixed,
/// angle-independent map; the minimization over all maps is replaced by
/// upper bounds at the supplied map.
class CptpMap {
 public:
  explicit CptpMap(std::vector<Matrix> kraus);

  static CptpMap identity(int dim = 2);
  /// 2 -> 18 isometry: embed the qubit into the 9-dim end-state register and
  /// append the success flag |0>.
  static CptpMap append_success_flag();

  Matrix apply(const Matrix& rho) const;
  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

 private:
  std::vector<Matrix> kraus_;
  int input_dim_;
  int output_dim_;
};

/// Worst-case prepared state: (1-p) E^S(|+_theta><+_theta|) ⊗ |0><0|
/// + p |theta><theta| ⊗ |1><1| on the 9-dim register ⊗ flag layout.
Matrix endstate_model(Angle8 theta, double p_fail);
Matrix endstate_model(Angle8 theta, double p_fail, const CptpMap& e_s);

/// Family theta -> rho^theta of prepared states, one per discrete angle.
class PreparationModel {
 public:
  static PreparationModel ideal();
  static PreparationModel rbsp_endstate(double p_fail);
  /// (1-q)|+_theta><+_theta| + q I/2.
  static PreparationModel depolarized(double q);
  static PreparationModel explicit_family(std::vector<Matrix> rho_by_angle);
  /// rho^theta = map(|+_theta><+_theta|): the comparison family for a fixed
  /// deviation.
  static PreparationModel mapped_ideal(const CptpMap& map);

  const Matrix& rho(int theta_index) const;
  int dim() const { return dim_; }
  const std::string& description() const { return description_; }

 private:
  PreparationModel(std::vector<Matrix> family, std::string description);
  std::vector<Matrix> family_;  // indexed by angle 0..7
  int dim_;
  std::string description_;
};

/// max_theta (1/2)||rho^theta - E(|+_theta><+_theta|)||_1.
double epsilon_prep(const PreparationModel& prep, const CptpMap& map);

/// Certified blindness parameter S * eps_prep.
double blindness_bound(int size, double eps_prep);

/// exp(-2 delta^2 N).
double hoeffding_abort_bound(long long pulses, double delta);

/// exp(-N T^4 / 18), defined as the Hoeffding bound at delta = T^2/6 so the
/// identity between the two is structural.
double fail_abort_bound(long long pulses, double transmittance);

/// e^{-mu} (1 + mu - e^{(1-T) mu}); at mu = T this is >= T^2/3 on (0,1].
double delta_budget(double transmittance, double mu);

/// Joint client/server cq-state at computation size S <= 2, stored
/// block-sparsely keyed by the classical registers (phi, r, delta per
/// position). theta is determined per block, so the quantum part is
/// ⊗_i rho^{theta_i}, materialized on demand.
class JointState {
 public:
  struct Block {
    int phi_key;    // base-8 digits, digit i = position i
    int r_key;      // base-2 digits
    int delta_key;  // base-8 digits
    int theta_key;  // base-8 digits, derived
    double weight;
  };

  int size() const { return size_; }
  const PreparationModel& prep() const { return *prep_; }
  std::span<const double> prior() const { return prior_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  Matrix block_matrix(const Block& block) const;

 private:
  friend JointState build_joint_state(int, PreparationModel,
                                      std::vector<double>);
  int size_;
  std::vector<double> prior_;
  std::shared_ptr<const PreparationModel> prep_;
  std::vector<Block> blocks_;
};

/// Exact cq-state with delta_i = phi_i + theta_i + 4 r_i, theta uniform.
/// Empty prior means uniform; otherwise 8^S probabilities over phi
/// assignments. S > 2 is rejected: use blindness_bound on the per-qubit
/// epsilon_prep instead.
JointState build_joint_state(int size, PreparationModel prep,
                             std::vector<double> prior = {});

/// Trace distance between two joint states sharing the block structure
/// (same S and classical keys). Decomposes over blocks.
double joint_trace_distance(const JointState& a, const JointState& b);

/// Server-side marginal conditioned on the phi assignment: dense
/// (dim*8)^S density matrix. Rejected above dimension 4096.
Matrix server_marginal(const JointState& state, int phi_key);

}  // namespace bqc
