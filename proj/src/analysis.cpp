#include "bqc/analysis.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace bqc {

CptpMap::CptpMap(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty())
    throw std::invalid_argument("CptpMap: need at least one Kraus operator");
  output_dim_ = static_cast<int>(kraus_.front().rows());
  input_dim_ = static_cast<int>(kraus_.front().cols());
  Matrix completeness = Matrix::Zero(input_dim_, input_dim_);
  for (const Matrix& k : kraus_) {
    if (k.rows() != output_dim_ || k.cols() != input_dim_)
      throw std::invalid_argument("CptpMap: inconsistent Kraus shapes");
    completeness += k.adjoint() * k;
  }
  if ((completeness - Matrix::Identity(input_dim_, input_dim_))
          .cwiseAbs()
          .maxCoeff() > kDefaultTol)
    throw std::invalid_argument("CptpMap: Kraus operators not trace-preserving");
}

CptpMap CptpMap::identity(int dim) {
  return CptpMap({Matrix::Identity(dim, dim)});
}

CptpMap CptpMap::append_success_flag() {
  Matrix isometry = Matrix::Zero(18, 2);
  // Register index (k, flag) -> 2k + flag; qubit basis |b> -> |b> ⊗ |0>.
  isometry(0, 0) = Complex(1.0, 0.0);
  isometry(2, 1) = Complex(1.0, 0.0);
  return CptpMap({isometry});
}

Matrix CptpMap::apply(const Matrix& rho) const {
  if (rho.rows() != input_dim_ || rho.cols() != input_dim_)
    throw std::invalid_argument("CptpMap: input dimension mismatch");
  Matrix out = Matrix::Zero(output_dim_, output_dim_);
  for (const Matrix& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

Matrix endstate_model(Angle8 theta, double p_fail) {
  return endstate_model(theta, p_fail, CptpMap::identity(2));
}

Matrix endstate_model(Angle8 theta, double p_fail, const CptpMap& e_s) {
  if (!(p_fail >= 0.0 && p_fail <= 1.0))
    throw std::invalid_argument("endstate_model: p_fail outside [0,1]");
  if (e_s.input_dim() != 2 || e_s.output_dim() != 2)
    throw std::invalid_argument("endstate_model: E^S must act on the qubit");
  const Eigen::Vector2cd plus = plus_state(theta);
  Matrix reg = Matrix::Zero(9, 9);
  reg.topLeftCorner<2, 2>() = e_s.apply(plus * plus.adjoint());
  Matrix out = (1.0 - p_fail) * tensor(reg, basis_projector(0, 2));
  out += p_fail *
         tensor(basis_projector(theta.index(), 9), basis_projector(1, 2));
  return out;
}

PreparationModel::PreparationModel(std::vector<Matrix> family,
                                   std::string description)
    : family_(std::move(family)), description_(std::move(description)) {
  if (family_.size() != 8)
    throw std::invalid_argument("PreparationModel: need one state per angle");
  dim_ = static_cast<int>(family_.front().rows());
  for (const Matrix& rho : family_) {
    if (rho.rows() != dim_ || rho.cols() != dim_)
      throw std::invalid_argument("PreparationModel: inconsistent dimensions");
    if (!is_hermitian(rho))
      throw std::invalid_argument("PreparationModel: state not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > kHermitianTol ||
        std::abs(rho.trace().imag()) > kHermitianTol)
      throw std::invalid_argument("PreparationModel: state not trace one");
    if (hermitian_eigenvalues(rho).minCoeff() < -1e-10)
      throw std::invalid_argument("PreparationModel: state not positive");
  }
}

PreparationModel PreparationModel::ideal() {
  std::vector<Matrix> family;
  for (int k = 0; k < 8; ++k) {
    const Eigen::Vector2cd plus = plus_state(Angle8(k));
    family.push_back(plus * plus.adjoint());
  }
  return {std::move(family), "ideal"};
}

PreparationModel PreparationModel::rbsp_endstate(double p_fail) {
  std::vector<Matrix> family;
  for (int k = 0; k < 8; ++k)
    family.push_back(endstate_model(Angle8(k), p_fail));
  return {std::move(family), "rbsp(p_fail=" + std::to_string(p_fail) + ")"};
}

PreparationModel PreparationModel::depolarized(double q) {
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("depolarized: q outside [0,1]");
  std::vector<Matrix> family;
  for (int k = 0; k < 8; ++k) {
    const Eigen::Vector2cd plus = plus_state(Angle8(k));
    family.push_back((1.0 - q) * (plus * plus.adjoint()).eval() +
                     q * 0.5 * Matrix::Identity(2, 2));
  }
  return {std::move(family), "depolarized(q=" + std::to_string(q) + ")"};
}

PreparationModel PreparationModel::explicit_family(
    std::vector<Matrix> rho_by_angle) {
  return {std::move(rho_by_angle), "explicit"};
}

PreparationModel PreparationModel::mapped_ideal(const CptpMap& map) {
  if (map.input_dim() != 2)
    throw std::invalid_argument("mapped_ideal: map must accept a qubit");
  std::vector<Matrix> family;
  for (int k = 0; k < 8; ++k) {
    const Eigen::Vector2cd plus = plus_state(Angle8(k));
    family.push_back(map.apply(plus * plus.adjoint()));
  }
  return {std::move(family), "mapped-ideal"};
}

const Matrix& PreparationModel::rho(int theta_index) const {
  return family_.at(static_cast<std::size_t>(((theta_index % 8) + 8) % 8));
}

double epsilon_prep(const PreparationModel& prep, const CptpMap& map) {
  if (map.output_dim() != prep.dim())
    throw std::invalid_argument(
        "epsilon_prep: map output dimension does not match the preparation");
  double worst = 0.0;
  for (int k = 0; k < 8; ++k) {
    const Eigen::Vector2cd plus = plus_state(Angle8(k));
    worst = std::max(
        worst, trace_distance(prep.rho(k), map.apply(plus * plus.adjoint())));
  }
  return worst;
}

double blindness_bound(int size, double eps_prep) {
  if (size < 1) throw std::invalid_argument("blindness_bound: size must be >= 1");
  return size * eps_prep;
}

double hoeffding_abort_bound(long long pulses, double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("hoeffding_abort_bound: delta must be > 0");
  return std::exp(-2.0 * delta * delta * static_cast<double>(pulses));
}

double fail_abort_bound(long long pulses, double transmittance) {
  if (!(transmittance > 0.0 && transmittance <= 1.0))
    throw std::invalid_argument(
        "fail_abort_bound: transmittance outside (0,1]");
  return hoeffding_abort_bound(pulses,
                               transmittance * transmittance / 6.0);
}

double delta_budget(double transmittance, double mu) {
  if (!(transmittance > 0.0 && transmittance <= 1.0))
    throw std::invalid_argument("delta_budget: transmittance outside (0,1]");
  if (!(mu > 0.0)) throw std::invalid_argument("delta_budget: mu must be > 0");
  return std::exp(-mu) *
         (1.0 + mu - std::exp((1.0 - transmittance) * mu));
}

namespace {

int key_digit(int key, int position, int base) {
  for (int i = 0; i < position; ++i) key /= base;
  return key % base;
}

int pow_int(int base, int exp) {
  int out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

Matrix JointState::block_matrix(const Block& block) const {
  Matrix out = prep_->rho(key_digit(block.theta_key, 0, 8));
  for (int i = 1; i < size_; ++i)
    out = tensor(out, prep_->rho(key_digit(block.theta_key, i, 8)));
  return out;
}

JointState build_joint_state(int size, PreparationModel prep,
                             std::vector<double> prior) {
  if (size < 1 || size > 2)
    throw std::invalid_argument(
        "build_joint_state: supported for S <= 2 only; use blindness_bound "
        "with the per-qubit epsilon_prep for larger computations");
  const int phi_space = pow_int(8, size);
  const int r_space = pow_int(2, size);
  if (prior.empty())
    prior.assign(phi_space, 1.0 / phi_space);
  if (static_cast<int>(prior.size()) != phi_space)
    throw std::invalid_argument("build_joint_state: prior has wrong length");
  double total = 0.0;
  for (double p : prior) {
    if (p < 0.0)
      throw std::invalid_argument("build_joint_state: negative prior entry");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("build_joint_state: prior must sum to one");

  JointState state;
  state.size_ = size;
  state.prior_ = std::move(prior);
  state.prep_ =
      std::make_shared<const PreparationModel>(std::move(prep));
  state.blocks_.reserve(static_cast<std::size_t>(phi_space) * r_space *
                        phi_space);
  const double theta_weight = 1.0 / (r_space * phi_space);
  for (int phi_key = 0; phi_key < phi_space; ++phi_key)
    for (int r_key = 0; r_key < r_space; ++r_key)
      for (int delta_key = 0; delta_key < phi_space; ++delta_key) {
        int theta_key = 0;
        for (int i = size - 1; i >= 0; --i) {
          const int theta = (key_digit(delta_key, i, 8) -
                             key_digit(phi_key, i, 8) -
                             4 * key_digit(r_key, i, 2)) %
                            8;
          theta_key = theta_key * 8 + ((theta + 8) % 8);
        }
        state.blocks_.push_back({phi_key, r_key, delta_key, theta_key,
                                 state.prior_[phi_key] * theta_weight});
      }
  return state;
}

double joint_trace_distance(const JointState& a, const JointState& b) {
  if (a.size() != b.size() || a.blocks().size() != b.blocks().size())
    throw std::invalid_argument(
        "joint_trace_distance: incompatible block structure");
  std::map<std::tuple<int, double, double>, double> memo;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.blocks().size(); ++i) {
    const auto& block_a = a.blocks()[i];
    const auto& block_b = b.blocks()[i];
    if (block_a.phi_key != block_b.phi_key ||
        block_a.r_key != block_b.r_key ||
        block_a.delta_key != block_b.delta_key)
      throw std::invalid_argument(
          "joint_trace_distance: classical keys do not line up");
    if (block_a.weight == 0.0 && block_b.weight == 0.0) continue;
    const auto key = std::make_tuple(block_a.theta_key, block_a.weight,
                                     block_b.weight);
    auto found = memo.find(key);
    if (found == memo.end()) {
      const Matrix diff = block_a.weight * a.block_matrix(block_a) -
                          block_b.weight * b.block_matrix(block_b);
      const double norm1 = hermitian_eigenvalues(diff).cwiseAbs().sum();
      found = memo.emplace(key, norm1).first;
    }
    sum += found->second;
  }
  return 0.5 * sum;
}

Matrix server_marginal(const JointState& state, int phi_key) {
  const int phi_space = pow_int(8, state.size());
  if (phi_key < 0 || phi_key >= phi_space)
    throw std::invalid_argument("server_marginal: phi key out of range");
  const double prior = state.prior()[phi_key];
  if (prior <= 0.0)
    throw std::invalid_argument(
        "server_marginal: conditioning on zero-probability phi");
  const int factor_dim = state.prep().dim() * 8;
  long long dim = 1;
  for (int i = 0; i < state.size(); ++i) dim *= factor_dim;
  if (dim > 4096)
    throw std::invalid_argument("server_marginal: marginal too large");

  Matrix marginal = Matrix::Zero(dim, dim);
  for (const auto& block : state.blocks()) {
    if (block.phi_key != phi_key) continue;
    Matrix factor =
        tensor(state.prep().rho(key_digit(block.theta_key, 0, 8)),
               basis_projector(key_digit(block.delta_key, 0, 8), 8));
    for (int i = 1; i < state.size(); ++i)
      factor = tensor(
          factor, tensor(state.prep().rho(key_digit(block.theta_key, i, 8)),
                         basis_projector(key_digit(block.delta_key, i, 8), 8)));
    marginal += (block.weight / prior) * factor;
  }
  return marginal;
}

}  // namespace bqc
