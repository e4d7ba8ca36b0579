#include "bqc/mbqc.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace bqc {

std::ostream& operator<<(std::ostream& os, Position p) {
  return os << '(' << p.col << ',' << p.row << ')';
}

std::vector<Edge> edge_rule(int cols, int rows) {
  if (cols < 1 || rows < 1)
    throw std::invalid_argument("edge_rule: grid dimensions must be >= 1");
  std::set<Edge> edges;
  auto add = [&](Position a, Position b) {
    if (b < a) std::swap(a, b);
    edges.insert({a, b});
  };

  for (int y = 1; y <= rows; ++y)
    for (int x = 1; x < cols; ++x) add({x, y}, {x + 1, y});

  auto vertical_pair = [&](int col, int row) {
    if (col <= cols && row + 1 <= rows) add({col, row}, {col, row + 1});
  };
  for (int j = 1; j <= cols; ++j) {
    if (j % 8 == 3) {
      for (int i = 1; i < rows; i += 2) {
        vertical_pair(j, i);
        vertical_pair(j + 2, i);
      }
    }
    if (j % 8 == 7) {
      for (int i = 2; i < rows; i += 2) {
        vertical_pair(j, i);
        vertical_pair(j + 2, i);
      }
    }
  }
  return {edges.begin(), edges.end()};
}

FlowDependencies flow_dependencies(int cols, int rows) {
  const int size = cols * rows;
  FlowDependencies deps;
  deps.x_deps.resize(size);
  deps.z_deps.resize(size);

  auto order_index = [rows](Position p) {
    return (p.col - 1) * rows + (p.row - 1);
  };

  std::map<Position, std::vector<Position>> adjacency;
  for (const Edge& e : edge_rule(cols, rows)) {
    adjacency[e.first].push_back(e.second);
    adjacency[e.second].push_back(e.first);
  }

  for (int x = 1; x <= cols; ++x)
    for (int y = 1; y <= rows; ++y) {
      const Position p{x, y};
      if (x > 1) deps.x_deps[order_index(p)].push_back({x - 1, y});
      if (x < cols) {
        const Position successor{x + 1, y};  // f(p)
        for (const Position& q : adjacency[successor])
          if (q != p && order_index(p) < order_index(q))
            deps.z_deps[order_index(q)].push_back(p);
      }
    }

  for (auto& v : deps.z_deps) std::sort(v.begin(), v.end());
  return deps;
}

Angle8 adapted_angle(Angle8 phi, int s_x, int s_z) {
  const int sign = (s_x & 1) ? -1 : 1;
  return Angle8(sign * phi.index() + 4 * (s_z & 1));
}

BrickworkPattern::BrickworkPattern(int cols, int rows,
                                   std::vector<Angle8> phi_column_major)
    : cols_(cols), rows_(rows), phi_(std::move(phi_column_major)) {
  if (cols < 1 || rows < 1)
    throw std::invalid_argument("BrickworkPattern: dimensions must be >= 1");
  if (static_cast<int>(phi_.size()) != cols * rows)
    throw std::invalid_argument(
        "BrickworkPattern: need one angle per position");
  edges_ = edge_rule(cols, rows);
  deps_ = flow_dependencies(cols, rows);
}

BrickworkPattern pattern_from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int cols = j.at("n").get<int>();
  const int rows = j.at("m").get<int>();
  std::vector<Angle8> phi;
  for (const auto& k : j.at("phi")) phi.emplace_back(k.get<int>());
  return {cols, rows, std::move(phi)};
}

BrickworkPattern load_pattern(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_pattern: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return pattern_from_json_text(buffer.str());
}

namespace {

PureState entangled_resource(const BrickworkPattern& pattern) {
  const std::vector<Angle8> zeros(pattern.size(), Angle8(0));
  PureState state = PureState::product_plus(zeros);
  for (const Edge& e : pattern.edges())
    state = apply_cz(state, pattern.index_of(e.first),
                     pattern.index_of(e.second));
  return state;
}

int parity_over(const MbqcRunResult& partial, const BrickworkPattern& pattern,
                std::span<const Position> deps) {
  int parity = 0;
  for (const Position& p : deps) parity ^= partial.outcomes[pattern.index_of(p)];
  return parity;
}

}  // namespace

MbqcRunResult run_plain_mbqc(const BrickworkPattern& pattern,
                             const BranchSelect& branch) {
  PureState state = entangled_resource(pattern);
  MbqcRunResult result{std::vector<int>(pattern.size(), 0), {}, PureState(0)};

  for (int k = 0; k < pattern.size(); ++k) {
    const Position pos = pattern.position_at(k);
    const int s_x = parity_over(result, pattern, pattern.x_deps(pos));
    const int s_z = parity_over(result, pattern, pattern.z_deps(pos));
    const Angle8 angle = adapted_angle(pattern.phi(pos), s_x, s_z);
    // Measurement order matches qubit order, so the next target is always
    // simulator qubit 0 of the shrinking register.
    MeasurementOutcome outcome = measure_rotated(state, 0, angle, branch());
    result.outcomes[k] = outcome.bit;
    state = std::move(outcome.post_state);
  }

  result.corrected_outputs.resize(pattern.rows());
  for (int y = 1; y <= pattern.rows(); ++y)
    result.corrected_outputs[y - 1] =
        result.outcomes[pattern.index_of({pattern.cols(), y})];
  result.final_state = std::move(state);
  return result;
}

namespace {

constexpr double kPruneWeight = 1e-15;

void enumerate_recursive(const BrickworkPattern& pattern,
                         const PureState& state, int next, double weight,
                         MbqcRunResult& scratch,
                         std::vector<BranchConditional>& out) {
  const int size = pattern.size();
  const int boundary = size - pattern.rows();
  if (next == size) {
    std::vector<int> intermediate(scratch.outcomes.begin(),
                                  scratch.outcomes.begin() + boundary);
    int output_index = 0;
    for (int y = 1; y <= pattern.rows(); ++y)
      output_index = (output_index << 1) |
                     scratch.outcomes[pattern.index_of({pattern.cols(), y})];
    // Group leaves under their intermediate history.
    if (out.empty() || out.back().intermediate != intermediate) {
      out.push_back({std::move(intermediate), 0.0,
                     std::vector<double>(std::size_t(1) << pattern.rows(),
                                         0.0)});
    }
    out.back().weight += weight;
    out.back().output_dist[output_index] += weight;
    return;
  }

  const Position pos = pattern.position_at(next);
  const int s_x = parity_over(scratch, pattern, pattern.x_deps(pos));
  const int s_z = parity_over(scratch, pattern, pattern.z_deps(pos));
  const Angle8 angle = adapted_angle(pattern.phi(pos), s_x, s_z);
  for (int bit = 0; bit < 2; ++bit) {
    ProjectionResult projection = project_rotated(state, 0, angle, bit);
    const double branch_weight = weight * projection.probability;
    if (branch_weight <= kPruneWeight) continue;
    scratch.outcomes[next] = bit;
    enumerate_recursive(pattern, projection.post_state, next + 1,
                        branch_weight, scratch, out);
  }
  scratch.outcomes[next] = 0;
}

}  // namespace

std::vector<BranchConditional> enumerate_branch_conditionals(
    const BrickworkPattern& pattern) {
  std::vector<BranchConditional> out;
  MbqcRunResult scratch{std::vector<int>(pattern.size(), 0), {}, PureState(0)};
  enumerate_recursive(pattern, entangled_resource(pattern), 0, 1.0, scratch,
                      out);
  for (BranchConditional& bc : out)
    for (double& p : bc.output_dist) p /= bc.weight;
  return out;
}

std::vector<double> exact_output_distribution(
    const BrickworkPattern& pattern) {
  std::vector<double> dist(std::size_t(1) << pattern.rows(), 0.0);
  for (const BranchConditional& bc : enumerate_branch_conditionals(pattern))
    for (std::size_t i = 0; i < dist.size(); ++i)
      dist[i] += bc.weight * bc.output_dist[i];
  return dist;
}

}  // namespace bqc
