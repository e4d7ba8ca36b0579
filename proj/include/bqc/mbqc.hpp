#pragma once

#include <compare>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "bqc/angle.hpp"
#include "bqc/qsim.hpp"
#include "bqc/rng.hpp"

namespace bqc {

/// 1-indexed (column, row) coordinate on the brickwork layout.
struct Position {
  int col = 0;
  int row = 0;
  auto operator<=>(const Position&) const = default;
};

std::ostream& operator<<(std::ostream& os, Position p);

using Edge = std::pair<Position, Position>;

/// Brickwork edge set: horizontal neighbours in every row; vertical pairs
/// (row i, i+1) at columns j and j+2 for each column j = 3 mod 8 with i odd
/// and for each column j = 7 mod 8 with i even, whenever the endpoints fit
/// inside the cols x rows grid. Pairs are normalized (lesser endpoint first)
/// and emitted sorted without duplicates.
std::vector<Edge> edge_rule(int cols, int rows);

/// X/Z dependency sets induced by the row-successor flow f(x,y) = (x+1,y),
/// indexed by column-major measurement order.
struct FlowDependencies {
  std::vector<std::vector<Position>> x_deps;
  std::vector<std::vector<Position>> z_deps;
};

FlowDependencies flow_dependencies(int cols, int rows);

/// phi' = (-1)^{s_x} phi + s_z * pi as index arithmetic.
Angle8 adapted_angle(Angle8 phi, int s_x, int s_z);

/// Measurement pattern on the cols x rows brickwork state: per-qubit
/// computational angles plus the flow-derived dependency structure.
/// Measurement order is column-major (all of column 1 row by row, then
/// column 2, ...).
class BrickworkPattern {
 public:
  BrickworkPattern(int cols, int rows, std::vector<Angle8> phi_column_major);

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  int size() const { return cols_ * rows_; }

  int index_of(Position p) const { return (p.col - 1) * rows_ + (p.row - 1); }
  Position position_at(int order_index) const {
    return {order_index / rows_ + 1, order_index % rows_ + 1};
  }

  Angle8 phi(Position p) const { return phi_[index_of(p)]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Position> x_deps(Position p) const {
    return deps_.x_deps[index_of(p)];
  }
  std::span<const Position> z_deps(Position p) const {
    return deps_.z_deps[index_of(p)];
  }

 private:
  int cols_;
  int rows_;
  std::vector<Angle8> phi_;
  std::vector<Edge> edges_;
  FlowDependencies deps_;
};

/// Reads {"n": cols, "m": rows, "phi": [indices in column-major order]}.
BrickworkPattern load_pattern(const std::string& path);
BrickworkPattern pattern_from_json_text(const std::string& text);

struct MbqcRunResult {
  std::vector<int> outcomes;           // raw s, column-major order
  std::vector<int> corrected_outputs;  // final column, one bit per row
  PureState final_state{0};            // remaining register (empty here)
};

/// Unblinded reference machine: prepare |+_0> everywhere, entangle per
/// edge_rule, measure in order at adapted angles. The adaptation absorbs all
/// flow corrections, so the final-column outcomes are the corrected outputs.
MbqcRunResult run_plain_mbqc(const BrickworkPattern& pattern,
                             const BranchSelect& branch);

/// Conditional distribution of the corrected outputs given one intermediate
/// branch history, with the Born weight of that history.
struct BranchConditional {
  std::vector<int> intermediate;    // outcomes of the first S-m measurements
  double weight;                    // Born probability of the history
  std::vector<double> output_dist;  // joint outputs, index = bits row-major
};

/// Exact enumeration of every measurement branch. Histories of zero weight
/// are dropped.
std::vector<BranchConditional> enumerate_branch_conditionals(
    const BrickworkPattern& pattern);

/// Exact joint distribution of corrected outputs (length 2^rows).
std::vector<double> exact_output_distribution(const BrickworkPattern& pattern);

}  // namespace bqc
