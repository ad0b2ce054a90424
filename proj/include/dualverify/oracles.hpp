#pragma once

#include "dualverify/dual_solver.hpp"
#include "dualverify/input_sets.hpp"
#include "dualverify/network.hpp"

#include <cstdint>
#include <functional>

namespace dualverify {

// c^T forward(x).output + d
double objective_value(const Network& net, const OutputConstraint& constraint, const Vector& x);

// Gradient of the objective with respect to the input (reverse mode). ReLU
// derivative at 0 is 0; maxpool routes to the first maximal entry.
Vector objective_gradient(const Network& net, const OutputConstraint& constraint,
                          const Vector& x);

// Upper bound on the Lipschitz constant (2-norm) of the objective.
double objective_lipschitz_bound(const Network& net, const OutputConstraint& constraint);

struct GridResult {
  double value = 0.0;
  Vector argmax;
  // Any feasible point is within `spacing * sqrt(dim)` of a grid point, so the
  // true maximum is at most value + error_bar.
  double error_bar = 0.0;
  double spacing = 0.0;
};

inline constexpr Index kMaxGridDimension = 3;

// Exhaustive maximization over a uniform grid (`resolution` points per axis)
// of the set's bounding box, filtered by set membership. Cardinality sets are
// gridded on each support of size <= k. Dimension above 3 throws.
GridResult grid_oracle(const Network& net, const OutputConstraint& constraint,
                       const InputSet& set, int resolution);

struct AttackConfig {
  int steps = 100;
  int restarts = 5;
  // Relative to the half-width of the set's bounding box.
  double step_size = 0.1;
  std::uint64_t seed = 0;
};

struct AttackResult {
  Vector x_adv;
  double value = 0.0;
  int steps = 0;
};

// Projected gradient ascent. Restart 0 starts from the set anchor, the rest
// from uniform samples. The result is always feasible, so its value is a valid
// lower bound on the worst case.
AttackResult pgd_attack(const Network& net, const OutputConstraint& constraint,
                        const InputSet& set, const AttackConfig& config = {});

// Max of mu * y - lambda * h(y) over n uniform samples including both ends.
double conjugate_grid(const std::function<double(double)>& h, double lambda, double mu,
                      double lower, double upper, int n);

}  // namespace dualverify
