#pragma once

#include "dualverify/bounds.hpp"
#include "dualverify/input_sets.hpp"
#include "dualverify/network.hpp"

#include <vector>

namespace dualverify {

// Linear output constraint c^T x_L + d <= 0.
struct OutputConstraint {
  Vector c;
  double d = 0.0;
};

// Multipliers of the relaxed layer equations. lambda[l] (l = 0..L-2) pairs
// with post[l + 1] = h(pre[l]); mu[l] (l = 0..L-1) with pre[l] = W post[l] + b.
// The last-layer multiplier is fixed to -c and not stored.
struct DualVariables {
  std::vector<Vector> lambda;
  std::vector<Vector> mu;

  static DualVariables zeros(const Network& net);

  bool same_shape(const DualVariables& other) const;
  double max_abs() const;
  // this += scale * other
  void add_scaled(const DualVariables& other, double scale);
  // theta * a + (1 - theta) * b
  static DualVariables mix(const DualVariables& a, const DualVariables& b, double theta);
};

struct DualEvaluation {
  double bound = 0.0;
  DualVariables subgradient;
  // Maximizers of the decoupled problem: pre[l] and post[l] box points.
  std::vector<Vector> witness_pre;
  std::vector<Vector> witness_post;
};

// Dual objective and a subgradient (from the per-term maximizers).
DualEvaluation dual_objective(const Network& net, const OutputConstraint& constraint,
                              const InputSet& set, const ActivationBounds& bounds,
                              const DualVariables& duals);

enum class StepSchedule { InverseSqrt, Constant };

struct DualConfig {
  int iterations = 200;
  double step0 = 0.1;
  StepSchedule schedule = StepSchedule::InverseSqrt;
};

struct DualSolveResult {
  double best_bound = 0.0;
  DualVariables best_duals;
  // history[t] is the best bound after t + 1 evaluations (length iterations + 1).
  std::vector<double> history;
};

// Subgradient descent from zero duals. Every prefix of the run
// yields a valid upper bound.
DualSolveResult minimize_dual(const Network& net, const OutputConstraint& constraint,
                              const InputSet& set, const ActivationBounds& bounds,
                              const DualConfig& config = {});

// Checks the dual objective against its chords at theta in {0.25, 0.5, 0.75}.
bool convexity_probe(const Network& net, const OutputConstraint& constraint,
                     const InputSet& set, const ActivationBounds& bounds,
                     const DualVariables& a, const DualVariables& b, double tol = 1e-7);

}  // namespace dualverify
