#pragma once

#include "dualverify/dual_solver.hpp"
#include "dualverify/input_sets.hpp"
#include "dualverify/network.hpp"
#include "dualverify/oracles.hpp"

#include <set>
#include <string>
#include <vector>

namespace dualverify {

struct VerificationSpec {
  InputSet input_set;
  std::vector<OutputConstraint> constraints;

  // Throws unless the spec fits `net` and has at least one constraint.
  void validate(const Network& net) const;
};

enum class Status { Verified, Falsified, Unknown };

std::string to_string(Status status);

// Verified iff upper < 0 (strict); Falsified iff lower > 0; otherwise Unknown.
Status status_from_bounds(double upper_bound, double lower_bound);

struct ConstraintVerdict {
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  Status status = Status::Unknown;
  int iterations_used = 0;
};

struct VerdictReport {
  std::vector<ConstraintVerdict> constraints;

  bool all_verified() const;
  bool any_falsified() const;
};

struct VerifyConfig {
  DualConfig dual;
  // Per-neuron dual iterations for bound tightening; 0 disables it.
  int tighten_iterations = 0;
  AttackConfig attack;
  unsigned workers = 1;
};

// c_j = 1, c_i = -1 (zero when i == j), d = 0, over an l_p ball.
VerificationSpec spec_targeted_attack(const Vector& x_nom, double eps, Norm p, Index true_label,
                                      Index target_label, Index num_outputs);

// Box(x_nom, x_nom + delta) with violation output(x_nom) - output(x).
VerificationSpec spec_monotone(const Vector& x_nom, const Vector& delta, const Network& net);

// Targeted-attack constraint over an l_0 / l_inf cardinality set.
VerificationSpec spec_cardinality(const Vector& x_nom, double eps, Index k, Index true_label,
                                  Index target_label, Index num_outputs);

// Bounds -> optional tightening -> per-constraint dual solve and attack.
VerdictReport verify(const Network& net, const VerificationSpec& spec,
                     const VerifyConfig& config = {});

struct LabeledExample {
  Vector x;
  Index label = 0;
};

struct ErrorRates {
  double clean_error = 0.0;
  double certified_upper = 0.0;
  double attack_lower = 0.0;
  std::size_t count = 0;
  // Set when the dataset is empty (all rates reported as 0).
  bool empty_dataset = false;
};

Index predicted_label(const Network& net, const Vector& x);

// Upper: examples with some target constraint not verified. Lower: examples
// with some target constraint falsified.
ErrorRates certified_error_rate(const Network& net, const std::vector<LabeledExample>& dataset,
                                double eps, Norm p, const VerifyConfig& config = {});

// Longest-switching label sequence through the per-step reachable sets.
int max_label_switches(const std::vector<std::set<Index>>& reachable);

struct ReachableLabels {
  Index predicted = 0;
  std::set<Index> upper;  // predicted label plus every target not verified
  std::set<Index> lower;  // predicted label plus every target falsified
};

ReachableLabels reachable_labels(const Network& net, const Vector& x, double eps, Norm p,
                                 const VerifyConfig& config = {});

struct SwitchBounds {
  int upper = 0;
  int lower = 0;
};

SwitchBounds switch_bounds(const Network& net, const std::vector<Vector>& sequence, double eps,
                           Norm p, const VerifyConfig& config = {});

}  // namespace dualverify
