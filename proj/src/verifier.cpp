#include "dualverify/verifier.hpp"

#include "dualverify/bounds.hpp"
#include "dualverify/errors.hpp"
#include "dualverify/parallel.hpp"

#include <map>
#include <stdexcept>

namespace dualverify {

void VerificationSpec::validate(const Network& net) const {
  if (constraints.empty()) {
    throw PreconditionError("verification spec needs at least one constraint");
  }
  if (input_set.dimension() != net.input_width()) {
    throw ShapeError("input set has dimension " + std::to_string(input_set.dimension()) +
                     ", network expects " + std::to_string(net.input_width()));
  }
  for (const auto& constraint : constraints) {
    if (constraint.c.size() != net.output_width()) {
      throw ShapeError("constraint has length " + std::to_string(constraint.c.size()) +
                       ", network output has width " + std::to_string(net.output_width()));
    }
    if (!constraint.c.allFinite() || !std::isfinite(constraint.d)) {
      throw PreconditionError("constraint coefficients must be finite");
    }
  }
}

std::string to_string(Status status) {
  switch (status) {
    case Status::Verified: return "verified";
    case Status::Falsified: return "falsified";
    case Status::Unknown: return "unknown";
  }
  return "unknown";
}

Status status_from_bounds(double upper_bound, double lower_bound) {
  if (upper_bound < 0.0) return Status::Verified;
  if (lower_bound > 0.0) return Status::Falsified;
  return Status::Unknown;
}

bool VerdictReport::all_verified() const {
  for (const auto& v : constraints) {
    if (v.status != Status::Verified) return false;
  }
  return true;
}

bool VerdictReport::any_falsified() const {
  for (const auto& v : constraints) {
    if (v.status == Status::Falsified) return true;
  }
  return false;
}

namespace {

OutputConstraint targeted_constraint(Index true_label, Index target_label, Index num_outputs) {
  if (true_label < 0 || true_label >= num_outputs || target_label < 0 ||
      target_label >= num_outputs) {
    throw PreconditionError("labels must lie in [0, number of outputs)");
  }
  OutputConstraint constraint{Vector::Zero(num_outputs), 0.0};
  if (true_label != target_label) {
    constraint.c(target_label) = 1.0;
    constraint.c(true_label) = -1.0;
  }
  return constraint;
}

}  // namespace

VerificationSpec spec_targeted_attack(const Vector& x_nom, double eps, Norm p, Index true_label,
                                      Index target_label, Index num_outputs) {
  return {InputSet(NormBall{p, x_nom, eps}),
          {targeted_constraint(true_label, target_label, num_outputs)}};
}

VerificationSpec spec_monotone(const Vector& x_nom, const Vector& delta, const Network& net) {
  if (net.output_width() != 1) {
    throw ShapeError("monotonicity specs need a scalar-output network");
  }
  if (delta.size() != x_nom.size()) {
    throw ShapeError("delta and x_nom differ in length");
  }
  if ((delta.array() < 0.0).any()) {
    throw PreconditionError("delta must be non-negative");
  }
  const double nominal = forward(net, x_nom).output()(0);
  return {InputSet(Box{x_nom, x_nom + delta}), {OutputConstraint{-Vector::Ones(1), nominal}}};
}

VerificationSpec spec_cardinality(const Vector& x_nom, double eps, Index k, Index true_label,
                                  Index target_label, Index num_outputs) {
  return {InputSet(CardinalityBall{x_nom, eps, k}),
          {targeted_constraint(true_label, target_label, num_outputs)}};
}

VerdictReport verify(const Network& net, const VerificationSpec& spec,
                     const VerifyConfig& config) {
  spec.validate(net);
  const Box box = bounding_box(spec.input_set);
  ActivationBounds bounds = interval_propagate(net, box.lower, box.upper);
  if (config.tighten_iterations > 0) {
    bounds = tighten_bounds(net, spec.input_set, bounds, config.tighten_iterations,
                            config.workers);
  }

  VerdictReport report;
  report.constraints.resize(spec.constraints.size());
  parallel_for(spec.constraints.size(), config.workers, [&](std::size_t i) {
    const OutputConstraint& constraint = spec.constraints[i];
    const auto dual = minimize_dual(net, constraint, spec.input_set, bounds, config.dual);
    const auto attack = pgd_attack(net, constraint, spec.input_set, config.attack);
    ConstraintVerdict& verdict = report.constraints[i];
    verdict.upper_bound = dual.best_bound;
    verdict.lower_bound = attack.value;
    verdict.iterations_used = config.dual.iterations;
    if (verdict.lower_bound > verdict.upper_bound + 1e-6) {
      throw std::logic_error("attack value exceeds the certified bound");
    }
    verdict.status = status_from_bounds(verdict.upper_bound, verdict.lower_bound);
  });
  return report;
}

Index predicted_label(const Network& net, const Vector& x) {
  Index label = 0;
  forward(net, x).output().maxCoeff(&label);
  return label;
}

namespace {

VerificationSpec all_targets(const Vector& x, double eps, Norm p, Index label, Index outputs) {
  VerificationSpec spec{InputSet(NormBall{p, x, eps}), {}};
  for (Index j = 0; j < outputs; ++j) {
    if (j != label) spec.constraints.push_back(targeted_constraint(label, j, outputs));
  }
  return spec;
}

}  // namespace

ErrorRates certified_error_rate(const Network& net, const std::vector<LabeledExample>& dataset,
                                double eps, Norm p, const VerifyConfig& config) {
  ErrorRates rates;
  rates.count = dataset.size();
  if (dataset.empty()) {
    rates.empty_dataset = true;
    return rates;
  }
  const Index outputs = net.output_width();
  if (outputs < 2) {
    throw ShapeError("error rates need at least two output classes");
  }
  struct Flags {
    bool clean = false, upper = false, lower = false;
  };
  std::vector<Flags> flags(dataset.size());
  VerifyConfig inner = config;
  inner.workers = 1;
  parallel_for(dataset.size(), config.workers, [&](std::size_t i) {
    const LabeledExample& ex = dataset[i];
    if (ex.label < 0 || ex.label >= outputs) {
      throw PreconditionError("example label out of range");
    }
    flags[i].clean = predicted_label(net, ex.x) != ex.label;
    const VerdictReport report = verify(net, all_targets(ex.x, eps, p, ex.label, outputs), inner);
    flags[i].upper = !report.all_verified();
    flags[i].lower = report.any_falsified();
  });
  std::size_t clean = 0, upper = 0, lower = 0;
  for (const Flags& f : flags) {
    clean += f.clean;
    upper += f.upper;
    lower += f.lower;
  }
  const double n = static_cast<double>(dataset.size());
  rates.clean_error = static_cast<double>(clean) / n;
  rates.certified_upper = static_cast<double>(upper) / n;
  rates.attack_lower = static_cast<double>(lower) / n;
  return rates;
}

int max_label_switches(const std::vector<std::set<Index>>& reachable) {
  for (const auto& labels : reachable) {
    if (labels.empty()) throw PreconditionError("every timestep needs a reachable label");
  }
  if (reachable.empty()) return 0;
  std::map<Index, int> best;
  for (Index y : reachable.front()) best[y] = 0;
  for (std::size_t t = 1; t < reachable.size(); ++t) {
    std::map<Index, int> next;
    for (Index y : reachable[t]) {
      int value = -1;
      for (const auto& [prev, count] : best) value = std::max(value, count + (prev != y));
      next[y] = value;
    }
    best = std::move(next);
  }
  int answer = 0;
  for (const auto& [label, count] : best) answer = std::max(answer, count);
  return answer;
}

ReachableLabels reachable_labels(const Network& net, const Vector& x, double eps, Norm p,
                                 const VerifyConfig& config) {
  ReachableLabels out;
  out.predicted = predicted_label(net, x);
  out.upper.insert(out.predicted);
  out.lower.insert(out.predicted);
  const Index outputs = net.output_width();
  if (outputs < 2) return out;
  const VerdictReport report = verify(net, all_targets(x, eps, p, out.predicted, outputs), config);
  std::size_t slot = 0;
  for (Index j = 0; j < outputs; ++j) {
    if (j == out.predicted) continue;
    const Status status = report.constraints[slot++].status;
    if (status != Status::Verified) out.upper.insert(j);
    if (status == Status::Falsified) out.lower.insert(j);
  }
  return out;
}

SwitchBounds switch_bounds(const Network& net, const std::vector<Vector>& sequence, double eps,
                           Norm p, const VerifyConfig& config) {
  std::vector<std::set<Index>> upper(sequence.size()), lower(sequence.size());
  VerifyConfig inner = config;
  inner.workers = 1;
  parallel_for(sequence.size(), config.workers, [&](std::size_t t) {
    ReachableLabels r = reachable_labels(net, sequence[t], eps, p, inner);
    upper[t] = std::move(r.upper);
    lower[t] = std::move(r.lower);
  });
  return {max_label_switches(upper), max_label_switches(lower)};
}

}  // namespace dualverify
