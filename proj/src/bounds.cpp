#include "dualverify/bounds.hpp"

#include "dualverify/dual_solver.hpp"
#include "dualverify/errors.hpp"
#include "dualverify/parallel.hpp"

namespace dualverify {

namespace {

bool ordered(const Vector& lo, const Vector& hi, Index width) {
  return lo.size() == width && hi.size() == width && (lo.array() <= hi.array()).all();
}

// Interval image of an affine map.
void affine_interval(const Layer& layer, const Vector& lo, const Vector& hi, Vector& out_lo,
                     Vector& out_hi) {
  const Matrix pos = layer.weights().cwiseMax(0.0);
  const Matrix neg = layer.weights().cwiseMin(0.0);
  out_lo = pos * lo + neg * hi + layer.bias();
  out_hi = pos * hi + neg * lo + layer.bias();
}

}  // namespace

bool ActivationBounds::consistent_with(const Network& net) const {
  const std::size_t layers = net.num_layers();
  if (prel.size() != layers || preu.size() != layers || postl.size() != layers + 1 ||
      postu.size() != layers + 1) {
    return false;
  }
  if (!ordered(postl[0], postu[0], net.input_width())) return false;
  for (std::size_t l = 0; l < layers; ++l) {
    const Layer& layer = net.layer(l);
    if (!ordered(prel[l], preu[l], layer.pre_width())) return false;
    if (!ordered(postl[l + 1], postu[l + 1], layer.output_width())) return false;
    if (!prel[l].allFinite() || !preu[l].allFinite()) return false;
  }
  return true;
}

bool ActivationBounds::contains(const Trace& trace, double tol) const {
  auto inside = [tol](const Vector& v, const Vector& lo, const Vector& hi) {
    return v.size() == lo.size() && (v.array() >= lo.array() - tol).all() &&
           (v.array() <= hi.array() + tol).all();
  };
  if (trace.pre.size() != prel.size() || trace.post.size() != postl.size()) return false;
  for (std::size_t l = 0; l < trace.pre.size(); ++l) {
    if (!inside(trace.pre[l], prel[l], preu[l])) return false;
  }
  for (std::size_t l = 0; l < trace.post.size(); ++l) {
    if (!inside(trace.post[l], postl[l], postu[l])) return false;
  }
  return true;
}

ActivationBounds ActivationBounds::prefix(std::size_t count) const {
  if (count == 0 || count > prel.size()) {
    throw PreconditionError("bounds prefix length out of range");
  }
  ActivationBounds out;
  out.prel.assign(prel.begin(), prel.begin() + count);
  out.preu.assign(preu.begin(), preu.begin() + count);
  out.postl.assign(postl.begin(), postl.begin() + count + 1);
  out.postu.assign(postu.begin(), postu.begin() + count + 1);
  return out;
}

Box activation_image(const ActivationKind& kind, const Vector& lower, const Vector& upper) {
  // Every supported activation is monotone non-decreasing, and max is monotone
  // in each argument.
  return Box{activation_eval(kind, lower), activation_eval(kind, upper)};
}

ActivationBounds interval_propagate(const Network& net, const Vector& input_lower,
                                    const Vector& input_upper) {
  if (input_lower.size() != net.input_width() || input_upper.size() != net.input_width()) {
    throw ShapeError("input box does not match the network input width");
  }
  if ((input_lower.array() > input_upper.array()).any()) {
    throw InvalidIntervalError("input box lower bound exceeds upper bound");
  }
  ActivationBounds bounds;
  bounds.postl.push_back(input_lower);
  bounds.postu.push_back(input_upper);
  for (const Layer& layer : net.layers()) {
    Vector lo, hi;
    affine_interval(layer, bounds.postl.back(), bounds.postu.back(), lo, hi);
    Box image = activation_image(layer.activation(), lo, hi);
    bounds.prel.push_back(std::move(lo));
    bounds.preu.push_back(std::move(hi));
    bounds.postl.push_back(std::move(image.lower));
    bounds.postu.push_back(std::move(image.upper));
  }
  return bounds;
}

ActivationBounds tighten_bounds(const Network& net, const InputSet& set,
                                const ActivationBounds& bounds, int iters_per_neuron,
                                unsigned workers) {
  if (iters_per_neuron < 0) {
    throw PreconditionError("iters_per_neuron must be non-negative");
  }
  if (!bounds.consistent_with(net)) {
    throw PreconditionError("bounds do not match the network");
  }
  if (iters_per_neuron == 0) {
    return bounds;
  }
  ActivationBounds result = bounds;
  const std::size_t layers = net.num_layers();
  const DualConfig config{iters_per_neuron};

  for (std::size_t l = 1; l < layers; ++l) {
    // post[l] is the output of the first l layers; earlier boxes are final here.
    const Network sub = net.prefix(l);
    const ActivationBounds sub_bounds = result.prefix(l);
    const Index width = sub.output_width();
    Vector upper(width), lower(width);
    parallel_for(static_cast<std::size_t>(width), workers, [&](std::size_t i) {
      const auto k = static_cast<Index>(i);
      OutputConstraint objective{Vector::Unit(width, k), 0.0};
      upper(k) = minimize_dual(sub, objective, set, sub_bounds, config).best_bound;
      objective.c = -objective.c;
      lower(k) = -minimize_dual(sub, objective, set, sub_bounds, config).best_bound;
    });
    Vector& pl = result.postl[l];
    Vector& pu = result.postu[l];
    // Rounding can push a dual bound just past the opposite end of a
    // degenerate box; clamping keeps the result inside the input box.
    pu = pu.cwiseMin(upper).cwiseMax(pl);
    pl = pl.cwiseMax(lower).cwiseMin(pu);

    // One interval step forward from the tightened box.
    const Layer& layer = net.layer(l);
    Vector lo, hi;
    affine_interval(layer, pl, pu, lo, hi);
    result.preu[l] = result.preu[l].cwiseMin(hi).cwiseMax(result.prel[l]);
    result.prel[l] = result.prel[l].cwiseMax(lo).cwiseMin(result.preu[l]);
    const Box image = activation_image(layer.activation(), result.prel[l], result.preu[l]);
    result.postu[l + 1] = result.postu[l + 1].cwiseMin(image.upper).cwiseMax(result.postl[l + 1]);
    result.postl[l + 1] = result.postl[l + 1].cwiseMax(image.lower).cwiseMin(result.postu[l + 1]);
  }
  return result;
}

}  // namespace dualverify
