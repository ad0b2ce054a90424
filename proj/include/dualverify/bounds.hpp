#pragma once

#include "dualverify/input_sets.hpp"
#include "dualverify/network.hpp"

#include <vector>

namespace dualverify {

// Boxes on pre-activations (layers 0..L-1) and post-activations (0..L).
struct ActivationBounds {
  std::vector<Vector> prel, preu;
  std::vector<Vector> postl, postu;

  // True when every box is ordered and sized for `net`.
  bool consistent_with(const Network& net) const;
  // True when the trace lies inside every box (with slack `tol`).
  bool contains(const Trace& trace, double tol = 1e-9) const;
  // The boxes that a prefix network of `count` layers uses.
  ActivationBounds prefix(std::size_t count) const;
};

// Interval arithmetic through the layers, starting from the input box.
ActivationBounds interval_propagate(const Network& net, const Vector& input_lower,
                                    const Vector& input_upper);

// Image of a pre-activation box under a monotone activation (maxpool takes
// per-block maxima of both ends).
Box activation_image(const ActivationKind& kind, const Vector& lower, const Vector& upper);

// Re-bounds every hidden post-activation coordinate by running the dual solver
// on the truncated network with objectives +-e_k, layer by layer. The result is
// intersected with `bounds`, so it is never looser. iters_per_neuron == 0
// returns `bounds` unchanged. `workers` bounds the per-layer fan-out.
ActivationBounds tighten_bounds(const Network& net, const InputSet& set,
                                const ActivationBounds& bounds, int iters_per_neuron,
                                unsigned workers = 1);

}  // namespace dualverify
