#pragma once

#include "dualverify/network.hpp"

#include <random>
#include <utility>
#include <variant>

namespace dualverify {

struct Box {
  Vector lower;
  Vector upper;
};

enum class Norm { L1, L2, Linf };

struct NormBall {
  Norm p = Norm::Linf;
  Vector center;
  double radius = 0.0;
};

// {x : ||x - center||_0 <= k, ||x - center||_inf <= radius}
struct CardinalityBall {
  Vector center;
  double radius = 0.0;
  Index k = 0;
};

// Bounded input constraint set. The constructor validates the variant.
class InputSet {
 public:
  using Variant = std::variant<Box, NormBall, CardinalityBall>;

  InputSet(Box box);
  InputSet(NormBall ball);
  InputSet(CardinalityBall ball);

  const Variant& variant() const { return set_; }
  Index dimension() const;
  // Deterministic feasible point: the center, or the lower corner of a box.
  Vector anchor() const;

 private:
  Variant set_;
};

struct LinearMaxResult {
  double value = 0.0;
  Vector argmax;
};

// max over x in set of v^T x.
LinearMaxResult linear_max(const InputSet& set, const Vector& v);

// max over x in set of (-W^T mu)^T x - b^T mu; the input-layer term of the dual.
LinearMaxResult f0(const Vector& mu, const Matrix& weights, const Vector& bias,
                   const InputSet& set);

// Euclidean projection for Box and norm balls. CardinalityBall uses a
// feasibility-restoring map: clip to the box, then keep the k largest deviations.
Vector project(const InputSet& set, const Vector& x);

// Smallest axis-aligned box containing the set.
Box bounding_box(const InputSet& set);

bool contains(const InputSet& set, const Vector& x, double tol = 1e-9);

// Uniform sample from the set (for CardinalityBall: a uniform support of size
// k, then uniform deviations on it).
Vector sample_point(const InputSet& set, std::mt19937_64& rng);

}  // namespace dualverify
