#pragma once

#include "dualverify/network.hpp"

#include <functional>

namespace dualverify {

// max over y in [lower, upper] of mu * y - lambda * h(y).
struct ConjugateResult {
  double value = 0.0;
  double argmax = 0.0;
  // False when value is only an upper bound (partition-based).
  bool exact = true;
};

// Same problem for a pooling block: max over the box of mu^T y - lambda * max_j y_j.
struct PoolConjugateResult {
  double value = 0.0;
  Vector argmax;
  bool exact = true;
};

// |lambda| below this is treated as zero.
inline constexpr double kLambdaZero = 1e-12;

ConjugateResult conjugate_relu(double lambda, double mu, double lower, double upper);
ConjugateResult conjugate_sigmoid(double lambda, double mu, double lower, double upper);
ConjugateResult conjugate_tanh(double lambda, double mu, double lower, double upper);
ConjugateResult conjugate_elu(double lambda, double mu, double lower, double upper);
ConjugateResult conjugate_identity(double lambda, double mu, double lower, double upper);

PoolConjugateResult conjugate_maxpool(double lambda, const Vector& mu, const Vector& lower,
                                      const Vector& upper);

// Upper bound from a uniform partition of [lower, upper] into `pieces` cells,
// decoupling the linear and nonlinear terms on each cell. Sound for h
// monotone on every cell.
ConjugateResult conjugate_general(const std::function<double(double)>& h, double lambda,
                                  double mu, double lower, double upper, int pieces);

// Dispatch for component-wise kinds. MaxPool goes through conjugate_maxpool.
ConjugateResult conjugate(const ActivationKind& kind, double lambda, double mu, double lower,
                          double upper);

}  // namespace dualverify
