#pragma once

#include "dualverify/network.hpp"

#include <vector>

namespace dualverify {

// max over ||x - x_nom||_2 <= eps of sum_i c_i h(W_i x + b_i) + offset.
// Produced from a one-hidden-layer network by folding the linear output layer
// into c.
struct SingleLayerProblem {
  Matrix W;
  Vector b;
  Vector c;
  Vector x_nom;
  double eps = 0.0;
  Activation activation = Activation::Tanh;
  double offset = 0.0;

  // Throws on shape mismatches, negative radius or a non-smooth activation.
  void validate() const;
  Vector z_nom() const { return W * x_nom + b; }
  double objective(const Vector& x) const;
  // W^T (c .* h'(W x + b))
  Vector gradient(const Vector& x) const;
};

// Folds (c_out, d_out) through an identity output layer: c = W1^T c_out,
// offset = c_out^T b1 + d_out.
SingleLayerProblem fold_output_layer(const Network& net, const Vector& c_out, double d_out,
                                     const Vector& x_nom, double eps);

// The problem as a two-layer network with scalar output (for oracles).
Network to_network(const SingleLayerProblem& problem);

// Largest singular value by power iteration on A^T A.
double spectral_norm(const Matrix& a, double rel_tol = 1e-9, int max_iters = 10000);

struct SmoothnessData {
  double nu = 0.0;        // ||gradient at x_nom||_2
  double lipschitz = 0.0; // sigma_max(diag(c) W^T) * sigma_max(diag(gamma) W)
  Vector gamma;           // per-neuron bound on |h''|
  bool radius_ok = false; // eps < nu / (2 * lipschitz)

  double radius_limit() const;
  // eps L / (nu - eps L), the guaranteed per-step contraction.
  double contraction_bound(double eps) const;
};

SmoothnessData smoothness(const SingleLayerProblem& problem);

struct FixedPointResult {
  Vector x_star;
  double value = 0.0;
  bool converged = false;
  // False when the radius condition fails; the value is then only a feasible
  // (attack) value, never a certificate.
  bool guaranteed = false;
  // The gradient vanished at an iterate.
  bool stationary_gradient = false;
  std::vector<Vector> iterates;

  // ||x_{k+1} - x_k|| / ||x_k - x_{k-1}|| for k >= 1, skipping steps below `floor`.
  std::vector<double> contraction_ratios(double floor = 1e-12) const;
};

// x_{k+1} = x_nom + eps * g(x_k) / ||g(x_k)||, from x_0 = x_nom.
FixedPointResult fixed_point_verify(const SingleLayerProblem& problem, int max_iters = 1000,
                                    double tol = 1e-12);

// (1/6) sum_i eta |c_i| ||W_i||^3
double kappa(const SingleLayerProblem& problem);

struct TrustRegionSolution {
  Vector z;
  double value = 0.0;
  double multiplier = 0.0;
};

// Global max of g^T z + 1/2 z^T H z over ||z||_2 <= radius (H symmetric).
TrustRegionSolution trs_solve(const Vector& g, const Matrix& H, double radius);

struct TrustRegionBound {
  double tr_value = 0.0;     // optimum of the second-order model
  double upper_bound = 0.0;  // tr_value + kappa eps^3
  Vector z_star;
  double kappa = 0.0;
};

TrustRegionBound trust_region_bound(const SingleLayerProblem& problem);

}  // namespace dualverify
