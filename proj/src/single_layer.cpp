#include "dualverify/single_layer.hpp"

#include "dualverify/errors.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace dualverify {

void SingleLayerProblem::validate() const {
  if (W.rows() != b.size() || W.rows() != c.size()) {
    throw ShapeError("single-layer problem: W, b and c disagree on the hidden width");
  }
  if (W.cols() != x_nom.size()) {
    throw ShapeError("single-layer problem: x_nom does not match the input width");
  }
  if (!std::isfinite(eps) || eps < 0.0) {
    throw PreconditionError("single-layer problem: radius must be finite and non-negative");
  }
  if (activation != Activation::Sigmoid && activation != Activation::Tanh) {
    throw UnsupportedActivationError("single-layer certifiers need sigmoid or tanh");
  }
}

double SingleLayerProblem::objective(const Vector& x) const {
  const Vector z = W * x + b;
  double total = offset;
  for (Index i = 0; i < z.size(); ++i) total += c(i) * activate(activation, z(i));
  return total;
}

Vector SingleLayerProblem::gradient(const Vector& x) const {
  const Vector z = W * x + b;
  Vector weighted(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    weighted(i) = c(i) * activation_derivative(activation, z(i), 1);
  }
  return W.transpose() * weighted;
}

SingleLayerProblem fold_output_layer(const Network& net, const Vector& c_out, double d_out,
                                     const Vector& x_nom, double eps) {
  if (net.num_layers() != 2) {
    throw PreconditionError("folding needs exactly one hidden layer and one output layer");
  }
  const Layer& hidden = net.layer(0);
  const Layer& output = net.layer(1);
  if (output.activation().type != Activation::Identity) {
    throw UnsupportedActivationError("the output layer must be linear");
  }
  if (c_out.size() != output.pre_width()) {
    throw ShapeError("c_out does not match the network output width");
  }
  SingleLayerProblem problem;
  problem.W = hidden.weights();
  problem.b = hidden.bias();
  problem.c = output.weights().transpose() * c_out;
  problem.x_nom = x_nom;
  problem.eps = eps;
  problem.activation = hidden.activation().type;
  problem.offset = c_out.dot(output.bias()) + d_out;
  problem.validate();
  return problem;
}

Network to_network(const SingleLayerProblem& problem) {
  problem.validate();
  const ActivationKind hidden{problem.activation, 1};
  return Network({Layer(problem.W, problem.b, hidden),
                  Layer(problem.c.transpose(), Vector::Constant(1, problem.offset),
                        ActivationKind::identity())});
}

double spectral_norm(const Matrix& a, double rel_tol, int max_iters) {
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Matrix gram = a.transpose() * a;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  Vector v(gram.cols());
  for (Index i = 0; i < v.size(); ++i) v(i) = unit(rng);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = gram * v;
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::abs(next - estimate) <= rel_tol * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return std::sqrt(estimate);
}

double SmoothnessData::radius_limit() const {
  if (nu <= 0.0) return 0.0;
  if (lipschitz <= 0.0) return std::numeric_limits<double>::infinity();
  return nu / (2.0 * lipschitz);
}

double SmoothnessData::contraction_bound(double eps) const {
  return eps * lipschitz / (nu - eps * lipschitz);
}

SmoothnessData smoothness(const SingleLayerProblem& problem) {
  problem.validate();
  SmoothnessData data;
  data.nu = problem.gradient(problem.x_nom).norm();
  const double gamma = smoothness_constants({problem.activation, 1}).gamma;
  data.gamma = Vector::Constant(problem.W.rows(), gamma);
  const Matrix weighted_t = problem.W.transpose() * problem.c.asDiagonal();
  const Matrix gamma_w = data.gamma.asDiagonal() * problem.W;
  data.lipschitz = spectral_norm(weighted_t) * spectral_norm(gamma_w);
  data.radius_ok = problem.eps < data.radius_limit();
  return data;
}

std::vector<double> FixedPointResult::contraction_ratios(double floor) const {
  std::vector<double> ratios;
  for (std::size_t k = 1; k + 1 < iterates.size(); ++k) {
    const double prev = (iterates[k] - iterates[k - 1]).norm();
    const double next = (iterates[k + 1] - iterates[k]).norm();
    if (prev < floor || next < floor) break;
    ratios.push_back(next / prev);
  }
  return ratios;
}

FixedPointResult fixed_point_verify(const SingleLayerProblem& problem, int max_iters,
                                    double tol) {
  problem.validate();
  if (max_iters < 0) throw PreconditionError("max_iters must be non-negative");
  FixedPointResult result;
  result.guaranteed = smoothness(problem).radius_ok;
  result.x_star = problem.x_nom;
  result.iterates.push_back(problem.x_nom);
  if (problem.eps == 0.0) {
    result.converged = true;
  }
  for (int k = 0; k < max_iters && !result.converged; ++k) {
    const Vector g = problem.gradient(result.x_star);
    const double n = g.norm();
    if (n == 0.0) {
      result.stationary_gradient = true;
      result.x_star = problem.x_nom;
      break;
    }
    Vector next = problem.x_nom + (problem.eps / n) * g;
    const double step = (next - result.x_star).norm();
    result.x_star = std::move(next);
    result.iterates.push_back(result.x_star);
    if (step < tol) result.converged = true;
  }
  result.value = problem.objective(result.x_star);
  return result;
}

double kappa(const SingleLayerProblem& problem) {
  problem.validate();
  const double eta = smoothness_constants({problem.activation, 1}).eta;
  double total = 0.0;
  for (Index i = 0; i < problem.W.rows(); ++i) {
    total += eta * std::abs(problem.c(i)) * std::pow(problem.W.row(i).norm(), 3);
  }
  return total / 6.0;
}

TrustRegionSolution trs_solve(const Vector& g, const Matrix& H, double radius) {
  const Index n = g.size();
  if (H.rows() != n || H.cols() != n) throw ShapeError("trs_solve: H must be square of size |g|");
  if (!std::isfinite(radius) || radius < 0.0) {
    throw PreconditionError("trs_solve: radius must be finite and non-negative");
  }
  TrustRegionSolution sol{Vector::Zero(n), 0.0, 0.0};
  if (radius == 0.0 || n == 0) return sol;

  // Minimize q^T z + 1/2 z^T A z with A = -H, q = -g. The minimizer is
  // z(s) = -(A + s I)^{-1} q for the multiplier s >= max(0, -lambda_min(A)).
  const Matrix A = -0.5 * (H + H.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A);
  const Vector& ev = eig.eigenvalues();
  const Matrix& V = eig.eigenvectors();
  const Vector qt = V.transpose() * (-g);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double tiny = 1e-12 * scale;

  auto solution_at = [&](double s, bool skip_bottom) {
    Vector coef(n);
    for (Index i = 0; i < n; ++i) {
      const double denom = ev(i) + s;
      coef(i) = (skip_bottom && denom <= tiny) ? 0.0 : -qt(i) / denom;
    }
    return coef;
  };
  auto finish = [&](const Vector& coef, double s) {
    sol.z = V * coef;
    sol.multiplier = s;
    sol.value = g.dot(sol.z) + 0.5 * sol.z.dot(H * sol.z);
    return sol;
  };

  const double lambda_min = ev(0);
  if (lambda_min > tiny) {
    const Vector interior = solution_at(0.0, false);
    if (interior.norm() <= radius) return finish(interior, 0.0);
  }

  const double s_low = std::max(0.0, -lambda_min);
  const double q_norm = qt.norm();
  bool bottom_orthogonal = true;
  for (Index i = 0; i < n && ev(i) + s_low <= tiny; ++i) {
    if (std::abs(qt(i)) > 1e-12 * std::max(1.0, q_norm)) bottom_orthogonal = false;
  }
  if (bottom_orthogonal) {
    Vector coef = solution_at(s_low, true);
    const double rest = coef.norm();
    if (rest <= radius) {
      // Hard case: pad along the bottom eigenvector to reach the boundary.
      coef(0) += std::sqrt(std::max(0.0, radius * radius - rest * rest));
      return finish(coef, s_low);
    }
  }

  // ||z(s)|| decreases in s; ||z(s_low + ||q|| / radius)|| <= radius.
  double lo = s_low;
  double hi = s_low + q_norm / radius;
  for (int it = 0; it < 500 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (solution_at(mid, false).norm() > radius) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return finish(solution_at(hi, false), hi);
}

TrustRegionBound trust_region_bound(const SingleLayerProblem& problem) {
  problem.validate();
  const Vector z_nom = problem.z_nom();
  const Index n = z_nom.size();
  Vector first(n), second(n);
  double constant = problem.offset;
  for (Index i = 0; i < n; ++i) {
    constant += problem.c(i) * activate(problem.activation, z_nom(i));
    first(i) = problem.c(i) * activation_derivative(problem.activation, z_nom(i), 1);
    second(i) = problem.c(i) * activation_derivative(problem.activation, z_nom(i), 2);
  }
  const Vector g = problem.W.transpose() * first;
  const Matrix H = problem.W.transpose() * second.asDiagonal() * problem.W;
  const TrustRegionSolution sol = trs_solve(g, H, problem.eps);

  TrustRegionBound out;
  out.kappa = kappa(problem);
  out.tr_value = constant + sol.value;
  out.upper_bound = out.tr_value + out.kappa * std::pow(problem.eps, 3);
  out.z_star = sol.z;
  return out;
}

}  // namespace dualverify
