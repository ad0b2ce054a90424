#include "dualverify/conjugates.hpp"

#include "dualverify/errors.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>

namespace dualverify {

namespace {

void check_interval(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper)) {
    throw InvalidIntervalError("interval endpoints must be finite");
  }
  if (lower > upper) {
    throw InvalidIntervalError("interval [" + std::to_string(lower) + ", " +
                               std::to_string(upper) + "] is empty");
  }
}

double clamp_to(double y, double lower, double upper) {
  if (std::isnan(y)) return lower;
  return std::min(upper, std::max(lower, y));
}

// Keeps the first maximizer, so ties resolve to the earliest candidate
// (callers list the lower endpoint first).
class CandidateMax {
 public:
  CandidateMax(double lambda, double mu, Activation type)
      : lambda_(lambda), mu_(mu), type_(type) {}

  void offer(double y) {
    const double g = mu_ * y - lambda_ * activate(type_, y);
    if (g > best_.value) {
      best_.value = g;
      best_.argmax = y;
    }
  }

  ConjugateResult result() const { return best_; }

 private:
  double lambda_;
  double mu_;
  Activation type_;
  ConjugateResult best_{-std::numeric_limits<double>::infinity(), 0.0, true};
};

ConjugateResult linear_endpoints(double slope, double lower, double upper) {
  // Ties go to the lower endpoint.
  if (slope > 0.0) return {slope * upper, upper, true};
  return {slope * lower, lower, true};
}

}  // namespace

ConjugateResult conjugate_relu(double lambda, double mu, double lower, double upper) {
  check_interval(lower, upper);
  CandidateMax best(lambda, mu, Activation::ReLU);
  best.offer(lower);
  if (lower < 0.0 && 0.0 < upper) best.offer(0.0);
  best.offer(upper);
  return best.result();
}

ConjugateResult conjugate_identity(double lambda, double mu, double lower, double upper) {
  check_interval(lower, upper);
  return linear_endpoints(mu - lambda, lower, upper);
}

ConjugateResult conjugate_sigmoid(double lambda, double mu, double lower, double upper) {
  check_interval(lower, upper);
  if (std::abs(lambda) < kLambdaZero) {
    return linear_endpoints(mu, lower, upper);
  }
  CandidateMax best(lambda, mu, Activation::Sigmoid);
  best.offer(lower);
  best.offer(upper);
  // Stationary points solve sigma(y)(1 - sigma(y)) = mu / lambda.
  const double ratio = mu / lambda;
  if (ratio >= 0.0 && ratio <= 0.25) {
    const double root = std::sqrt(1.0 - 4.0 * ratio);
    // (1 - root) / 2 written without cancellation.
    const double small = 2.0 * ratio / (1.0 + root);
    const double large = 1.0 - small;
    const double y_small = std::log(small) - std::log(large);  // logit(small)
    best.offer(clamp_to(y_small, lower, upper));
    best.offer(clamp_to(-y_small, lower, upper));
  }
  return best.result();
}

ConjugateResult conjugate_tanh(double lambda, double mu, double lower, double upper) {
  check_interval(lower, upper);
  if (std::abs(lambda) < kLambdaZero) {
    return linear_endpoints(mu, lower, upper);
  }
  CandidateMax best(lambda, mu, Activation::Tanh);
  best.offer(lower);
  best.offer(upper);
  // Stationary points solve 1 - tanh(y)^2 = mu / lambda; tanh' is even.
  const double ratio = mu / lambda;
  if (ratio >= 0.0 && ratio <= 1.0) {
    const double y = std::atanh(std::sqrt(1.0 - ratio));
    best.offer(clamp_to(-y, lower, upper));
    best.offer(clamp_to(y, lower, upper));
  }
  return best.result();
}

ConjugateResult conjugate_elu(double lambda, double mu, double lower, double upper) {
  check_interval(lower, upper);
  if (std::abs(lambda) < kLambdaZero) {
    return linear_endpoints(mu, lower, upper);
  }
  // Linear on [0, inf); on (-inf, 0] the stationary point solves exp(y) = mu / lambda.
  CandidateMax best(lambda, mu, Activation::ELU);
  best.offer(lower);
  if (lower < 0.0 && 0.0 < upper) best.offer(0.0);
  const double ratio = mu / lambda;
  if (lower < 0.0 && ratio > 0.0) {
    best.offer(clamp_to(std::log(ratio), lower, std::min(upper, 0.0)));
  }
  best.offer(upper);
  return best.result();
}

PoolConjugateResult conjugate_maxpool(double lambda, const Vector& mu, const Vector& lower,
                                      const Vector& upper) {
  const Index t = mu.size();
  if (lower.size() != t || upper.size() != t) {
    throw ShapeError("maxpool conjugate needs equal-length mu, lower and upper");
  }
  if (t < 1) {
    throw ShapeError("maxpool conjugate needs a non-empty block");
  }
  for (Index j = 0; j < t; ++j) {
    check_interval(lower(j), upper(j));
  }
  if (std::abs(lambda) < kLambdaZero) {
    lambda = 0.0;
  }

  const double max_lower = lower.maxCoeff();
  PoolConjugateResult best{-std::numeric_limits<double>::infinity(), lower, true};

  // Case i: y_i = s is the block maximum. Every other coordinate then lives in
  // [lower_j, min(upper_j, s)] and picks its best endpoint, so the objective is
  // piecewise linear in s with breakpoints at the upper_j.
  Vector y(t);
  for (Index i = 0; i < t; ++i) {
    const double lo = std::max(lower(i), max_lower);
    const double hi = upper(i);
    if (lo > hi) continue;

    auto evaluate = [&](double s) {
      double total = (mu(i) - lambda) * s;
      y(i) = s;
      for (Index j = 0; j < t; ++j) {
        if (j == i) continue;
        const double top = std::min(upper(j), s);
        const double at_lower = mu(j) * lower(j);
        const double at_top = mu(j) * top;
        if (at_top > at_lower) {
          total += at_top;
          y(j) = top;
        } else {
          total += at_lower;
          y(j) = lower(j);
        }
      }
      if (total > best.value) {
        best.value = total;
        best.argmax = y;
      }
    };

    evaluate(lo);
    for (Index j = 0; j < t; ++j) {
      if (j != i && upper(j) > lo && upper(j) < hi) evaluate(upper(j));
    }
    evaluate(hi);
  }
  return best;
}

ConjugateResult conjugate_general(const std::function<double(double)>& h, double lambda,
                                  double mu, double lower, double upper, int pieces) {
  check_interval(lower, upper);
  if (pieces < 1) {
    throw PreconditionError("conjugate_general needs at least one piece");
  }
  const double width = upper - lower;
  ConjugateResult best{-std::numeric_limits<double>::infinity(), lower, false};
  double a = lower;
  double ha = h(a);
  for (int i = 1; i <= pieces; ++i) {
    // i / pieces is correctly rounded, so doubling the piece count reproduces
    // the coarser breakpoints exactly.
    const double b =
        i == pieces ? upper : lower + width * (static_cast<double>(i) / pieces);
    const double hb = h(b);
    const double bound = std::max(mu * a, mu * b) + std::max(-lambda * ha, -lambda * hb);
    if (bound > best.value) {
      best.value = bound;
      best.argmax = (mu * a - lambda * ha >= mu * b - lambda * hb) ? a : b;
    }
    a = b;
    ha = hb;
  }
  return best;
}

ConjugateResult conjugate(const ActivationKind& kind, double lambda, double mu, double lower,
                          double upper) {
  switch (kind.type) {
    case Activation::ReLU: return conjugate_relu(lambda, mu, lower, upper);
    case Activation::Sigmoid: return conjugate_sigmoid(lambda, mu, lower, upper);
    case Activation::Tanh: return conjugate_tanh(lambda, mu, lower, upper);
    case Activation::ELU: return conjugate_elu(lambda, mu, lower, upper);
    case Activation::Identity: return conjugate_identity(lambda, mu, lower, upper);
    case Activation::MaxPool: break;
  }
  throw UnsupportedActivationError("maxpool conjugates act on whole blocks");
}

}  // namespace dualverify
