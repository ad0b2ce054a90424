#include "dualverify/input_sets.hpp"

#include "dualverify/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dualverify {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void check_center(const Vector& center, double radius) {
  if (center.size() == 0) throw ShapeError("input set needs positive dimension");
  if (!center.allFinite()) throw PreconditionError("center must be finite");
  if (!std::isfinite(radius) || radius < 0.0) {
    throw PreconditionError("radius must be finite and non-negative");
  }
}

void check_dimension(const InputSet& set, const Vector& x) {
  if (x.size() != set.dimension()) {
    throw ShapeError("vector has length " + std::to_string(x.size()) + ", input set has dimension " +
                     std::to_string(set.dimension()));
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Indices ordered by decreasing |v|; ties keep the lower index first.
std::vector<Index> order_by_magnitude(const Vector& v) {
  std::vector<Index> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });
  return idx;
}

Vector project_l1(const Vector& center, double radius, const Vector& x) {
  const Vector d = x - center;
  if (d.lpNorm<1>() <= radius) return x;
  if (radius == 0.0) return center;
  std::vector<double> u(d.size());
  for (Index i = 0; i < d.size(); ++i) u[static_cast<std::size_t>(i)] = std::abs(d(i));
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    running += u[j];
    const double candidate = (running - radius) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  Vector out = center;
  for (Index i = 0; i < d.size(); ++i) {
    out(i) += sign(d(i)) * std::max(std::abs(d(i)) - theta, 0.0);
  }
  return out;
}

}  // namespace

InputSet::InputSet(Box box) : set_(std::move(box)) {
  const Box& b = std::get<Box>(set_);
  if (b.lower.size() != b.upper.size()) throw ShapeError("box bounds differ in length");
  if (b.lower.size() == 0) throw ShapeError("input set needs positive dimension");
  if (!b.lower.allFinite() || !b.upper.allFinite()) {
    throw PreconditionError("box bounds must be finite");
  }
  if ((b.lower.array() > b.upper.array()).any()) {
    throw InvalidIntervalError("box lower bound exceeds upper bound");
  }
}

InputSet::InputSet(NormBall ball) : set_(std::move(ball)) {
  const NormBall& b = std::get<NormBall>(set_);
  check_center(b.center, b.radius);
}

InputSet::InputSet(CardinalityBall ball) : set_(std::move(ball)) {
  const CardinalityBall& b = std::get<CardinalityBall>(set_);
  check_center(b.center, b.radius);
  if (b.k < 0 || b.k > b.center.size()) {
    throw PreconditionError("cardinality k must lie in [0, dimension]");
  }
}

Index InputSet::dimension() const {
  return std::visit(Overloaded{[](const Box& b) { return b.lower.size(); },
                               [](const NormBall& b) { return b.center.size(); },
                               [](const CardinalityBall& b) { return b.center.size(); }},
                    set_);
}

Vector InputSet::anchor() const {
  return std::visit(Overloaded{[](const Box& b) { return Vector(b.lower); },
                               [](const NormBall& b) { return Vector(b.center); },
                               [](const CardinalityBall& b) { return Vector(b.center); }},
                    set_);
}

LinearMaxResult linear_max(const InputSet& set, const Vector& v) {
  check_dimension(set, v);
  return std::visit(
      Overloaded{
          [&](const Box& b) {
            LinearMaxResult r{0.0, Vector(v.size())};
            for (Index i = 0; i < v.size(); ++i) {
              if (v(i) > 0.0) {
                r.argmax(i) = b.upper(i);
              } else if (v(i) < 0.0) {
                r.argmax(i) = b.lower(i);
              } else {
                r.argmax(i) = 0.5 * (b.lower(i) + b.upper(i));
              }
            }
            r.value = v.dot(r.argmax);
            return r;
          },
          [&](const NormBall& b) {
            LinearMaxResult r{v.dot(b.center), b.center};
            if (b.radius == 0.0) return r;
            switch (b.p) {
              case Norm::Linf:
                r.value += b.radius * v.lpNorm<1>();
                r.argmax += b.radius * v.unaryExpr([](double e) { return sign(e); });
                break;
              case Norm::L2: {
                const double n = v.norm();
                r.value += b.radius * n;
                if (n > 0.0) r.argmax += (b.radius / n) * v;
                break;
              }
              case Norm::L1: {
                Index best = 0;
                const double m = v.cwiseAbs().maxCoeff(&best);
                r.value += b.radius * m;
                r.argmax(best) += b.radius * sign(v(best));
                break;
              }
            }
            return r;
          },
          [&](const CardinalityBall& b) {
            LinearMaxResult r{v.dot(b.center), b.center};
            const auto order = order_by_magnitude(v);
            for (Index j = 0; j < b.k; ++j) {
              const Index i = order[static_cast<std::size_t>(j)];
              if (v(i) == 0.0) break;
              r.value += b.radius * std::abs(v(i));
              r.argmax(i) += b.radius * sign(v(i));
            }
            return r;
          }},
      set.variant());
}

LinearMaxResult f0(const Vector& mu, const Matrix& weights, const Vector& bias,
                   const InputSet& set) {
  if (weights.rows() != mu.size() || bias.size() != mu.size()) {
    throw ShapeError("f0: multiplier length does not match the first layer");
  }
  LinearMaxResult r = linear_max(set, -(weights.transpose() * mu));
  r.value -= bias.dot(mu);
  return r;
}

Vector project(const InputSet& set, const Vector& x) {
  check_dimension(set, x);
  return std::visit(
      Overloaded{
          [&](const Box& b) { return Vector(x.cwiseMax(b.lower).cwiseMin(b.upper)); },
          [&](const NormBall& b) -> Vector {
            switch (b.p) {
              case Norm::Linf: {
                const Vector lo = b.center.array() - b.radius;
                const Vector hi = b.center.array() + b.radius;
                return x.cwiseMax(lo).cwiseMin(hi);
              }
              case Norm::L2: {
                const Vector d = x - b.center;
                const double n = d.norm();
                if (n <= b.radius) return x;
                return b.center + (b.radius / n) * d;
              }
              case Norm::L1:
                return project_l1(b.center, b.radius, x);
            }
            return x;
          },
          [&](const CardinalityBall& b) {
            Vector d = (x - b.center).cwiseMax(-b.radius).cwiseMin(b.radius);
            const auto order = order_by_magnitude(d);
            for (std::size_t j = static_cast<std::size_t>(b.k); j < order.size(); ++j) {
              d(order[j]) = 0.0;
            }
            return Vector(b.center + d);
          }},
      set.variant());
}

Box bounding_box(const InputSet& set) {
  return std::visit(Overloaded{[](const Box& b) { return b; },
                               [](const NormBall& b) {
                                 return Box{b.center.array() - b.radius,
                                            b.center.array() + b.radius};
                               },
                               [](const CardinalityBall& b) {
                                 const double r = b.k == 0 ? 0.0 : b.radius;
                                 return Box{b.center.array() - r, b.center.array() + r};
                               }},
                    set.variant());
}

bool contains(const InputSet& set, const Vector& x, double tol) {
  check_dimension(set, x);
  return std::visit(
      Overloaded{[&](const Box& b) {
                   return ((x.array() >= b.lower.array() - tol) &&
                           (x.array() <= b.upper.array() + tol))
                       .all();
                 },
                 [&](const NormBall& b) {
                   const Vector d = x - b.center;
                   double n = 0.0;
                   switch (b.p) {
                     case Norm::L1: n = d.lpNorm<1>(); break;
                     case Norm::L2: n = d.norm(); break;
                     case Norm::Linf: n = d.lpNorm<Eigen::Infinity>(); break;
                   }
                   return n <= b.radius + tol;
                 },
                 [&](const CardinalityBall& b) {
                   const Vector d = x - b.center;
                   const auto nonzero = (d.array().abs() > tol).count();
                   return d.lpNorm<Eigen::Infinity>() <= b.radius + tol && nonzero <= b.k;
                 }},
      set.variant());
}

Vector sample_point(const InputSet& set, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::visit(
      Overloaded{
          [&](const Box& b) {
            Vector x(b.lower.size());
            for (Index i = 0; i < x.size(); ++i) {
              x(i) = b.lower(i) + unit(rng) * (b.upper(i) - b.lower(i));
            }
            return x;
          },
          [&](const NormBall& b) {
            const Index n = b.center.size();
            Vector d(n);
            switch (b.p) {
              case Norm::Linf:
                for (Index i = 0; i < n; ++i) d(i) = b.radius * (2.0 * unit(rng) - 1.0);
                break;
              case Norm::L2: {
                std::normal_distribution<double> gauss;
                for (Index i = 0; i < n; ++i) d(i) = gauss(rng);
                const double norm = d.norm();
                const double r = b.radius * std::pow(unit(rng), 1.0 / static_cast<double>(n));
                d *= norm > 0.0 ? r / norm : 0.0;
                break;
              }
              case Norm::L1: {
                // n + 1 exponential spacings give a uniform point of the simplex.
                std::exponential_distribution<double> expo(1.0);
                double total = 0.0;
                for (Index i = 0; i < n; ++i) {
                  d(i) = expo(rng);
                  total += d(i);
                }
                total += expo(rng);
                for (Index i = 0; i < n; ++i) {
                  d(i) *= b.radius / total * (unit(rng) < 0.5 ? -1.0 : 1.0);
                }
                break;
              }
            }
            return Vector(b.center + d);
          },
          [&](const CardinalityBall& b) {
            std::vector<Index> idx(static_cast<std::size_t>(b.center.size()));
            std::iota(idx.begin(), idx.end(), Index{0});
            std::shuffle(idx.begin(), idx.end(), rng);
            Vector x = b.center;
            for (Index j = 0; j < b.k; ++j) {
              x(idx[static_cast<std::size_t>(j)]) += b.radius * (2.0 * unit(rng) - 1.0);
            }
            return x;
          }},
      set.variant());
}

}  // namespace dualverify
