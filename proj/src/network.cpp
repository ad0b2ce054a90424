#include "dualverify/network.hpp"

#include "dualverify/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <mutex>
#include <unordered_map>

namespace dualverify {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw FormatError(std::string(what) + " contains non-finite entries");
  }
}

double sigmoid(double y) {
  if (y >= 0.0) {
    return 1.0 / (1.0 + std::exp(-y));
  }
  const double e = std::exp(y);
  return e / (1.0 + e);
}

}  // namespace

ActivationKind ActivationKind::maxpool(Index group) {
  if (group < 2) {
    throw PreconditionError("maxpool group size must be at least 2");
  }
  return {Activation::MaxPool, group};
}

bool ActivationKind::is_smooth() const {
  return type == Activation::Sigmoid || type == Activation::Tanh ||
         type == Activation::ELU || type == Activation::Identity;
}

Index ActivationKind::output_width(Index n) const {
  if (type != Activation::MaxPool) {
    return n;
  }
  if (group_size < 2 || n % group_size != 0) {
    throw ShapeError("maxpool group size " + std::to_string(group_size) +
                     " does not divide width " + std::to_string(n));
  }
  return n / group_size;
}

std::string to_string(const ActivationKind& kind) {
  switch (kind.type) {
    case Activation::ReLU: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::ELU: return "elu";
    case Activation::Identity: return "identity";
    case Activation::MaxPool: return "maxpool(" + std::to_string(kind.group_size) + ")";
  }
  return "unknown";
}

double activate(Activation type, double y) {
  switch (type) {
    case Activation::ReLU: return y > 0.0 ? y : 0.0;
    case Activation::Sigmoid: return sigmoid(y);
    case Activation::Tanh: return std::tanh(y);
    case Activation::ELU: return y > 0.0 ? y : std::expm1(y);
    case Activation::Identity: return y;
    case Activation::MaxPool: break;
  }
  throw UnsupportedActivationError("maxpool is not a scalar activation");
}

double activation_derivative(Activation type, double y, int order) {
  if (order < 1 || order > 3) {
    throw PreconditionError("derivative order must be 1, 2 or 3");
  }
  switch (type) {
    case Activation::Sigmoid: {
      const double s = sigmoid(y);
      const double d1 = s * (1.0 - s);
      if (order == 1) return d1;
      if (order == 2) return d1 * (1.0 - 2.0 * s);
      return d1 * (1.0 - 6.0 * d1);
    }
    case Activation::Tanh: {
      const double t = std::tanh(y);
      const double d1 = 1.0 - t * t;
      if (order == 1) return d1;
      if (order == 2) return -2.0 * t * d1;
      return -2.0 * d1 * (1.0 - 3.0 * t * t);
    }
    case Activation::ELU:
      // h' has a kink at 0; the right derivative is used there.
      if (y > 0.0) return order == 1 ? 1.0 : 0.0;
      return std::exp(y);
    case Activation::Identity:
      return order == 1 ? 1.0 : 0.0;
    case Activation::ReLU:
    case Activation::MaxPool:
      break;
  }
  throw UnsupportedActivationError("derivatives are undefined for non-smooth activations");
}

Layer::Layer(Matrix weights, Vector bias, ActivationKind activation)
    : weights_(std::move(weights)), bias_(std::move(bias)), activation_(activation) {
  if (weights_.rows() != bias_.size()) {
    throw ShapeError("weights have " + std::to_string(weights_.rows()) +
                     " rows but bias has length " + std::to_string(bias_.size()));
  }
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw ShapeError("layer weights must be non-empty");
  }
  require_finite(weights_, "weights");
  require_finite(bias_, "bias");
  // Validates the maxpool divisibility.
  activation_.output_width(weights_.rows());
}

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw ShapeError("network needs at least one layer");
  }
  for (std::size_t l = 1; l < layers_.size(); ++l) {
    if (layers_[l - 1].output_width() != layers_[l].input_width()) {
      throw ShapeError("layer " + std::to_string(l - 1) + " outputs width " +
                       std::to_string(layers_[l - 1].output_width()) + " but layer " +
                       std::to_string(l) + " expects " +
                       std::to_string(layers_[l].input_width()));
    }
  }
}

Network Network::prefix(std::size_t count) const {
  if (count == 0 || count > layers_.size()) {
    throw PreconditionError("prefix length out of range");
  }
  return Network(std::vector<Layer>(layers_.begin(), layers_.begin() + count));
}

Vector activation_eval(const ActivationKind& kind, const Vector& y) {
  if (kind.type == Activation::MaxPool) {
    const Index groups = kind.output_width(y.size());
    Vector out(groups);
    for (Index g = 0; g < groups; ++g) {
      out(g) = y.segment(g * kind.group_size, kind.group_size).maxCoeff();
    }
    return out;
  }
  return y.unaryExpr([&](double v) { return activate(kind.type, v); });
}

Vector activation_derivs(const ActivationKind& kind, const Vector& y, int order) {
  if (order != 1 && order != 2) {
    throw PreconditionError("activation_derivs supports order 1 or 2");
  }
  if (!kind.is_smooth()) {
    throw UnsupportedActivationError(to_string(kind) + " has no derivative");
  }
  return y.unaryExpr([&](double v) { return activation_derivative(kind.type, v, order); });
}

Trace forward(const Network& net, const Vector& x) {
  if (x.size() != net.input_width()) {
    throw ShapeError("input has length " + std::to_string(x.size()) + ", network expects " +
                     std::to_string(net.input_width()));
  }
  if (!x.allFinite()) {
    throw PreconditionError("input contains non-finite entries");
  }
  Trace trace;
  trace.post.reserve(net.num_layers() + 1);
  trace.pre.reserve(net.num_layers());
  trace.post.push_back(x);
  for (const Layer& layer : net.layers()) {
    trace.pre.push_back(layer.weights() * trace.post.back() + layer.bias());
    trace.post.push_back(activation_eval(layer.activation(), trace.pre.back()));
  }
  return trace;
}

double grid_sup_abs_derivative(Activation type, int order) {
  constexpr int kPoints = 1'000'000;
  constexpr double kHalfWidth = 10.0;
  double best = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double y = -kHalfWidth + 2.0 * kHalfWidth * i / (kPoints - 1);
    best = std::max(best, std::abs(activation_derivative(type, y, order)));
  }
  return best;
}

SmoothnessConstants smoothness_constants(const ActivationKind& kind) {
  if (kind.type == Activation::Identity) {
    return {0.0, 0.0};
  }
  if (kind.type != Activation::Sigmoid && kind.type != Activation::Tanh) {
    throw UnsupportedActivationError("smoothness constants need sigmoid or tanh, got " +
                                     to_string(kind));
  }
  static std::mutex mutex;
  static std::unordered_map<int, SmoothnessConstants> cache;
  std::lock_guard lock(mutex);
  const int key = static_cast<int>(kind.type);
  if (auto it = cache.find(key); it != cache.end()) {
    return it->second;
  }
  SmoothnessConstants constants{kSmoothnessSafety * grid_sup_abs_derivative(kind.type, 2),
                                kSmoothnessSafety * grid_sup_abs_derivative(kind.type, 3)};
  cache.emplace(key, constants);
  return constants;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

json activation_to_json(const ActivationKind& kind) {
  if (kind.type == Activation::MaxPool) {
    return json{{"maxpool", kind.group_size}};
  }
  return to_string(kind);
}

ActivationKind activation_from_json(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "relu") return ActivationKind::relu();
    if (name == "sigmoid") return ActivationKind::sigmoid();
    if (name == "tanh") return ActivationKind::tanh();
    if (name == "elu") return ActivationKind::elu();
    if (name == "identity") return ActivationKind::identity();
    throw FormatError("unknown activation \"" + name + "\"");
  }
  if (j.is_object() && j.size() == 1 && j.contains("maxpool") &&
      j.at("maxpool").is_number_integer()) {
    const auto group = j.at("maxpool").get<long long>();
    if (group < 2) {
      throw FormatError("maxpool group size must be at least 2");
    }
    return ActivationKind::maxpool(static_cast<Index>(group));
  }
  throw FormatError("activation must be a name or {\"maxpool\": g}");
}

Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) {
    throw FormatError(std::string(what) + " must be an array of numbers");
  }
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw FormatError(std::string(what) + " must contain only numbers");
    }
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw FormatError("weights must be a non-empty array of rows");
  }
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector_from_json(j[r], "weights row");
    if (static_cast<std::size_t>(row.size()) != cols) {
      throw ShapeError("weights rows have unequal lengths");
    }
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  return m;
}

}  // namespace

std::string save_network(const Network& net) {
  json layers = json::array();
  for (const Layer& layer : net.layers()) {
    json rows = json::array();
    for (Index r = 0; r < layer.weights().rows(); ++r) {
      rows.push_back(std::vector<double>(layer.weights().row(r).begin(),
                                         layer.weights().row(r).end()));
    }
    layers.push_back({{"weights", rows},
                      {"bias", std::vector<double>(layer.bias().begin(), layer.bias().end())},
                      {"activation", activation_to_json(layer.activation())}});
  }
  return json{{"layers", layers}}.dump(2);
}

Network load_network(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("network document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc.at("layers").is_array()) {
    throw FormatError("network document needs a \"layers\" array");
  }
  std::vector<Layer> layers;
  for (const json& entry : doc.at("layers")) {
    if (!entry.is_object() || !entry.contains("weights") || !entry.contains("bias") ||
        !entry.contains("activation")) {
      throw FormatError("each layer needs weights, bias and activation");
    }
    layers.emplace_back(matrix_from_json(entry.at("weights")),
                        vector_from_json(entry.at("bias"), "bias"),
                        activation_from_json(entry.at("activation")));
  }
  return Network(std::move(layers));
}

}  // namespace dualverify
