#include "dualverify/io.hpp"

#include "dualverify/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dualverify {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw FormatError(std::string("missing field \"") + name + "\"");
  }
  return j.at(name);
}

double number_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number()) throw FormatError(std::string("field \"") + name + "\" must be a number");
  return v.get<double>();
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FormatError(std::string(what) + " must contain only numbers");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json vector_to_json(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

Norm parse_norm(const std::string& text) {
  if (text == "1") return Norm::L1;
  if (text == "2") return Norm::L2;
  if (text == "inf" || text == "Inf" || text == "infinity") return Norm::Linf;
  throw FormatError("norm must be 1, 2 or inf, got \"" + text + "\"");
}

std::string to_string(Norm p) {
  switch (p) {
    case Norm::L1: return "1";
    case Norm::L2: return "2";
    case Norm::Linf: return "inf";
  }
  return "inf";
}

InputSet input_set_from_json(const Json& j) {
  const Json& type = field(j, "type");
  if (!type.is_string()) throw FormatError("input set \"type\" must be a string");
  const auto name = type.get<std::string>();
  if (name == "box") {
    return InputSet(Box{vector_from_json(field(j, "lower"), "lower"),
                        vector_from_json(field(j, "upper"), "upper")});
  }
  if (name == "norm_ball") {
    const Json& p = field(j, "p");
    Norm norm;
    if (p.is_number_integer()) {
      norm = parse_norm(std::to_string(p.get<long long>()));
    } else if (p.is_string()) {
      norm = parse_norm(p.get<std::string>());
    } else {
      throw FormatError("norm_ball \"p\" must be 1, 2 or \"inf\"");
    }
    return InputSet(
        NormBall{norm, vector_from_json(field(j, "center"), "center"), number_field(j, "radius")});
  }
  if (name == "cardinality") {
    const Json& k = field(j, "k");
    if (!k.is_number_integer()) throw FormatError("cardinality \"k\" must be an integer");
    return InputSet(CardinalityBall{vector_from_json(field(j, "center"), "center"),
                                    number_field(j, "radius"), k.get<Index>()});
  }
  throw FormatError("unknown input set type \"" + name + "\"");
}

Json input_set_to_json(const InputSet& set) {
  if (const auto* box = std::get_if<Box>(&set.variant())) {
    return {{"type", "box"}, {"lower", vector_to_json(box->lower)},
            {"upper", vector_to_json(box->upper)}};
  }
  if (const auto* ball = std::get_if<NormBall>(&set.variant())) {
    Json p = ball->p == Norm::Linf ? Json("inf") : Json(ball->p == Norm::L1 ? 1 : 2);
    return {{"type", "norm_ball"}, {"p", p}, {"center", vector_to_json(ball->center)},
            {"radius", ball->radius}};
  }
  const auto& card = std::get<CardinalityBall>(set.variant());
  return {{"type", "cardinality"}, {"center", vector_to_json(card.center)},
          {"radius", card.radius}, {"k", card.k}};
}

VerificationSpec spec_from_json(const Json& j) {
  VerificationSpec spec{input_set_from_json(field(j, "input_set")), {}};
  const Json& constraints = field(j, "constraints");
  if (!constraints.is_array()) throw FormatError("\"constraints\" must be an array");
  for (const Json& c : constraints) {
    spec.constraints.push_back({vector_from_json(field(c, "c"), "c"),
                                c.contains("d") ? number_field(c, "d") : 0.0});
  }
  if (spec.constraints.empty()) throw FormatError("\"constraints\" must not be empty");
  return spec;
}

Json spec_to_json(const VerificationSpec& spec) {
  Json constraints = Json::array();
  for (const auto& c : spec.constraints) {
    constraints.push_back({{"c", vector_to_json(c.c)}, {"d", c.d}});
  }
  return {{"schema_version", kSchemaVersion},
          {"input_set", input_set_to_json(spec.input_set)},
          {"constraints", constraints}};
}

std::vector<LabeledExample> dataset_from_json(const Json& j) {
  const Json& examples = field(j, "examples");
  if (!examples.is_array()) throw FormatError("\"examples\" must be an array");
  std::vector<LabeledExample> out;
  for (const Json& e : examples) {
    const Json& label = field(e, "label");
    if (!label.is_number_integer()) throw FormatError("\"label\" must be an integer");
    out.push_back({vector_from_json(field(e, "x"), "x"), label.get<Index>()});
  }
  return out;
}

std::vector<Vector> sequence_from_json(const Json& j) {
  const Json& seq = field(j, "sequence");
  if (!seq.is_array()) throw FormatError("\"sequence\" must be an array");
  std::vector<Vector> out;
  for (const Json& x : seq) out.push_back(vector_from_json(x, "sequence entry"));
  return out;
}

Json report_to_json(const VerdictReport& report, const std::string& method) {
  Json constraints = Json::array();
  for (const auto& v : report.constraints) {
    constraints.push_back({{"upper_bound", finite_or_null(v.upper_bound)},
                           {"lower_bound", finite_or_null(v.lower_bound)},
                           {"status", to_string(v.status)},
                           {"iterations_used", v.iterations_used}});
  }
  return {{"schema_version", kSchemaVersion}, {"method", method}, {"constraints", constraints}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError("\"" + path + "\" is not valid JSON: " + e.what());
  }
}

}  // namespace dualverify
