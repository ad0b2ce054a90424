#pragma once

#include "dualverify/input_sets.hpp"
#include "dualverify/verifier.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dualverify {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Vector vector_from_json(const Json& j, const char* what);
Json vector_to_json(const Vector& v);

// {"type": "box", "lower": [...], "upper": [...]}
// {"type": "norm_ball", "p": 1 | 2 | "inf", "center": [...], "radius": r}
// {"type": "cardinality", "center": [...], "radius": r, "k": k}
InputSet input_set_from_json(const Json& j);
Json input_set_to_json(const InputSet& set);

Norm parse_norm(const std::string& text);
std::string to_string(Norm p);

// {"input_set": {...}, "constraints": [{"c": [...], "d": 0}]}
VerificationSpec spec_from_json(const Json& j);
Json spec_to_json(const VerificationSpec& spec);

// {"examples": [{"x": [...], "label": int}]}
std::vector<LabeledExample> dataset_from_json(const Json& j);

// {"sequence": [[...], [...]]}
std::vector<Vector> sequence_from_json(const Json& j);

Json report_to_json(const VerdictReport& report, const std::string& method);

// Parses a file; FormatError on unreadable or invalid content.
Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

}  // namespace dualverify
