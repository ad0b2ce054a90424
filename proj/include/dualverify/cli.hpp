#pragma once

#include "dualverify/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dualverify::cli {

enum class Method { Dual, Interval, FixedPoint, TrustRegion, Attack, Oracle };

Method parse_method(const std::string& name);
std::string to_string(Method method);

// Exit codes shared by every command.
inline constexpr int kExitVerified = 0;
inline constexpr int kExitUnknown = 1;
inline constexpr int kExitFalsified = 2;
inline constexpr int kExitUsage = 3;

struct RunConfig {
  std::string net_path;
  std::string spec_path;
  std::string dataset_path;
  std::string features_path;
  std::string out_path;  // empty: standard output
  Method method = Method::Dual;
  int iterations = 200;
  int tighten = 0;  // per-neuron tightening iterations, 0 = off
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0: number of logical processors
  double epsilon = 0.0;
  Norm norm = Norm::Linf;
};

VerifyConfig make_verify_config(const RunConfig& run);

// Writes a VerdictReport. Exit 0 all verified, 2 any falsified, 1 otherwise,
// 3 on usage or IO errors (diagnostic on `err`).
int cmd_verify(const RunConfig& run, std::ostream& out, std::ostream& err);

// Writes {clean_error, certified_upper, attack_lower, ...}.
int cmd_certify_dataset(const RunConfig& run, std::ostream& out, std::ostream& err);

// Writes {max_switches_upper, max_switches_lower, ...}.
int cmd_switches(const RunConfig& run, std::ostream& out, std::ostream& err);

// The switches document for given reachable sets; cmd_switches builds these
// from verification (upper) and attacks (lower).
Json switches_report(const std::vector<std::set<Index>>& upper_sets,
                     const std::vector<std::set<Index>>& lower_sets);

}  // namespace dualverify::cli
