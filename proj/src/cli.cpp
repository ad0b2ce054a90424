#include "dualverify/cli.hpp"

#include "dualverify/errors.hpp"
#include "dualverify/oracles.hpp"
#include "dualverify/parallel.hpp"
#include "dualverify/single_layer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

namespace dualverify::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class UsageError : public Error {
 public:
  using Error::Error;
};

void emit(const RunConfig& run, const Json& doc, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (run.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(run.out_path, std::ios::binary);
  if (!file) throw FormatError("cannot write \"" + run.out_path + "\"");
  file << text;
}

void require_path(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string("missing required flag ") + flag);
}

int exit_code(const VerdictReport& report) {
  if (report.any_falsified()) return kExitFalsified;
  if (report.all_verified()) return kExitVerified;
  return kExitUnknown;
}

void check_single_layer(const Network& net, const VerificationSpec& spec) {
  const auto* ball = std::get_if<NormBall>(&spec.input_set.variant());
  if (ball == nullptr || ball->p != Norm::L2) {
    throw UsageError("fixed-point and trust-region methods need a 2-norm ball input set");
  }
  if (net.num_layers() != 2 || net.layer(1).activation().type != Activation::Identity) {
    throw UsageError("fixed-point and trust-region methods need one hidden layer and a linear output");
  }
  const Activation hidden = net.layer(0).activation().type;
  if (hidden != Activation::Sigmoid && hidden != Activation::Tanh) {
    throw UsageError("fixed-point and trust-region methods need a sigmoid or tanh hidden layer");
  }
}

ConstraintVerdict fixed_point_verdict(const SingleLayerProblem& problem) {
  const FixedPointResult fp = fixed_point_verify(problem);
  ConstraintVerdict v;
  v.lower_bound = fp.value;
  v.upper_bound = kInf;
  v.iterations_used = static_cast<int>(fp.iterates.size()) - 1;
  if (fp.guaranteed && fp.converged) {
    // Distance to the fixed point is at most r / (1 - r) times the last step;
    // the objective's gradient norm on the ball is at most nu + eps * L.
    const SmoothnessData s = smoothness(problem);
    const double r = s.contraction_bound(problem.eps);
    const double last = fp.iterates.size() < 2
                            ? 0.0
                            : (fp.iterates.back() - fp.iterates[fp.iterates.size() - 2]).norm();
    v.upper_bound = fp.value + (s.nu + problem.eps * s.lipschitz) * r / (1.0 - r) * last;
  }
  v.status = status_from_bounds(v.upper_bound, v.lower_bound);
  return v;
}

ConstraintVerdict trust_region_verdict(const SingleLayerProblem& problem) {
  const TrustRegionBound tr = trust_region_bound(problem);
  ConstraintVerdict v;
  v.upper_bound = tr.upper_bound;
  v.lower_bound = problem.objective(problem.x_nom + tr.z_star);
  v.status = status_from_bounds(v.upper_bound, v.lower_bound);
  return v;
}

VerdictReport run_method(const Network& net, const VerificationSpec& spec, const RunConfig& run) {
  VerifyConfig config = make_verify_config(run);
  switch (run.method) {
    case Method::Dual:
      return verify(net, spec, config);
    case Method::Interval:
      config.dual.iterations = 0;
      config.tighten_iterations = 0;
      return verify(net, spec, config);
    case Method::Attack: {
      VerdictReport report;
      for (const auto& constraint : spec.constraints) {
        ConstraintVerdict v;
        v.upper_bound = kInf;
        v.lower_bound = pgd_attack(net, constraint, spec.input_set, config.attack).value;
        v.status = status_from_bounds(v.upper_bound, v.lower_bound);
        report.constraints.push_back(v);
      }
      return report;
    }
    case Method::Oracle: {
      const int resolution = spec.input_set.dimension() <= 2 ? 200 : 60;
      VerdictReport report;
      for (const auto& constraint : spec.constraints) {
        const GridResult grid = grid_oracle(net, constraint, spec.input_set, resolution);
        ConstraintVerdict v;
        v.lower_bound = grid.value;
        v.upper_bound = grid.value + grid.error_bar;
        v.status = status_from_bounds(v.upper_bound, v.lower_bound);
        report.constraints.push_back(v);
      }
      return report;
    }
    case Method::FixedPoint:
    case Method::TrustRegion: {
      check_single_layer(net, spec);
      const auto& ball = std::get<NormBall>(spec.input_set.variant());
      VerdictReport report;
      for (const auto& constraint : spec.constraints) {
        const SingleLayerProblem problem =
            fold_output_layer(net, constraint.c, constraint.d, ball.center, ball.radius);
        report.constraints.push_back(run.method == Method::FixedPoint
                                         ? fixed_point_verdict(problem)
                                         : trust_region_verdict(problem));
      }
      return report;
    }
  }
  throw UsageError("unknown method");
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "dual") return Method::Dual;
  if (name == "interval") return Method::Interval;
  if (name == "fixed-point") return Method::FixedPoint;
  if (name == "trust-region") return Method::TrustRegion;
  if (name == "attack") return Method::Attack;
  if (name == "oracle") return Method::Oracle;
  throw UsageError("unknown method \"" + name + "\"");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Dual: return "dual";
    case Method::Interval: return "interval";
    case Method::FixedPoint: return "fixed-point";
    case Method::TrustRegion: return "trust-region";
    case Method::Attack: return "attack";
    case Method::Oracle: return "oracle";
  }
  return "dual";
}

VerifyConfig make_verify_config(const RunConfig& run) {
  if (run.iterations < 0) throw UsageError("--iters must be non-negative");
  if (run.tighten < 0) throw UsageError("--tighten must be non-negative");
  VerifyConfig config;
  config.dual.iterations = run.iterations;
  config.tighten_iterations = run.tighten;
  config.attack.seed = run.seed;
  config.workers = run.workers == 0 ? default_workers() : run.workers;
  return config;
}

int cmd_verify(const RunConfig& run, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_path(run.net_path, "--net");
    require_path(run.spec_path, "--spec");
    const Network net = load_network(read_text_file(run.net_path));
    const VerificationSpec spec = spec_from_json(read_json_file(run.spec_path));
    spec.validate(net);
    if (run.method == Method::Oracle && spec.input_set.dimension() > kMaxGridDimension) {
      throw UsageError("oracle method supports input dimension <= " +
                       std::to_string(kMaxGridDimension) + ", got " +
                       std::to_string(spec.input_set.dimension()));
    }
    if (run.method == Method::FixedPoint || run.method == Method::TrustRegion) {
      check_single_layer(net, spec);
    }
    const VerdictReport report = run_method(net, spec, run);
    emit(run, report_to_json(report, to_string(run.method)), out);
    return exit_code(report);
  });
}

int cmd_certify_dataset(const RunConfig& run, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_path(run.net_path, "--net");
    require_path(run.dataset_path, "--dataset");
    if (!std::isfinite(run.epsilon) || run.epsilon < 0.0) {
      throw UsageError("--epsilon must be finite and non-negative");
    }
    const Network net = load_network(read_text_file(run.net_path));
    const auto dataset = dataset_from_json(read_json_file(run.dataset_path));
    for (const auto& ex : dataset) {
      if (ex.x.size() != net.input_width()) {
        throw ShapeError("dataset example does not match the network input width");
      }
    }
    const ErrorRates rates =
        certified_error_rate(net, dataset, run.epsilon, run.norm, make_verify_config(run));
    if (rates.certified_upper < rates.attack_lower) {
      throw std::logic_error("certified upper rate below attack lower rate");
    }
    Json doc = {{"schema_version", kSchemaVersion},
                {"epsilon", run.epsilon},
                {"norm", to_string(run.norm)},
                {"count", rates.count},
                {"clean_error", rates.clean_error},
                {"certified_upper", rates.certified_upper},
                {"attack_lower", rates.attack_lower}};
    if (rates.empty_dataset) doc["warning"] = "empty dataset; rates reported as 0";
    emit(run, doc, out);
    return 0;
  });
}

Json switches_report(const std::vector<std::set<Index>>& upper_sets,
                     const std::vector<std::set<Index>>& lower_sets) {
  auto sets_json = [](const std::vector<std::set<Index>>& sets) {
    Json j = Json::array();
    for (const auto& s : sets) j.push_back(std::vector<Index>(s.begin(), s.end()));
    return j;
  };
  return {{"schema_version", kSchemaVersion},
          {"timesteps", upper_sets.size()},
          {"max_switches_upper", max_label_switches(upper_sets)},
          {"max_switches_lower", max_label_switches(lower_sets)},
          {"reachable_upper", sets_json(upper_sets)},
          {"reachable_lower", sets_json(lower_sets)}};
}

int cmd_switches(const RunConfig& run, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_path(run.net_path, "--net");
    require_path(run.features_path, "--features");
    if (!std::isfinite(run.epsilon) || run.epsilon < 0.0) {
      throw UsageError("--epsilon must be finite and non-negative");
    }
    const Network net = load_network(read_text_file(run.net_path));
    const auto sequence = sequence_from_json(read_json_file(run.features_path));
    VerifyConfig config = make_verify_config(run);
    const unsigned workers = config.workers;
    config.workers = 1;
    std::vector<std::set<Index>> upper(sequence.size()), lower(sequence.size());
    parallel_for(sequence.size(), workers, [&](std::size_t t) {
      ReachableLabels r = reachable_labels(net, sequence[t], run.epsilon, run.norm, config);
      upper[t] = std::move(r.upper);
      lower[t] = std::move(r.lower);
    });
    emit(run, switches_report(upper, lower), out);
    return 0;
  });
}

}  // namespace dualverify::cli
