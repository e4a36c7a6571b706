// Command-line front end: predict, generate, verify, sweep, regime.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.
// The default seed is the fixed constant 0x6B726F6E (1802661742) so bare
// invocations are reproducible; --seed overrides. KRON_MAX_DENSE_K overrides
// the dense-sampler cap.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kron/kron.hpp"

namespace {

constexpr std::uint64_t kDefaultSeed = 0x6B726F6E;  // "kron"

int dense_cap() {
  const char* text = std::getenv("KRON_MAX_DENSE_K");
  if (text == nullptr || *text == '\0') return kron::kDenseSamplerMaxK;
  int value = 0;
  const char* end = text + std::string_view(text).size();
  const auto [ptr, ec] = std::from_chars(text, end, value);
  if (ec != std::errc{} || ptr != end || value < 1) {
    throw kron::range_violation("KRON_MAX_DENSE_K must be a positive integer");
  }
  return value;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kron::io_error("cannot open for writing: " + path);
  out << text;
  out.flush();
  if (!out) throw kron::io_error("write failed: " + path);
}

const char* bool_name(bool value) { return value ? "true" : "false"; }

void append_regime_fields_json(std::string& out, const kron::RegimeReport& regime,
                               const char* indent) {
  out += indent;
  out += "\"no_isolated_whp\": ";
  out += bool_name(regime.no_isolated_whp);
  out += ",\n";
  out += indent;
  out += "\"no_edges_whp\": ";
  out += bool_name(regime.no_edges_whp);
  out += ",\n";
  out += indent;
  out += "\"no_loops_whp\": ";
  out += bool_name(regime.no_loops_whp);
  out += ",\n";
  out += indent;
  out += "\"edge_threshold_margin\": ";
  out += kron::detail::json_number(regime.edge_threshold_margin);
  out += ",\n";
  out += indent;
  out += "\"loop_threshold_margin\": ";
  out += kron::detail::json_number(regime.loop_threshold_margin);
}

void append_regime_fields_csv(std::string& out, const kron::RegimeReport& regime) {
  out += "no_isolated_whp,";
  out += bool_name(regime.no_isolated_whp);
  out += "\nno_edges_whp,";
  out += bool_name(regime.no_edges_whp);
  out += "\nno_loops_whp,";
  out += bool_name(regime.no_loops_whp);
  out += "\nedge_threshold_margin,";
  out += kron::detail::csv_number(regime.edge_threshold_margin);
  out += "\nloop_threshold_margin,";
  out += kron::detail::csv_number(regime.loop_threshold_margin);
  out += '\n';
}

std::string emit_predictions(const kron::ModelParams& params,
                             const std::vector<kron::FeaturePrediction>& predictions,
                             const kron::RegimeReport& regime, kron::ReportFormat format) {
  std::string out;
  if (format == kron::ReportFormat::csv) {
    out += "name,value\n";
    for (const auto& p : predictions) {
      out += p.formula_id;
      out += ',';
      out += kron::detail::csv_number(p.value);
      out += '\n';
    }
    append_regime_fields_csv(out, regime);
    return out;
  }
  out += "{\n  ";
  kron::detail::append_params_json(out, params);
  out += ",\n  \"predictions\": [";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"feature\": \"";
    out += kron::to_string(p.feature);
    out += "\", \"kind\": \"";
    out += kron::to_string(p.kind);
    out += "\", \"value\": ";
    out += kron::detail::json_number(p.value);
    out += ", \"formula\": \"";
    out += p.formula_id;
    out += "\", \"underflowed\": ";
    out += bool_name(p.underflowed);
    out += "}";
  }
  out += "\n  ],\n  \"regime\": {\n";
  append_regime_fields_json(out, regime, "    ");
  out += "\n  }\n}\n";
  return out;
}

std::string emit_regime(const kron::Initiator& theta, const kron::RegimeReport& regime,
                        kron::ReportFormat format) {
  std::string out;
  if (format == kron::ReportFormat::csv) {
    out += "name,value\n";
    append_regime_fields_csv(out, regime);
    return out;
  }
  out += "{\n  \"alpha\": ";
  out += kron::detail::json_number(theta.alpha());
  out += ",\n  \"beta\": ";
  out += kron::detail::json_number(theta.beta());
  out += ",\n  \"gamma\": ";
  out += kron::detail::json_number(theta.gamma());
  out += ",\n";
  append_regime_fields_json(out, regime, "  ");
  out += "\n}\n";
  return out;
}

kron::ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return kron::ReportFormat::json;
  if (name == "csv") return kron::ReportFormat::csv;
  throw kron::range_violation("unsupported format: " + name);
}

struct ThetaFlags {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "initiator entry for two 1 bits")->required();
    cmd->add_option("--beta", beta, "initiator entry for mixed bits")->required();
    cmd->add_option("--gamma", gamma, "initiator entry for two 0 bits")->required();
  }

  kron::Initiator build() const { return kron::Initiator(alpha, beta, gamma); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Stochastic Kronecker graph toolkit: closed-form feature predictions,\n"
      "exact-distribution sampling, Monte Carlo verification, and\n"
      "phase-transition sweeps for the symmetric 2x2 initiator model."};
  app.require_subcommand(1);

  ThetaFlags predict_theta;
  int predict_k = 0;
  std::string predict_format = "json";
  std::string predict_out;
  CLI::App* predict = app.add_subcommand("predict", "print every analytic prediction");
  predict_theta.attach(predict);
  predict->add_option("-k,--levels", predict_k, "Kronecker levels (vertices = 2^k)")->required();
  predict->add_option("--format", predict_format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  predict->add_option("-o,--output", predict_out, "output path (stdout if omitted)");

  ThetaFlags generate_theta;
  int generate_k = 0;
  std::uint64_t generate_seed = kDefaultSeed;
  std::string generate_sampler = "auto";
  std::string generate_out;
  CLI::App* generate = app.add_subcommand("generate", "sample a graph and write an edge list");
  generate_theta.attach(generate);
  generate->add_option("-k,--levels", generate_k, "Kronecker levels (vertices = 2^k)")
      ->required();
  generate->add_option("--seed", generate_seed, "RNG seed (default 1802661742)")
      ->capture_default_str();
  generate->add_option("--sampler", generate_sampler, "sampler choice")
      ->check(CLI::IsMember({"dense", "stratified", "auto"}))
      ->capture_default_str();
  generate->add_option("-o,--output", generate_out, "edge-list output path")->required();

  ThetaFlags verify_theta;
  int verify_k = 0;
  std::uint64_t verify_seed = kDefaultSeed;
  std::uint64_t verify_replicates = 2000;
  std::string verify_sampler = "auto";
  std::string verify_format = "json";
  std::string verify_out;
  int verify_threads = 0;
  CLI::App* verify =
      app.add_subcommand("verify", "Monte Carlo check of the analytic predictions");
  verify_theta.attach(verify);
  verify->add_option("-k,--levels", verify_k, "Kronecker levels (vertices = 2^k)")->required();
  verify->add_option("--replicates", verify_replicates, "independent samples")
      ->capture_default_str();
  verify->add_option("--seed", verify_seed, "RNG seed (default 1802661742)")
      ->capture_default_str();
  verify->add_option("--sampler", verify_sampler, "sampler choice")
      ->check(CLI::IsMember({"dense", "stratified", "auto"}))
      ->capture_default_str();
  verify->add_option("--format", verify_format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  verify->add_option("-o,--output", verify_out, "output path (stdout if omitted)");
  verify->add_option("--threads", verify_threads, "worker threads (0 = hardware)")
      ->capture_default_str();

  ThetaFlags sweep_theta;
  std::vector<int> sweep_k;
  std::string sweep_vary;
  double sweep_start = 0.0;
  double sweep_stop = 0.0;
  int sweep_steps = 0;
  std::string sweep_feature;
  std::uint64_t sweep_replicates = 500;
  std::uint64_t sweep_seed = kDefaultSeed;
  std::string sweep_sampler = "auto";
  std::string sweep_format = "json";
  std::string sweep_out;
  int sweep_threads = 0;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "exact and empirical P[feature absent] across a parameter path");
  sweep_theta.attach(sweep);
  sweep->add_option("-k,--levels", sweep_k, "Kronecker level list, e.g. 4,8,12")
      ->required()
      ->delimiter(',');
  sweep->add_option("--vary", sweep_vary, "parameter to vary")
      ->check(CLI::IsMember({"alpha", "beta", "gamma"}))
      ->required();
  sweep->add_option("--start", sweep_start, "first value of the varied parameter")->required();
  sweep->add_option("--stop", sweep_stop, "last value of the varied parameter")->required();
  sweep->add_option("--steps", sweep_steps, "number of grid points")
      ->check(CLI::PositiveNumber)
      ->required();
  sweep->add_option("--feature", sweep_feature, "feature whose absence is tracked")
      ->check(CLI::IsMember({"edges", "loops"}))
      ->required();
  sweep->add_option("--replicates", sweep_replicates, "samples per grid point")
      ->capture_default_str();
  sweep->add_option("--seed", sweep_seed, "RNG seed (default 1802661742)")
      ->capture_default_str();
  sweep->add_option("--sampler", sweep_sampler, "sampler choice")
      ->check(CLI::IsMember({"dense", "stratified", "auto"}))
      ->capture_default_str();
  sweep->add_option("--format", sweep_format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sweep->add_option("-o,--output", sweep_out, "output path (stdout if omitted)");
  sweep->add_option("--threads", sweep_threads, "worker threads (0 = hardware)")
      ->capture_default_str();

  ThetaFlags regime_theta;
  std::string regime_format = "json";
  std::string regime_out;
  CLI::App* regime = app.add_subcommand("regime", "print the threshold-regime report");
  regime_theta.attach(regime);
  regime->add_option("--format", regime_format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  regime->add_option("-o,--output", regime_out, "output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*predict) {
      const kron::ModelParams params(predict_theta.build(), predict_k);
      const auto predictions = kron::all_predictions(params);
      const auto regime_info = kron::regime_report(params.theta());
      write_output(emit_predictions(params, predictions, regime_info,
                                    parse_report_format(predict_format)),
                   predict_out);
    } else if (*generate) {
      const kron::ModelParams params(generate_theta.build(), generate_k);
      const auto sample =
          kron::sample(params, kron::RngSeed{generate_seed, 0},
                       kron::parse_sampler_kind(generate_sampler), dense_cap());
      kron::write_edge_list_file(generate_out, sample);
    } else if (*verify) {
      const kron::ModelParams params(verify_theta.build(), verify_k);
      const auto report = kron::run_monte_carlo(params, verify_replicates,
                                                kron::RngSeed{verify_seed, 0},
                                                kron::parse_sampler_kind(verify_sampler),
                                                verify_threads, dense_cap());
      write_output(kron::emit_report(report, parse_report_format(verify_format)), verify_out);
    } else if (*sweep) {
      const kron::Initiator base = sweep_theta.build();
      kron::SweepSpec spec;
      spec.k_values = sweep_k;
      spec.replicates = sweep_replicates;
      spec.seed = kron::RngSeed{sweep_seed, 0};
      spec.feature =
          sweep_feature == "edges" ? kron::SweepFeature::edges : kron::SweepFeature::loops;
      spec.sampler = kron::parse_sampler_kind(sweep_sampler);
      for (int i = 0; i < sweep_steps; ++i) {
        const double value =
            sweep_steps == 1
                ? sweep_start
                : sweep_start + (sweep_stop - sweep_start) * i / (sweep_steps - 1.0);
        const double a = sweep_vary == "alpha" ? value : base.alpha();
        const double b = sweep_vary == "beta" ? value : base.beta();
        const double g = sweep_vary == "gamma" ? value : base.gamma();
        spec.thetas.emplace_back(a, b, g);
      }
      const auto report = kron::run_sweep(spec, sweep_threads, dense_cap());
      write_output(kron::emit_report(report, parse_report_format(sweep_format)), sweep_out);
    } else if (*regime) {
      const kron::Initiator theta = regime_theta.build();
      write_output(emit_regime(theta, kron::regime_report(theta),
                               parse_report_format(regime_format)),
                   regime_out);
    }
  } catch (const kron::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const kron::model_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
