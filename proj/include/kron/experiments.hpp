#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kron/analytic.hpp"
#include "kron/combinatorics.hpp"
#include "kron/errors.hpp"
#include "kron/model.hpp"
#include "kron/rng.hpp"
#include "kron/sampler.hpp"

namespace kron {

enum class ReportFormat { json, csv };

struct FeatureStat {
  std::string feature;
  double empirical_mean = 0.0;
  double std_error = 0.0;
  double analytic_value = 0.0;
  PredictionKind analytic_kind = PredictionKind::exact;
  std::optional<double> z_score;  // omitted for bounds and zero-variance runs

  bool operator==(const FeatureStat&) const = default;
};

struct MonteCarloReport {
  ModelParams params;
  std::uint64_t replicates = 0;
  RngSeed seed;
  SamplerKind sampler = SamplerKind::auto_select;
  std::vector<FeatureStat> features;
  double wall_time_seconds = 0.0;

  bool operator==(const MonteCarloReport&) const = default;
};

enum class SweepFeature { edges, loops };

inline std::string_view to_string(SweepFeature feature) {
  return feature == SweepFeature::edges ? "edges" : "loops";
}

struct SweepSpec {
  std::vector<Initiator> thetas;
  std::vector<int> k_values;
  std::uint64_t replicates = 500;
  RngSeed seed;
  SweepFeature feature = SweepFeature::edges;
  SamplerKind sampler = SamplerKind::auto_select;
};

struct SweepRow {
  Initiator theta;
  int k = 1;
  double threshold_margin = 0.0;
  double exact_p_zero = 0.0;
  double empirical_p_zero = 0.0;
  double ci_halfwidth = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepReport {
  SweepFeature feature = SweepFeature::edges;
  std::uint64_t replicates = 0;
  RngSeed seed;
  SamplerKind sampler = SamplerKind::auto_select;
  std::vector<SweepRow> rows;

  bool operator==(const SweepReport&) const = default;
};

namespace detail {

// Runs fn(r) for every replicate index in [0, count). Each call must be a
// pure function of r writing to its own slot, so the schedule cannot affect
// the result.
template <typename Fn>
void parallel_replicates(std::uint64_t count, int threads, Fn&& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (static_cast<std::uint64_t>(workers) > count) {
    workers = count == 0 ? 1 : static_cast<int>(count);
  }
  if (workers == 1) {
    for (std::uint64_t r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::mutex failure_lock;
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (std::uint64_t r = next.fetch_add(1); r < count; r = next.fetch_add(1)) {
        fn(r);
      }
    } catch (...) {
      const std::lock_guard<std::mutex> hold(failure_lock);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline SamplerKind resolve_sampler(SamplerKind kind, int k) {
  if (kind != SamplerKind::auto_select) return kind;
  return k <= 10 ? SamplerKind::dense : SamplerKind::stratified;
}

// Mean and standard error with a fixed summation tree, so results do not
// depend on thread scheduling.
inline std::pair<double, double> mean_and_std_error(std::span<const double> values) {
  const auto count = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / count;
  std::vector<double> squared(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    squared[i] = d * d;
  }
  const double sample_variance = pairwise_sum(squared) / (count - 1.0);
  return {mean, std::sqrt(sample_variance / count)};
}

}  // namespace detail

inline MonteCarloReport run_monte_carlo(const ModelParams& params, std::uint64_t replicates,
                                        RngSeed seed,
                                        SamplerKind kind = SamplerKind::auto_select,
                                        int threads = 0,
                                        int dense_max_k = kDenseSamplerMaxK,
                                        int triangle_oracle_max_k = kTriangleOracleMaxK) {
  if (replicates < 2) {
    throw range_violation("replicates must be at least 2");
  }
  const auto start = std::chrono::steady_clock::now();
  const SamplerKind resolved = detail::resolve_sampler(kind, params.k());

  std::vector<double> isolated(replicates);
  std::vector<double> edges(replicates);
  std::vector<double> loops(replicates);
  std::vector<double> triangles(replicates);
  detail::parallel_replicates(replicates, threads, [&](std::uint64_t r) {
    const RngSeed stream{seed.value, seed.stream + r};
    const GraphSample g = sample(params, stream, resolved, dense_max_k);
    const FeatureCounts counts = count_features(g);
    isolated[r] = static_cast<double>(counts.isolated);
    edges[r] = static_cast<double>(counts.edges);
    loops[r] = static_cast<double>(counts.loops);
    triangles[r] = static_cast<double>(counts.triangles);
  });

  const FeaturePrediction triangle_prediction =
      params.k() <= triangle_oracle_max_k ? expected_triangles_exact(params, triangle_oracle_max_k)
                                          : triangle_upper_bound(params);
  struct Row {
    std::string_view name;
    std::span<const double> values;
    double analytic;
    PredictionKind kind;
  };
  const Row rows[] = {
      {to_string(Feature::isolated_vertices), isolated, expected_isolated_exact(params).value,
       PredictionKind::exact},
      {to_string(Feature::edges), edges, expected_edges_exact(params).value,
       PredictionKind::exact},
      {to_string(Feature::self_loops), loops, expected_self_loops(params).value,
       PredictionKind::exact},
      {to_string(Feature::triangles), triangles, triangle_prediction.value,
       triangle_prediction.kind},
  };

  MonteCarloReport report{params, replicates, seed, resolved, {}, 0.0};
  report.features.reserve(std::size(rows));
  for (const Row& row : rows) {
    const auto [mean, std_error] = detail::mean_and_std_error(row.values);
    FeatureStat stat{std::string(row.name), mean, std_error, row.analytic, row.kind, {}};
    if (row.kind == PredictionKind::exact && std_error > 0.0) {
      stat.z_score = (mean - row.analytic) / std_error;
    }
    report.features.push_back(std::move(stat));
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline SweepReport run_sweep(const SweepSpec& spec, int threads = 0,
                             int dense_max_k = kDenseSamplerMaxK) {
  if (spec.thetas.empty()) {
    throw range_violation("sweep needs at least one initiator");
  }
  if (spec.k_values.empty()) {
    throw range_violation("sweep needs at least one k");
  }
  if (spec.replicates < 1) {
    throw range_violation("sweep needs at least one replicate per point");
  }

  SweepReport report{spec.feature, spec.replicates, spec.seed, SamplerKind::auto_select, {}};
  std::uint64_t point_index = 0;
  bool all_dense = true;
  bool all_stratified = true;
  for (const Initiator& theta : spec.thetas) {
    for (int k : spec.k_values) {
      const ModelParams params(theta, k);
      const SamplerKind resolved = detail::resolve_sampler(spec.sampler, k);
      (resolved == SamplerKind::dense ? all_stratified : all_dense) = false;

      const double exact = spec.feature == SweepFeature::edges
                               ? prob_no_edges_exact(params, false)
                               : prob_no_loops_exact(params);
      const std::uint64_t base_stream = spec.seed.stream + point_index * spec.replicates;
      std::vector<double> zero(spec.replicates);
      detail::parallel_replicates(spec.replicates, threads, [&](std::uint64_t r) {
        const GraphSample g =
            sample(params, RngSeed{spec.seed.value, base_stream + r}, resolved, dense_max_k);
        const bool empty =
            spec.feature == SweepFeature::edges ? g.edges.empty() : g.loops.empty();
        zero[r] = empty ? 1.0 : 0.0;
      });
      const double p_hat =
          pairwise_sum(zero) / static_cast<double>(spec.replicates);
      const double margin = spec.feature == SweepFeature::edges ? theta.edge_mass() - 1.0
                                                                : theta.loop_mass() - 1.0;
      const double halfwidth =
          1.96 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(spec.replicates));
      report.rows.push_back(SweepRow{theta, k, margin, exact, p_hat, halfwidth});
      ++point_index;
    }
  }
  report.sampler = all_dense       ? SamplerKind::dense
                   : all_stratified ? SamplerKind::stratified
                                    : spec.sampler;
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     if (a.threshold_margin != b.threshold_margin) {
                       return a.threshold_margin < b.threshold_margin;
                     }
                     return a.k < b.k;
                   });
  return report;
}

namespace detail {

// JSON numbers carry 17 significant digits so doubles round-trip exactly.
inline std::string json_number(double value) {
  if (!std::isfinite(value)) return "null";
  char buffer[40];
  const int written = std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return std::string(buffer, static_cast<std::size_t>(written));
}

inline std::string csv_number(double value) {
  if (!std::isfinite(value)) return "nan";
  char buffer[40];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

inline void append_params_json(std::string& out, const ModelParams& params) {
  out += "\"params\": {\"alpha\": ";
  out += json_number(params.theta().alpha());
  out += ", \"beta\": ";
  out += json_number(params.theta().beta());
  out += ", \"gamma\": ";
  out += json_number(params.theta().gamma());
  out += ", \"k\": ";
  out += std::to_string(params.k());
  out += "}";
}

}  // namespace detail

inline std::string emit_report(const MonteCarloReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::csv) {
    out += "feature,empirical_mean,std_error,analytic_value,analytic_kind,z_score\n";
    for (const FeatureStat& f : report.features) {
      out += f.feature;
      out += ',';
      out += detail::csv_number(f.empirical_mean);
      out += ',';
      out += detail::csv_number(f.std_error);
      out += ',';
      out += detail::csv_number(f.analytic_value);
      out += ',';
      out += to_string(f.analytic_kind);
      out += ',';
      if (f.z_score) out += detail::csv_number(*f.z_score);
      out += '\n';
    }
    return out;
  }
  out += "{\n  ";
  detail::append_params_json(out, report.params);
  out += ",\n  \"replicates\": ";
  out += std::to_string(report.replicates);
  out += ",\n  \"seed\": ";
  out += std::to_string(report.seed.value);
  out += ",\n  \"stream\": ";
  out += std::to_string(report.seed.stream);
  out += ",\n  \"sampler\": \"";
  out += to_string(report.sampler);
  out += "\",\n  \"features\": [";
  for (std::size_t i = 0; i < report.features.size(); ++i) {
    const FeatureStat& f = report.features[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"feature\": \"";
    out += f.feature;
    out += "\", \"empirical_mean\": ";
    out += detail::json_number(f.empirical_mean);
    out += ", \"std_error\": ";
    out += detail::json_number(f.std_error);
    out += ", \"analytic_value\": ";
    out += detail::json_number(f.analytic_value);
    out += ", \"analytic_kind\": \"";
    out += to_string(f.analytic_kind);
    out += "\"";
    if (f.z_score) {
      out += ", \"z_score\": ";
      out += detail::json_number(*f.z_score);
    }
    out += "}";
  }
  out += "\n  ],\n  \"wall_time_seconds\": ";
  out += detail::json_number(report.wall_time_seconds);
  out += "\n}\n";
  return out;
}

inline std::string emit_report(const SweepReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::csv) {
    out += "alpha,beta,gamma,k,threshold_margin,exact_p_zero,empirical_p_zero,ci_halfwidth\n";
    for (const SweepRow& row : report.rows) {
      out += detail::csv_number(row.theta.alpha());
      out += ',';
      out += detail::csv_number(row.theta.beta());
      out += ',';
      out += detail::csv_number(row.theta.gamma());
      out += ',';
      out += std::to_string(row.k);
      out += ',';
      out += detail::csv_number(row.threshold_margin);
      out += ',';
      out += detail::csv_number(row.exact_p_zero);
      out += ',';
      out += detail::csv_number(row.empirical_p_zero);
      out += ',';
      out += detail::csv_number(row.ci_halfwidth);
      out += '\n';
    }
    return out;
  }
  out += "{\n  \"feature\": \"";
  out += to_string(report.feature);
  out += "\",\n  \"replicates\": ";
  out += std::to_string(report.replicates);
  out += ",\n  \"seed\": ";
  out += std::to_string(report.seed.value);
  out += ",\n  \"stream\": ";
  out += std::to_string(report.seed.stream);
  out += ",\n  \"sampler\": \"";
  out += to_string(report.sampler);
  out += "\",\n  \"rows\": [";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const SweepRow& row = report.rows[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"alpha\": ";
    out += detail::json_number(row.theta.alpha());
    out += ", \"beta\": ";
    out += detail::json_number(row.theta.beta());
    out += ", \"gamma\": ";
    out += detail::json_number(row.theta.gamma());
    out += ", \"k\": ";
    out += std::to_string(row.k);
    out += ", \"threshold_margin\": ";
    out += detail::json_number(row.threshold_margin);
    out += ", \"exact_p_zero\": ";
    out += detail::json_number(row.exact_p_zero);
    out += ", \"empirical_p_zero\": ";
    out += detail::json_number(row.empirical_p_zero);
    out += ", \"ci_halfwidth\": ";
    out += detail::json_number(row.ci_halfwidth);
    out += "}";
  }
  out += "\n  ]\n}\n";
  return out;
}

inline MonteCarloReport parse_monte_carlo_report(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("bad report JSON: ") + e.what());
  }
  try {
    const auto& p = doc.at("params");
    const ModelParams params(
        Initiator(p.at("alpha").get<double>(), p.at("beta").get<double>(),
                  p.at("gamma").get<double>()),
        p.at("k").get<int>());
    MonteCarloReport report{params,
                            doc.at("replicates").get<std::uint64_t>(),
                            RngSeed{doc.at("seed").get<std::uint64_t>(),
                                    doc.value("stream", std::uint64_t{0})},
                            parse_sampler_kind(doc.at("sampler").get<std::string>()),
                            {},
                            doc.at("wall_time_seconds").get<double>()};
    for (const auto& item : doc.at("features")) {
      FeatureStat stat{item.at("feature").get<std::string>(),
                       item.at("empirical_mean").get<double>(),
                       item.at("std_error").get<double>(),
                       item.at("analytic_value").get<double>(),
                       parse_prediction_kind(item.at("analytic_kind").get<std::string>()),
                       {}};
      if (item.contains("z_score")) stat.z_score = item.at("z_score").get<double>();
      report.features.push_back(std::move(stat));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("bad report fields: ") + e.what());
  }
}

}  // namespace kron
