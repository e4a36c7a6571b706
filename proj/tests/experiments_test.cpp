#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "kron/experiments.hpp"

using Catch::Approx;

namespace {

kron::ModelParams make(double a, double b, double g, int k) {
  return kron::ModelParams(kron::Initiator(a, b, g), k);
}

const kron::FeatureStat& stat(const kron::MonteCarloReport& report,
                              const std::string& name) {
  for (const auto& f : report.features) {
    if (f.feature == name) return f;
  }
  FAIL("missing feature " << name);
  return report.features.front();
}

}  // namespace

TEST_CASE("monte carlo runs pin down the degenerate graphs", "[experiments]") {
  const auto full = kron::run_monte_carlo(make(1, 1, 1, 2), 10, kron::RngSeed{1, 0});
  REQUIRE(full.replicates == 10);
  REQUIRE(full.sampler == kron::SamplerKind::dense);
  const auto& loops = stat(full, "self_loops");
  REQUIRE(loops.empirical_mean == 4.0);
  REQUIRE(loops.std_error == 0.0);
  REQUIRE(loops.analytic_value == Approx(4.0));
  REQUIRE_FALSE(loops.z_score.has_value());  // zero variance, z undefined

  const auto empty = kron::run_monte_carlo(make(0, 0, 0, 3), 5, kron::RngSeed{1, 0});
  REQUIRE(stat(empty, "isolated_vertices").empirical_mean == 8.0);
  REQUIRE(stat(empty, "edges").empirical_mean == 0.0);
  for (const auto& f : empty.features) REQUIRE(f.std_error == 0.0);

  REQUIRE_THROWS_AS(kron::run_monte_carlo(make(1, 1, 1, 2), 1, kron::RngSeed{1, 0}),
                    kron::range_violation);
}

TEST_CASE("monte carlo means track the analytic values", "[experiments]") {
  const auto report =
      kron::run_monte_carlo(make(0.8, 0.6, 0.4, 5), 500, kron::RngSeed{2026, 0});
  for (const char* name : {"isolated_vertices", "edges", "self_loops", "triangles"}) {
    const auto& f = stat(report, name);
    REQUIRE(f.analytic_kind == kron::PredictionKind::exact);  // k = 5 keeps triangles exact
    REQUIRE(f.z_score.has_value());
    REQUIRE(std::abs(*f.z_score) <= 5.0);
  }
  REQUIRE(report.wall_time_seconds > 0.0);
}

TEST_CASE("triangle analytics switch to the bound beyond the oracle cap", "[experiments]") {
  const auto report =
      kron::run_monte_carlo(make(0.6, 0.4, 0.2, 8), 50, kron::RngSeed{3, 0});
  const auto& triangles = stat(report, "triangles");
  REQUIRE(triangles.analytic_kind == kron::PredictionKind::upper_bound);
  REQUIRE_FALSE(triangles.z_score.has_value());
  REQUIRE(triangles.empirical_mean <= triangles.analytic_value);
}

TEST_CASE("monte carlo reduction is schedule independent", "[experiments]") {
  const auto params = make(0.8, 0.55, 0.3, 6);
  const auto serial = kron::run_monte_carlo(params, 200, kron::RngSeed{7, 0},
                                            kron::SamplerKind::auto_select, 1);
  const auto parallel = kron::run_monte_carlo(params, 200, kron::RngSeed{7, 0},
                                              kron::SamplerKind::auto_select, 8);
  REQUIRE(serial.features == parallel.features);
  REQUIRE(serial.sampler == kron::SamplerKind::dense);
}

TEST_CASE("sweeps validate their specification", "[experiments]") {
  kron::SweepSpec spec;
  spec.k_values = {4};
  REQUIRE_THROWS_AS(kron::run_sweep(spec), kron::range_violation);  // no thetas
  spec.thetas = {kron::Initiator(0.4, 0.3, 0.2)};
  spec.k_values = {};
  REQUIRE_THROWS_AS(kron::run_sweep(spec), kron::range_violation);  // no k
  spec.k_values = {4};
  spec.replicates = 0;
  REQUIRE_THROWS_AS(kron::run_sweep(spec), kron::range_violation);
}

TEST_CASE("sweep rows carry exact probabilities, margins, and order", "[experiments]") {
  kron::SweepSpec spec;
  spec.thetas = {kron::Initiator(0.4, 0.3, 0.2), kron::Initiator(0.3, 0.25, 0.1)};
  spec.k_values = {6, 4};
  spec.replicates = 40;
  spec.seed = kron::RngSeed{11, 0};
  spec.feature = kron::SweepFeature::edges;
  const auto report = kron::run_sweep(spec);

  REQUIRE(report.rows.size() == 4);
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& prev = report.rows[i - 1];
    const auto& row = report.rows[i];
    const bool ordered = prev.threshold_margin < row.threshold_margin ||
                         (prev.threshold_margin == row.threshold_margin && prev.k <= row.k);
    REQUIRE(ordered);
  }
  for (const auto& row : report.rows) {
    const auto params = kron::ModelParams(row.theta, row.k);
    REQUIRE(row.exact_p_zero == kron::prob_no_edges_exact(params, false));
    REQUIRE(row.threshold_margin == Approx(row.theta.edge_mass() - 1.0));
    REQUIRE(row.empirical_p_zero >= 0.0);
    REQUIRE(row.empirical_p_zero <= 1.0);
    REQUIRE(row.exact_p_zero >= 0.0);
    REQUIRE(row.exact_p_zero <= 1.0);
  }

  spec.feature = kron::SweepFeature::loops;
  const auto loops = kron::run_sweep(spec);
  for (const auto& row : loops.rows) {
    REQUIRE(row.exact_p_zero ==
            kron::prob_no_loops_exact(kron::ModelParams(row.theta, row.k)));
    REQUIRE(row.threshold_margin == Approx(row.theta.loop_mass() - 1.0));
  }
}

TEST_CASE("sweep empirics are exact on deterministic graphs", "[experiments]") {
  kron::SweepSpec spec;
  spec.thetas = {kron::Initiator(0, 0, 0), kron::Initiator(1, 1, 1)};
  spec.k_values = {3};
  spec.replicates = 25;
  spec.feature = kron::SweepFeature::edges;
  const auto report = kron::run_sweep(spec);
  REQUIRE(report.rows.size() == 2);
  REQUIRE(report.rows.front().exact_p_zero == 1.0);      // theta = 0 sorts first
  REQUIRE(report.rows.front().empirical_p_zero == 1.0);
  REQUIRE(report.rows.front().ci_halfwidth == 0.0);
  REQUIRE(report.rows.back().exact_p_zero == 0.0);
  REQUIRE(report.rows.back().empirical_p_zero == 0.0);
}

TEST_CASE("exact zero probability is monotone along a growing path", "[experiments]") {
  kron::SweepSpec spec;
  for (int i = 0; i <= 4; ++i) {
    const double t = i / 4.0;
    spec.thetas.emplace_back(0.2 + 0.7 * t, 0.1 + 0.5 * t, 0.05 + 0.25 * t);
  }
  spec.k_values = {8};
  spec.replicates = 10;
  for (const auto feature : {kron::SweepFeature::edges, kron::SweepFeature::loops}) {
    spec.feature = feature;
    const auto report = kron::run_sweep(spec);
    // Rows sort by threshold margin, which grows along the path.
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
      REQUIRE(report.rows[i].exact_p_zero <= report.rows[i - 1].exact_p_zero + 1e-15);
    }
  }
}

TEST_CASE("sweep replicates stay within the binomial confidence band", "[experiments]") {
  kron::SweepSpec spec;
  spec.thetas = {kron::Initiator(0.3, 0.25, 0.1)};
  spec.k_values = {8};
  spec.replicates = 400;
  spec.seed = kron::RngSeed{17, 0};
  spec.feature = kron::SweepFeature::edges;
  const auto report = kron::run_sweep(spec);
  const auto& row = report.rows.front();
  // Generous 3x band: this is a smoke check, the calibrated coverage test
  // lives in the acceptance suite.
  const double sigma = std::sqrt(row.exact_p_zero * (1.0 - row.exact_p_zero) / 400.0);
  REQUIRE(std::abs(row.empirical_p_zero - row.exact_p_zero) <= 3.0 * sigma + 1e-12);
  REQUIRE(row.ci_halfwidth == Approx(1.96 * std::sqrt(row.empirical_p_zero *
                                                      (1.0 - row.empirical_p_zero) / 400.0)));
}

TEST_CASE("monte carlo reports round trip through json", "[experiments]") {
  const auto report =
      kron::run_monte_carlo(make(0.8, 0.6, 0.4, 4), 50, kron::RngSeed{23, 0});
  const std::string text = kron::emit_report(report, kron::ReportFormat::json);
  REQUIRE(kron::parse_monte_carlo_report(text) == report);
  REQUIRE(kron::emit_report(report, kron::ReportFormat::json) == text);

  // A bound row (no z) must survive the trip too.
  const auto big = kron::run_monte_carlo(make(0.6, 0.4, 0.2, 8), 10, kron::RngSeed{23, 0});
  REQUIRE(kron::parse_monte_carlo_report(kron::emit_report(big, kron::ReportFormat::json)) ==
          big);

  REQUIRE_THROWS_AS(kron::parse_monte_carlo_report("not json"), kron::parse_error);
  REQUIRE_THROWS_AS(kron::parse_monte_carlo_report("{\"params\": {}}"), kron::parse_error);
}

TEST_CASE("report emission is deterministic and shaped as documented", "[experiments]") {
  const auto report =
      kron::run_monte_carlo(make(0.8, 0.6, 0.4, 4), 25, kron::RngSeed{29, 0});
  const std::string csv = kron::emit_report(report, kron::ReportFormat::csv);
  REQUIRE(csv == kron::emit_report(report, kron::ReportFormat::csv));
  REQUIRE(csv.rfind("feature,empirical_mean,std_error,analytic_value,analytic_kind,z_score\n",
                    0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 features
  REQUIRE(csv.find('\r') == std::string::npos);

  kron::SweepReport empty;
  REQUIRE(kron::emit_report(empty, kron::ReportFormat::csv) ==
          "alpha,beta,gamma,k,threshold_margin,exact_p_zero,empirical_p_zero,ci_halfwidth\n");

  kron::SweepReport one_row;
  one_row.rows.push_back(kron::SweepRow{kron::Initiator(0.5, 0.4, 0.3), 4, -0.4, 0.5, 0.5,
                                        1.0 / 3.0});
  const std::string one = kron::emit_report(one_row, kron::ReportFormat::csv);
  REQUIRE(std::count(one.begin(), one.end(), '\n') == 2);

  // JSON numbers carry enough digits to reconstruct the doubles exactly.
  const std::string json_text = kron::emit_report(one_row, kron::ReportFormat::json);
  REQUIRE(json_text.find("\"empirical_p_zero\": 0.5") != std::string::npos);
  REQUIRE(json_text.find("\"ci_halfwidth\": 0.33333333333333331") != std::string::npos);
}
