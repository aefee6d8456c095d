// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "qcbind/metrics.hpp"
#include "qcbind/reports.hpp"

using namespace qcbind;

namespace {

std::vector<double> random_vec(detail::Rng& rng, std::size_t n, double lo,
                               double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("rmsd on known pairs", "[metrics]") {
  const std::vector<double> a{1.0, -2.0, 3.0};
  CHECK(metrics::rmsd(a, a) == 0.0);

  const std::vector<double> zeros{0.0, 0.0};
  const std::vector<double> labels{3.0, -1.0};
  CHECK(metrics::rmsd(zeros, labels) ==
        Catch::Approx(std::sqrt(5.0)).margin(1e-12));

  std::vector<double> shifted = a;
  for (double& x : shifted) x += 0.75;
  CHECK(metrics::rmsd(shifted, a) == Catch::Approx(0.75).margin(1e-12));

  const std::vector<double> empty;
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(metrics::rmsd(empty, empty), DomainError);
  CHECK_THROWS_AS(metrics::rmsd(one, two), ShapeError);
}

TEST_CASE("rmsd satisfies the triangle inequality", "[metrics]") {
  detail::Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_vec(rng, 9, -5, 5);
    const auto y = random_vec(rng, 9, -5, 5);
    const auto z = random_vec(rng, 9, -5, 5);
    REQUIRE(metrics::rmsd(x, z) <=
            metrics::rmsd(x, y) + metrics::rmsd(y, z) + 1e-12);
  }
}

TEST_CASE("pcc on known pairs", "[metrics]") {
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK(metrics::pcc(x, x) == Catch::Approx(1.0).margin(1e-12));

  const std::vector<double> anti{6.0, 4.0, 2.0};
  CHECK(metrics::pcc(x, anti) == Catch::Approx(-1.0).margin(1e-12));

  const std::vector<double> one{1.0};
  const std::vector<double> flat{2.0, 2.0, 2.0};
  CHECK_THROWS_AS(metrics::pcc(one, one), DomainError);
  CHECK_THROWS_AS(metrics::pcc(flat, x), DomainError);
}

TEST_CASE("pcc is affine invariant", "[metrics]") {
  detail::Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_vec(rng, 16, -3, 3);
    const auto y = random_vec(rng, 16, -3, 3);
    const double base = metrics::pcc(x, y);
    const double a = rng.uniform(0.1, 4.0);
    const double b = rng.uniform(-10.0, 10.0);
    std::vector<double> up(x.size()), down(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      up[i] = a * x[i] + b;
      down[i] = -a * x[i] + b;
    }
    REQUIRE(std::abs(metrics::pcc(up, y) - base) <= 1e-12);
    REQUIRE(std::abs(metrics::pcc(down, y) + base) <= 1e-12);
  }
}

TEST_CASE("evaluate reports undefined correlations as NaN", "[metrics]") {
  const std::vector<double> flat{1.0, 1.0, 1.0};
  const std::vector<double> labels{0.0, 1.0, 2.0};
  const metrics::Metrics m = metrics::evaluate(flat, labels);
  CHECK(m.rmsd > 0.0);
  CHECK(std::isnan(m.pcc));
  CHECK(metrics::format_metric(m.pcc) == "undefined");
}

TEST_CASE("prediction csv round-trips exactly", "[metrics]") {
  detail::Rng rng(41);
  std::vector<trainer::PredictionRow> rows;
  for (int i = 0; i < 40; ++i)
    rows.push_back({"id-" + std::to_string(i),
                    rng.uniform(-20.0, 0.0) * std::pow(10.0, -(i % 7)),
                    rng.normal(-8.0, 3.0)});
  rows.push_back({"tiny", 1e-300, -1e-300});
  rows.push_back({"zero", 0.0, -0.0});

  const auto parsed =
      metrics::parse_predictions_csv(metrics::predictions_csv_text(rows));
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(parsed[i].id == rows[i].id);
    REQUIRE(parsed[i].dg_true == rows[i].dg_true);
    REQUIRE(parsed[i].dg_pred == rows[i].dg_pred);
  }
  CHECK_THROWS_AS(metrics::parse_predictions_csv("nope\n"), ParseError);
}

TEST_CASE("trajectory csv round-trips exactly", "[metrics]") {
  std::vector<trainer::TrajectoryPoint> traj{{100, 7.25},
                                             {200, 6.033333333333333},
                                             {300, 5.5e-2}};
  const auto parsed =
      metrics::parse_trajectory_csv(metrics::trajectory_csv_text(traj));
  REQUIRE(parsed.size() == 3);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(parsed[i].step == traj[i].step);
    REQUIRE(parsed[i].train_rmsd == traj[i].train_rmsd);
  }

  // Empty trajectory -> header only.
  CHECK(metrics::trajectory_csv_text({}) == "step,train_rmsd\n");
  CHECK(metrics::parse_trajectory_csv("step,train_rmsd\n").empty());
}

TEST_CASE("emit_reports writes the three report files", "[metrics]") {
  trainer::RunRecord run;
  run.arch = forward::builtin_arch("fig1a");
  run.config.lr = 1e-3;
  run.config.seed = 9;
  run.trajectory = {{100, 5.0}, {200, 4.0}};
  run.initial_train = {8.0, 0.1};
  run.initial_test = {8.5, 0.05};
  run.final_train = {2.0, 0.6};
  run.final_test = {2.4, 0.5};
  run.test_predictions = {{"a", -7.0, -6.5}, {"b", -9.0, -8.25}};

  const std::string dir =
      (std::filesystem::temp_directory_path() / "qcbind_reports_test")
          .string();
  std::filesystem::remove_all(dir);
  metrics::emit_reports(run, dir);

  const auto preds =
      metrics::parse_predictions_csv(io::read_text_file(dir +
                                                        "/predictions.csv"));
  REQUIRE(preds.size() == 2);
  CHECK(preds[1].dg_pred == -8.25);

  const auto traj =
      metrics::parse_trajectory_csv(io::read_text_file(dir +
                                                       "/trajectory.csv"));
  REQUIRE(traj.size() == 2);

  const std::string summary = io::read_text_file(dir + "/summary.txt");
  CHECK(summary.find("fig1a") != std::string::npos);
  CHECK(summary.find("258 total, 114 independent (*)") != std::string::npos);
  CHECK(summary.find("final test") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep summary carries a mean +- std block", "[metrics]") {
  trainer::SweepResult result;
  result.runs = {{1e-3, 1, {2.0, 0.5}, {2.5, 0.4}},
                 {1e-4, 1, {2.2, 0.55}, {2.7, 0.45}}};
  result.train_rmsd = trainer::aggregate(std::vector<double>{2.0, 2.2});
  result.train_pcc = trainer::aggregate(std::vector<double>{0.5, 0.55});
  result.test_rmsd = trainer::aggregate(std::vector<double>{2.5, 2.7});
  result.test_pcc = trainer::aggregate(std::vector<double>{0.4, 0.45});

  const std::string text =
      metrics::sweep_summary_text(forward::builtin_arch("fig1c"), result);
  CHECK(text.find("mean +- std over 2 runs") != std::string::npos);
  CHECK(text.find("2050 (994)") != std::string::npos);
  CHECK(text.find("+-") != std::string::npos);

  // A single run aggregates with zero spread.
  const auto single = trainer::aggregate(std::vector<double>{3.25});
  CHECK(single.mean == 3.25);
  CHECK(single.stddev == 0.0);
  // Constant runs keep the constant and zero spread.
  const auto constant = trainer::aggregate(std::vector<double>{1.5, 1.5, 1.5});
  CHECK(constant.mean == 1.5);
  CHECK(constant.stddev == 0.0);
}
