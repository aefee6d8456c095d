// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qcbind/synth.hpp"
#include "qcbind/trainer.hpp"
#include "qcbind/verify.hpp"

using namespace qcbind;
using forward::ModelParams;
using ingest::EncodedState;
using trainer::Gradients;
using trainer::TrainConfig;

namespace {

std::vector<EncodedState> random_batch(detail::Rng& rng,
                                       const forward::ArchitectureSpec& arch,
                                       std::size_t count) {
  std::vector<EncodedState> batch;
  for (std::size_t i = 0; i < count; ++i) {
    EncodedState s;
    s.id = "b" + std::to_string(i);
    s.amplitudes =
        verify::random_unit_state(rng, std::size_t{1} << arch.n_qubits);
    s.label_dg = rng.uniform(-10.0, -4.0);
    batch.push_back(std::move(s));
  }
  return batch;
}

bool params_equal(const ModelParams& a, const ModelParams& b) {
  if (a.w0 != b.w0 || a.w1 != b.w1 ||
      a.raw_filters.size() != b.raw_filters.size())
    return false;
  for (std::size_t k = 0; k < a.raw_filters.size(); ++k)
    if (a.raw_filters[k].entries.data != b.raw_filters[k].entries.data)
      return false;
  return true;
}

// Worst elementwise relative deviation between two gradients, ignoring
// entries where both are below the floor.
double grad_rel_err(const Gradients& a, const Gradients& b, double floor) {
  double worst = 0.0;
  const auto compare = [&](double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    if (scale <= floor) return;
    worst = std::max(worst, std::abs(x - y) / scale);
  };
  for (std::size_t k = 0; k < a.filters.size(); ++k)
    for (std::size_t i = 0; i < a.filters[k].data.size(); ++i)
      compare(a.filters[k].data[i], b.filters[k].data[i]);
  compare(a.w0, b.w0);
  compare(a.w1, b.w1);
  return worst;
}

}  // namespace

TEST_CASE("parameter initialization is seeded and uniform", "[trainer]") {
  const auto& arch = forward::builtin_arch("fig1c");
  const auto a = trainer::init_params(arch, 123);
  const auto b = trainer::init_params(arch, 123);
  CHECK(params_equal(a, b));
  const auto c = trainer::init_params(arch, 124);
  CHECK_FALSE(params_equal(a, c));

  std::size_t scalars = 2;  // readout
  for (const auto& raw : a.raw_filters) {
    scalars += raw.entries.data.size();
    for (double v : raw.entries.data) {
      REQUIRE(v >= 0.0);
      REQUIRE(v < 1.0);
    }
  }
  CHECK(scalars == 2050);
  CHECK(a.w0 >= 0.0);
  CHECK(a.w0 < 1.0);
}

TEST_CASE("mean squared error on known pairs", "[trainer]") {
  CHECK(trainer::loss({{1.0, 2.0}}, {{1.0, 2.0}}) == 0.0);
  CHECK(trainer::loss({{0.0, 0.0}}, {{3.0, -1.0}}) == 5.0);
  CHECK(trainer::loss({{-8.0}}, {{-6.0}}) == 4.0);
  CHECK_THROWS_AS(trainer::loss({}, {}), DomainError);
}

TEST_CASE("readout gradient matches its closed form and finite differences",
          "[trainer]") {
  detail::Rng rng(43);
  const auto& arch = forward::builtin_arch("fig1a");
  const auto params = trainer::init_params(arch, 17);
  const auto batch = random_batch(rng, arch, 4);

  const Gradients g = trainer::grad(params, batch, arch);

  // dL/dw0 = (2/B) sum (pred - label) p0, directly from forward outputs.
  double expected_w0 = 0.0, expected_w1 = 0.0;
  for (const auto& s : batch) {
    const auto pred = forward::forward(s.amplitudes, params, arch);
    expected_w0 += 2.0 * (pred.dg_pred - s.label_dg) * pred.p0 / 4.0;
    expected_w1 += 2.0 * (pred.dg_pred - s.label_dg) * pred.p1 / 4.0;
  }
  CHECK(g.w0 == Catch::Approx(expected_w0).epsilon(1e-12));
  CHECK(g.w1 == Catch::Approx(expected_w1).epsilon(1e-12));

  const Gradients fd = trainer::grad_fd(params, batch, arch);
  CHECK(std::abs(g.w0 - fd.w0) / std::abs(g.w0) <= 1e-6);
  CHECK(std::abs(g.w1 - fd.w1) / std::abs(g.w1) <= 1e-6);
}

TEST_CASE("zero-residual batches give zero gradients", "[trainer]") {
  detail::Rng rng(47);
  const auto& arch = forward::builtin_arch("fig1a");
  const auto params = trainer::init_params(arch, 5);
  auto batch = random_batch(rng, arch, 3);
  for (auto& s : batch)
    s.label_dg = forward::forward(s.amplitudes, params, arch).dg_pred;

  const Gradients g = trainer::grad(params, batch, arch);
  for (const auto& f : g.filters)
    for (double v : f.data) REQUIRE(std::abs(v) <= 1e-10);
  CHECK(std::abs(g.w0) <= 1e-10);
  CHECK(std::abs(g.w1) <= 1e-10);
}

TEST_CASE("analytic gradients match finite differences across arities",
          "[trainer]") {
  detail::Rng rng(53);
  for (const char* name : {"fig1a", "fig1b", "fig1c"}) {
    const auto& arch = forward::builtin_arch(name);
    const auto params = trainer::init_params(arch, rng.next());
    auto batch = random_batch(rng, arch, 4);
    // Keep residuals modest so the finite-difference reference is itself
    // accurate; the differentiation path is residual-independent.
    for (auto& s : batch)
      s.label_dg = forward::forward(s.amplitudes, params, arch).dg_pred +
                   rng.uniform(-0.2, 0.2);
    const Gradients analytic = trainer::grad(params, batch, arch);
    const Gradients fd = trainer::grad_fd(params, batch, arch);
    INFO(name);
    CHECK(grad_rel_err(analytic, fd, 1e-8) <= 1e-4);
  }
}

TEST_CASE("scaling a raw filter changes neither forward nor loss gradients",
          "[trainer]") {
  detail::Rng rng(59);
  const auto& arch = forward::builtin_arch("fig1a");
  auto params = trainer::init_params(arch, 31);
  const auto batch = random_batch(rng, arch, 3);
  const auto base = forward::forward(batch[0].amplitudes, params, arch);

  ModelParams scaled = params;
  for (double& v : scaled.raw_filters[1].entries.data) v *= 3.7;
  const auto same = forward::forward(batch[0].amplitudes, scaled, arch);
  CHECK(std::abs(base.p0 - same.p0) <= 1e-10);
  CHECK(std::abs(base.dg_pred - same.dg_pred) <= 1e-10);

  // The gradient has no component along the pure-scaling direction.
  const Gradients g = trainer::grad(params, batch, arch);
  for (std::size_t k = 0; k < g.filters.size(); ++k) {
    double dot = 0.0;
    for (std::size_t i = 0; i < g.filters[k].data.size(); ++i)
      dot += g.filters[k].data[i] * params.raw_filters[k].entries.data[i];
    REQUIRE(std::abs(dot) <= 1e-8);
  }
}

TEST_CASE("momentum updates follow the classical recurrence", "[trainer]") {
  const auto& arch = forward::builtin_arch("fig1a");
  auto params = trainer::init_params(arch, 1);
  const ModelParams before = params;

  Gradients grads = trainer::zero_gradients(arch);
  Gradients velocity = trainer::zero_gradients(arch);

  // Zero gradients, zero velocity: nothing moves.
  trainer::sgd_step(params, grads, velocity, 0.5, 0.9);
  CHECK(params_equal(params, before));

  // Momentum 0, lr 1: parameters decrease by exactly the gradient.
  grads.filters[0](0, 0) = 0.25;
  grads.w0 = 2.0;
  trainer::sgd_step(params, grads, velocity, 1.0, 0.0);
  CHECK(params.raw_filters[0].entries(0, 0) ==
        before.raw_filters[0].entries(0, 0) - 0.25);
  CHECK(params.w0 == before.w0 - 2.0);

  // Two steps with constant gradient g, momentum 0.9, lr 0.1:
  // displacement 0.1 g + 0.1 (1.9 g) = 0.29 g.
  params = before;
  velocity = trainer::zero_gradients(arch);
  trainer::sgd_step(params, grads, velocity, 0.1, 0.9);
  trainer::sgd_step(params, grads, velocity, 0.1, 0.9);
  CHECK(params.w0 == Catch::Approx(before.w0 - 0.29 * 2.0).margin(1e-15));
  CHECK(params.raw_filters[0].entries(0, 0) ==
        Catch::Approx(before.raw_filters[0].entries(0, 0) - 0.29 * 0.25)
            .margin(1e-15));
}

TEST_CASE("a zero learning rate is a no-op dry run", "[trainer]") {
  const auto data = ingest::synth_dataset(3, 8, 9);
  const auto& arch = forward::builtin_arch("fig1a");
  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.steps = 1;
  cfg.batch_size = 4;
  cfg.seed = 11;
  cfg.eval_interval = 1;
  const auto record = trainer::train(data, data, arch, cfg);
  CHECK(params_equal(record.final_params, trainer::init_params(arch, 11)));
  CHECK(record.final_train.rmsd == record.initial_train.rmsd);
  REQUIRE(record.trajectory.size() == 1);
  CHECK(record.trajectory[0].train_rmsd == record.initial_train.rmsd);
}

TEST_CASE("loss is non-increasing under tiny full-batch steps", "[trainer]") {
  detail::Rng rng(61);
  const auto& arch = forward::builtin_arch("fig1a");
  auto params = trainer::init_params(arch, 7);
  const auto batch = random_batch(rng, arch, 6);
  Gradients velocity = trainer::zero_gradients(arch);

  double prev = trainer::detail::batch_loss(params, batch, arch);
  for (int step = 0; step < 10; ++step) {
    const Gradients g = trainer::grad(params, batch, arch);
    trainer::sgd_step(params, g, velocity, 1e-6, 0.0);
    const double cur = trainer::detail::batch_loss(params, batch, arch);
    REQUIRE(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("training runs are bit-for-bit deterministic", "[trainer]") {
  const auto data = ingest::synth_dataset(21, 40, 9);
  const std::vector<EncodedState> train(data.begin(), data.begin() + 32);
  const std::vector<EncodedState> test(data.begin() + 32, data.end());
  const auto& arch = forward::builtin_arch("fig1a");
  TrainConfig cfg;
  cfg.steps = 25;
  cfg.batch_size = 8;
  cfg.seed = 77;
  cfg.eval_interval = 5;

  const auto a = trainer::train(train, test, arch, cfg);
  const auto b = trainer::train(train, test, arch, cfg);
  CHECK(params_equal(a.final_params, b.final_params));
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  REQUIRE(a.trajectory.size() == 5);  // steps / eval_interval
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory[i].step == b.trajectory[i].step);
    REQUIRE(a.trajectory[i].train_rmsd == b.trajectory[i].train_rmsd);
  }
  CHECK(a.final_test.rmsd == b.final_test.rmsd);
  REQUIRE(a.test_predictions.size() == test.size());
}

TEST_CASE("training rejects mismatched qubit counts", "[trainer]") {
  const auto data = ingest::synth_dataset(4, 4, 9);
  const auto& arch = forward::builtin_arch("fig1f");  // 12 qubits
  TrainConfig cfg;
  cfg.steps = 1;
  CHECK_THROWS_AS(trainer::train(data, data, arch, cfg), ShapeError);
}

TEST_CASE("config validation enforces the documented ranges", "[trainer]") {
  TrainConfig cfg;
  cfg.lr = -1.0;
  CHECK_THROWS_AS(trainer::validate(cfg), ConfigError);
  cfg = {};
  cfg.momentum = 1.0;
  CHECK_THROWS_AS(trainer::validate(cfg), ConfigError);
  cfg = {};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(trainer::validate(cfg), ConfigError);
  cfg = {};
  cfg.steps = 0;
  CHECK_THROWS_AS(trainer::validate(cfg), ConfigError);
  cfg = {};
  CHECK_NOTHROW(trainer::validate(cfg));
}

TEST_CASE("sweep aggregates run metrics", "[trainer]") {
  const auto data = ingest::synth_dataset(33, 24, 9);
  const std::vector<EncodedState> train(data.begin(), data.begin() + 16);
  const std::vector<EncodedState> test(data.begin() + 16, data.end());
  const auto& arch = forward::builtin_arch("fig1a");
  TrainConfig base;
  base.steps = 5;
  base.batch_size = 8;
  base.eval_interval = 5;

  const std::vector<double> lrs{1e-3};
  const std::vector<std::uint64_t> seeds{4};
  const auto single = trainer::sweep(train, test, arch, lrs, seeds, base);
  REQUIRE(single.runs.size() == 1);
  CHECK(single.test_rmsd.stddev == 0.0);
  CHECK(single.test_rmsd.mean == single.runs[0].test.rmsd);

  const std::vector<double> two_lrs{1e-3, 1e-4};
  const auto both = trainer::sweep(train, test, arch, two_lrs, seeds, base);
  REQUIRE(both.runs.size() == 2);
  CHECK(both.runs[0].lr == 1e-3);
  CHECK(both.runs[1].lr == 1e-4);

  CHECK_THROWS_AS(trainer::sweep(train, test, arch, {}, seeds, base),
                  ConfigError);
}
