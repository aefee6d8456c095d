// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// SGD-with-momentum training of raw filter entries and readout weights under
// a mean-squared-error loss. Gradients flow through the orthogonality
// projection via the closed-form polar-factor differential; a central
// finite-difference fallback is kept alongside as an independent route.

#ifndef QCBIND_TRAINER_HPP
#define QCBIND_TRAINER_HPP

#include <chrono>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "qcbind/common.hpp"
#include "qcbind/forward.hpp"
#include "qcbind/ingest.hpp"
#include "qcbind/metrics.hpp"

namespace qcbind::trainer {

struct TrainConfig {
  double lr = 1e-3;
  double momentum = 0.9;
  int batch_size = 32;
  long long steps = 10000;
  std::uint64_t seed = 0;
  double init_low = 0.0;
  double init_high = 1.0;
  long long eval_interval = 100;
};

inline void validate(const TrainConfig& cfg) {
  // lr 0 is allowed as a no-op dry run.
  if (!(cfg.lr >= 0.0)) throw ConfigError("lr must be >= 0");
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
    throw ConfigError("momentum must be in [0, 1)");
  if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (cfg.steps < 1) throw ConfigError("steps must be >= 1");
  if (cfg.eval_interval < 1) throw ConfigError("eval_interval must be >= 1");
  if (!(cfg.init_low < cfg.init_high))
    throw ConfigError("init_low must be < init_high");
}

// Every filter entry and both readout weights drawn i.i.d. uniform
// [low, high) from one seeded stream, in layer order then row-major.
inline forward::ModelParams init_params(const forward::ArchitectureSpec& arch,
                                        std::uint64_t seed, double low = 0.0,
                                        double high = 1.0) {
  qcbind::detail::Rng rng(seed);
  forward::ModelParams params;
  params.raw_filters.reserve(arch.layers.size());
  for (const auto& layer : arch.layers) {
    const int side = 1 << layer.arity;
    linalg::RawFilter raw{layer.arity, linalg::Matrix(side, side)};
    for (double& v : raw.entries.data) v = rng.uniform(low, high);
    params.raw_filters.push_back(std::move(raw));
  }
  params.w0 = rng.uniform(low, high);
  params.w1 = rng.uniform(low, high);
  return params;
}

inline double loss(std::span<const double> preds,
                   std::span<const double> labels) {
  metrics::check_pair(preds, labels, "loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i] - labels[i];
    acc += d * d;
  }
  return acc / static_cast<double>(preds.size());
}

// Gradient (or velocity) container congruent to ModelParams.
struct Gradients {
  std::vector<linalg::Matrix> filters;
  double w0 = 0.0;
  double w1 = 0.0;
};

inline Gradients zero_gradients(const forward::ArchitectureSpec& arch) {
  Gradients g;
  g.filters.reserve(arch.layers.size());
  for (const auto& layer : arch.layers) {
    const int side = 1 << layer.arity;
    g.filters.emplace_back(side, side);
  }
  return g;
}

inline void check_batch(std::span<const ingest::EncodedState> batch,
                        const forward::ArchitectureSpec& arch) {
  if (batch.empty()) throw DomainError("empty batch");
  const std::size_t dim = std::size_t{1} << arch.n_qubits;
  for (const auto& s : batch)
    if (s.amplitudes.size() != dim)
      throw ShapeError("sample '" + s.id + "' has " +
                       std::to_string(s.amplitudes.size()) +
                       " amplitudes, architecture '" + arch.name +
                       "' expects " + std::to_string(dim));
}

// Exact gradient of the batch MSE with respect to raw filter entries and
// readout weights. Per sample the linear layers are backpropagated with the
// transposed filters; the per-filter upstream gradients dL/dq are then pulled
// through the projection once per batch.
inline Gradients grad(const forward::ModelParams& params,
                      std::span<const ingest::EncodedState> batch,
                      const forward::ArchitectureSpec& arch) {
  forward::validate_arch(arch);
  forward::check_params_match(params, arch);
  check_batch(batch, arch);

  const auto projected = forward::project_filters(params);
  std::vector<linalg::Matrix> q_transposed;
  q_transposed.reserve(projected.size());
  for (const auto& pf : projected) q_transposed.push_back(pf.q.transposed());

  const std::size_t n_layers = arch.layers.size();
  const std::size_t dim = std::size_t{1} << arch.n_qubits;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  Gradients q_grads = zero_gradients(arch);
  double g_w0 = 0.0, g_w1 = 0.0;

  std::vector<std::vector<double>> trace;
  std::vector<double> g_state(dim);
  for (const auto& sample : batch) {
    const forward::Prediction pred = forward::forward_projected(
        sample.amplitudes, projected, params.w0, params.w1, arch, &trace);
    const double g_pred = 2.0 * (pred.dg_pred - sample.label_dg) * inv_batch;
    g_w0 += g_pred * pred.p0;
    g_w1 += g_pred * pred.p1;

    const std::vector<double>& out = trace.back();
    for (std::size_t i = 0; i < dim; ++i)
      g_state[i] =
          g_pred * 2.0 * out[i] * (i < dim / 2 ? params.w0 : params.w1);

    for (std::size_t k = n_layers; k-- > 0;) {
      linalg::accumulate_filter_grad(q_grads.filters[k], g_state, trace[k],
                                     arch.layers[k].qubits, arch.n_qubits);
      linalg::apply_matrix_on_qubits(g_state, q_transposed[k],
                                     arch.layers[k].qubits, arch.n_qubits);
    }
  }

  Gradients out;
  out.filters.reserve(n_layers);
  for (std::size_t k = 0; k < n_layers; ++k)
    out.filters.push_back(
        linalg::polar_backward(projected[k], q_grads.filters[k]));
  out.w0 = g_w0;
  out.w1 = g_w1;
  return out;
}

namespace detail {

inline double batch_loss(const forward::ModelParams& params,
                         std::span<const ingest::EncodedState> batch,
                         const forward::ArchitectureSpec& arch) {
  const auto projected = forward::project_filters(params);
  double acc = 0.0;
  for (const auto& sample : batch) {
    const auto pred = forward::forward_projected(
        sample.amplitudes, projected, params.w0, params.w1, arch);
    const double d = pred.dg_pred - sample.label_dg;
    acc += d * d;
  }
  return acc / static_cast<double>(batch.size());
}

}  // namespace detail

// Central finite-difference gradient; differentiates through the projection
// by recomputing it at every perturbed point. Slow, used as the independent
// check of grad().
inline Gradients grad_fd(const forward::ModelParams& params,
                         std::span<const ingest::EncodedState> batch,
                         const forward::ArchitectureSpec& arch,
                         double h = 1e-5) {
  forward::validate_arch(arch);
  forward::check_params_match(params, arch);
  check_batch(batch, arch);

  forward::ModelParams work = params;
  Gradients out = zero_gradients(arch);
  const auto probe = [&](double& slot) {
    const double saved = slot;
    slot = saved + h;
    const double up = detail::batch_loss(work, batch, arch);
    slot = saved - h;
    const double down = detail::batch_loss(work, batch, arch);
    slot = saved;
    return (up - down) / (2.0 * h);
  };

  for (std::size_t k = 0; k < work.raw_filters.size(); ++k)
    for (std::size_t i = 0; i < work.raw_filters[k].entries.data.size(); ++i)
      out.filters[k].data[i] = probe(work.raw_filters[k].entries.data[i]);
  out.w0 = probe(work.w0);
  out.w1 = probe(work.w1);
  return out;
}

// Classical momentum: velocity accumulates gradients, parameters move by
// lr * velocity.
inline void sgd_step(forward::ModelParams& params, const Gradients& grads,
                     Gradients& velocity, double lr, double momentum) {
  if (grads.filters.size() != params.raw_filters.size() ||
      velocity.filters.size() != params.raw_filters.size())
    throw ShapeError("sgd_step: gradient/velocity shape mismatch");
  for (std::size_t k = 0; k < params.raw_filters.size(); ++k) {
    auto& p = params.raw_filters[k].entries.data;
    const auto& g = grads.filters[k].data;
    auto& v = velocity.filters[k].data;
    if (g.size() != p.size() || v.size() != p.size())
      throw ShapeError("sgd_step: filter " + std::to_string(k) +
                       " shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      v[i] = momentum * v[i] + g[i];
      p[i] -= lr * v[i];
    }
  }
  velocity.w0 = momentum * velocity.w0 + grads.w0;
  params.w0 -= lr * velocity.w0;
  velocity.w1 = momentum * velocity.w1 + grads.w1;
  params.w1 -= lr * velocity.w1;
}

// Ordered predictions for a whole dataset; samples are independent, so the
// loop parallelizes with per-index writes.
inline std::vector<double> predict_all(
    std::span<const ingest::EncodedState> dataset,
    const forward::ModelParams& params,
    const forward::ArchitectureSpec& arch) {
  const auto projected = forward::project_filters(params);
  std::vector<double> preds(dataset.size());
  qcbind::detail::parallel_for(
      dataset.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
          preds[i] = forward::forward_projected(dataset[i].amplitudes,
                                                projected, params.w0,
                                                params.w1, arch)
                         .dg_pred;
      });
  return preds;
}

inline std::vector<double> labels_of(
    std::span<const ingest::EncodedState> dataset) {
  std::vector<double> labels(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i)
    labels[i] = dataset[i].label_dg;
  return labels;
}

struct TrajectoryPoint {
  long long step = 0;
  double train_rmsd = 0.0;
};

struct PredictionRow {
  std::string id;
  double dg_true = 0.0;
  double dg_pred = 0.0;
};

struct RunRecord {
  forward::ArchitectureSpec arch;
  TrainConfig config;
  std::vector<TrajectoryPoint> trajectory;  // steps / eval_interval entries
  metrics::Metrics initial_train, initial_test;
  metrics::Metrics final_train, final_test;
  std::vector<PredictionRow> test_predictions;
  forward::ModelParams final_params;
  double wall_seconds = 0.0;  // echoed only into manifest files
};

// Deterministic training loop: one seeded shuffle per pass over the data,
// sequential batches with the final partial batch kept, train-set RMSD
// recorded every eval_interval steps.
inline RunRecord train(std::span<const ingest::EncodedState> train_set,
                       std::span<const ingest::EncodedState> test_set,
                       const forward::ArchitectureSpec& arch,
                       const TrainConfig& cfg) {
  validate(cfg);
  forward::validate_arch(arch);
  if (train_set.empty()) throw DataError("train: empty training set");
  check_batch(train_set, arch);
  if (!test_set.empty()) check_batch(test_set, arch);

  const auto t_start = std::chrono::steady_clock::now();

  RunRecord record;
  record.arch = arch;
  record.config = cfg;

  forward::ModelParams params =
      init_params(arch, cfg.seed, cfg.init_low, cfg.init_high);
  Gradients velocity = zero_gradients(arch);

  const auto eval_metrics = [&](std::span<const ingest::EncodedState> set) {
    const auto preds = predict_all(set, params, arch);
    const auto labels = labels_of(set);
    return metrics::evaluate(preds, labels);
  };
  record.initial_train = eval_metrics(train_set);
  if (!test_set.empty()) record.initial_test = eval_metrics(test_set);

  qcbind::detail::Rng shuffle_rng(
      qcbind::detail::mix_seed(cfg.seed, /*stream=*/1));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t pos = order.size();  // forces a shuffle before the first batch

  std::vector<ingest::EncodedState> batch;
  for (long long step = 1; step <= cfg.steps; ++step) {
    if (pos >= order.size()) {
      shuffle_rng.shuffle(order);
      pos = 0;
    }
    const std::size_t end =
        std::min(order.size(), pos + static_cast<std::size_t>(cfg.batch_size));
    batch.clear();
    for (std::size_t i = pos; i < end; ++i) batch.push_back(train_set[order[i]]);
    pos = end;

    const Gradients g = grad(params, batch, arch);
    sgd_step(params, g, velocity, cfg.lr, cfg.momentum);

    if (step % cfg.eval_interval == 0) {
      const auto preds = predict_all(train_set, params, arch);
      const auto labels = labels_of(train_set);
      record.trajectory.push_back({step, metrics::rmsd(preds, labels)});
    }
  }

  record.final_train = eval_metrics(train_set);
  if (!test_set.empty()) {
    record.final_test = eval_metrics(test_set);
    const auto preds = predict_all(test_set, params, arch);
    record.test_predictions.reserve(test_set.size());
    for (std::size_t i = 0; i < test_set.size(); ++i)
      record.test_predictions.push_back(
          {test_set[i].id, test_set[i].label_dg, preds[i]});
  }
  record.final_params = std::move(params);
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return record;
}

struct SweepRun {
  double lr = 0.0;
  std::uint64_t seed = 0;
  metrics::Metrics train;
  metrics::Metrics test;
};

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

inline Aggregate aggregate(std::span<const double> xs) {
  Aggregate a;
  if (xs.empty()) return a;
  for (double x : xs) a.mean += x;
  a.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) {
    const double d = x - a.mean;
    var += d * d;
  }
  a.stddev = std::sqrt(var / static_cast<double>(xs.size()));
  return a;
}

struct SweepResult {
  std::vector<SweepRun> runs;
  Aggregate train_rmsd, train_pcc, test_rmsd, test_pcc;
};

// One train() per (lr, seed); final metrics aggregated into mean +- std
// across all runs.
inline SweepResult sweep(std::span<const ingest::EncodedState> train_set,
                         std::span<const ingest::EncodedState> test_set,
                         const forward::ArchitectureSpec& arch,
                         std::span<const double> lrs,
                         std::span<const std::uint64_t> seeds,
                         const TrainConfig& base) {
  if (lrs.empty()) throw ConfigError("sweep: empty learning-rate list");
  if (seeds.empty()) throw ConfigError("sweep: empty seed list");
  SweepResult result;
  std::vector<double> tr_r, tr_p, te_r, te_p;
  for (double lr : lrs)
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = base;
      cfg.lr = lr;
      cfg.seed = seed;
      const RunRecord rec = train(train_set, test_set, arch, cfg);
      result.runs.push_back({lr, seed, rec.final_train, rec.final_test});
      tr_r.push_back(rec.final_train.rmsd);
      tr_p.push_back(rec.final_train.pcc);
      te_r.push_back(rec.final_test.rmsd);
      te_p.push_back(rec.final_test.pcc);
    }
  result.train_rmsd = aggregate(tr_r);
  result.train_pcc = aggregate(tr_p);
  result.test_rmsd = aggregate(te_r);
  result.test_pcc = aggregate(te_p);
  return result;
}

}  // namespace qcbind::trainer

#endif  // QCBIND_TRAINER_HPP
