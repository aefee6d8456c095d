// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. One binary, batch-oriented subcommands:
//   voxelize  complex files -> encoded dataset
//   synth     synthetic teacher-labeled dataset
//   train     SGD training run with reports and a checkpoint
//   eval      metrics of a checkpoint on a dataset
//   predict   predictions CSV for a dataset
//   noise-eval  metrics under a noise strategy, next to noise-free ones
//   sweep     learning-rate x seed sweep with aggregate table
//   verify    built-in numerical consistency suite
// Exit codes: 0 success, 1 usage/config, 2 data, 3 numerical-check failure.

#ifndef QCBIND_CLI_HPP
#define QCBIND_CLI_HPP

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "qcbind/common.hpp"
#include "qcbind/forward.hpp"
#include "qcbind/ingest.hpp"
#include "qcbind/io.hpp"
#include "qcbind/metrics.hpp"
#include "qcbind/noise.hpp"
#include "qcbind/reports.hpp"
#include "qcbind/synth.hpp"
#include "qcbind/trainer.hpp"
#include "qcbind/verify.hpp"

namespace qcbind::cli {

namespace detail {

inline std::string sanitize_id(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') c = '_';
  return s.empty() ? std::string("sample") : s;
}

struct IngestOutcome {
  std::vector<ingest::EncodedState> samples;
  std::vector<std::pair<std::string, std::string>> skipped;  // path, reason
};

// Runs the full ingest pipeline over a list of complex files; failures are
// collected per file and the run continues.
inline IngestOutcome ingest_files(const std::vector<std::string>& paths,
                                  int target_side) {
  IngestOutcome out;
  for (const auto& path : paths) {
    try {
      const std::string text = io::read_text_file(path);
      const std::string id =
          sanitize_id(std::filesystem::path(path).stem().string());
      const ingest::ComplexSample sample = ingest::parse_complex(text, id);
      const ingest::VoxelGrid grid =
          ingest::downsample(ingest::voxelize(sample), target_side);
      out.samples.push_back(ingest::normalize_encode(
          grid, ingest::pkd_to_dg(sample.pkd), sample.id));
    } catch (const Error& e) {
      out.skipped.emplace_back(path, e.what());
    }
  }
  return out;
}

inline forward::ArchitectureSpec resolve_arch(const io::RunConfig& rc) {
  if (rc.arch_file.empty()) return forward::builtin_arch(rc.arch_name);
  const auto archs = forward::parse_arch_text(io::read_text_file(rc.arch_file));
  for (const auto& a : archs)
    if (a.name == rc.arch_name) return a;
  throw ConfigError("arch '" + rc.arch_name + "' not found in " +
                    rc.arch_file);
}

inline std::vector<ingest::EncodedState> resolve_dataset(
    const std::string& dataset_path, const std::string& manifest_path,
    const forward::ArchitectureSpec& arch, const char* which) {
  if (!dataset_path.empty() && !manifest_path.empty())
    throw ConfigError(std::string(which) +
                      ": give either a dataset file or a manifest, not both");
  if (!dataset_path.empty()) {
    io::Dataset ds = io::load_dataset(dataset_path);
    if (ds.n_qubits != arch.n_qubits)
      throw ShapeError(std::string(which) + " dataset " + dataset_path +
                       " encodes " + std::to_string(ds.n_qubits) +
                       " qubits but architecture '" + arch.name + "' uses " +
                       std::to_string(arch.n_qubits));
    return std::move(ds.samples);
  }
  if (!manifest_path.empty()) {
    const auto paths = io::read_manifest(manifest_path);
    if (paths.empty()) throw DataError("no samples: empty manifest " +
                                       manifest_path);
    auto outcome =
        ingest_files(paths, ingest::side_for_qubits(arch.n_qubits));
    for (const auto& [path, reason] : outcome.skipped)
      std::cerr << "skipped " << path << ": " << reason << "\n";
    if (outcome.samples.empty())
      throw DataError("no samples: every entry of " + manifest_path +
                      " failed to ingest");
    return std::move(outcome.samples);
  }
  throw ConfigError(std::string(which) +
                    ": missing dataset (set *_dataset or *_manifest)");
}

inline void check_dataset_arch(const io::Dataset& ds,
                               const forward::ArchitectureSpec& arch,
                               const std::string& path) {
  if (ds.n_qubits != arch.n_qubits)
    throw ShapeError("dataset " + path + " encodes " +
                     std::to_string(ds.n_qubits) +
                     " qubits but architecture '" + arch.name + "' uses " +
                     std::to_string(arch.n_qubits));
}

inline void write_skip_log(const std::string& out_path,
                           const IngestOutcome& outcome) {
  if (outcome.skipped.empty()) return;
  std::string log;
  for (const auto& [path, reason] : outcome.skipped)
    log += path + "\t" + reason + "\n";
  io::write_text_file(out_path + ".skipped.txt", log);
}

inline std::vector<double> parse_double_list(const std::string& csv,
                                             const char* what) {
  std::vector<double> out;
  std::size_t begin = 0;
  while (begin <= csv.size()) {
    const std::size_t comma = csv.find(',', begin);
    const std::string tok = ingest::detail::trim(
        csv.substr(begin, comma == std::string::npos ? std::string::npos
                                                     : comma - begin));
    if (!tok.empty()) out.push_back(io::parse_f64(tok, what));
    if (comma == std::string::npos) break;
    begin = comma + 1;
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

inline std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> out;
  for (double v : parse_double_list(csv, "seed list"))
    out.push_back(static_cast<std::uint64_t>(v));
  return out;
}

inline void apply_overrides(io::RunConfig& rc,
                            const std::vector<std::string>& sets) {
  for (const auto& kv : sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    io::apply_key(rc, ingest::detail::trim(kv.substr(0, eq)),
                  ingest::detail::trim(kv.substr(eq + 1)));
  }
}

// Translates an `epochs` request into optimizer steps once the training-set
// size is known: one epoch is ceil(N / batch) batches.
inline void resolve_steps(io::RunConfig& rc, std::size_t train_size) {
  if (rc.epochs && rc.steps_set)
    throw ConfigError("config sets both steps and epochs; pick one");
  if (rc.epochs) {
    const long long per_epoch = static_cast<long long>(
        (train_size + rc.train.batch_size - 1) / rc.train.batch_size);
    rc.train.steps = *rc.epochs * per_epoch;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

inline void cmd_voxelize(const std::string& manifest_path, int n_qubits,
                         const std::string& out_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const int side = ingest::side_for_qubits(n_qubits);
  const auto paths = io::read_manifest(manifest_path);
  if (paths.empty()) throw DataError("no samples: empty manifest " +
                                     manifest_path);
  const auto outcome = detail::ingest_files(paths, side);
  for (const auto& [path, reason] : outcome.skipped)
    std::cerr << "skipped " << path << ": " << reason << "\n";
  if (outcome.samples.empty())
    throw DataError("no samples: every entry of " + manifest_path +
                    " failed to ingest");

  io::save_dataset(out_path, {n_qubits, outcome.samples});
  detail::write_skip_log(out_path, outcome);
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  io::write_run_manifest(out_path + ".manifest.txt", "voxelize",
                         {{"manifest", manifest_path},
                          {"qubits", std::to_string(n_qubits)},
                          {"out", out_path},
                          {"encoded", std::to_string(outcome.samples.size())},
                          {"skipped", std::to_string(outcome.skipped.size())}},
                         wall);
  std::cout << "encoded " << outcome.samples.size() << " samples ("
            << outcome.skipped.size() << " skipped) -> " << out_path << "\n";
}

inline void cmd_synth(std::uint64_t seed, long long count, int n_qubits,
                      double sigma, const std::string& out_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto samples = ingest::synth_dataset(seed, count, n_qubits, sigma);
  io::save_dataset(out_path, {n_qubits, samples});
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  io::write_run_manifest(out_path + ".manifest.txt", "synth",
                         {{"seed", std::to_string(seed)},
                          {"count", std::to_string(count)},
                          {"qubits", std::to_string(n_qubits)},
                          {"noise_sigma", io::format_f64(sigma)},
                          {"out", out_path}},
                         wall);
  std::cout << "wrote " << samples.size() << " synthetic samples -> "
            << out_path << "\n";
}

inline void cmd_train(io::RunConfig rc, const std::string& config_path) {
  const auto arch = detail::resolve_arch(rc);
  forward::validate_arch(arch);
  const auto train_set = detail::resolve_dataset(rc.train_dataset,
                                                 rc.train_manifest, arch,
                                                 "train");
  const auto test_set = detail::resolve_dataset(rc.test_dataset,
                                                rc.test_manifest, arch,
                                                "test");
  detail::resolve_steps(rc, train_set.size());

  const trainer::RunRecord record =
      trainer::train(train_set, test_set, arch, rc.train);

  std::error_code ec;
  std::filesystem::create_directories(rc.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + rc.out_dir);
  io::save_checkpoint(rc.out_dir + "/checkpoint.bin", arch,
                      record.final_params);
  metrics::emit_reports(record, rc.out_dir);
  auto entries = io::resolved_entries(rc);
  entries.emplace_back("config", config_path);
  io::write_run_manifest(rc.out_dir + "/manifest.txt", "train", entries,
                         record.wall_seconds);

  std::cout << metrics::summary_text(record);
  std::cout << "outputs in " << rc.out_dir << "\n";
}

inline void cmd_eval(const std::string& checkpoint_path,
                     const std::string& dataset_path,
                     const std::string& out_dir, long long shots,
                     std::uint64_t shot_seed) {
  const auto t0 = std::chrono::steady_clock::now();
  const io::Checkpoint ck = io::load_checkpoint(checkpoint_path);
  const io::Dataset ds = io::load_dataset(dataset_path);
  detail::check_dataset_arch(ds, ck.arch, dataset_path);

  std::vector<double> preds(ds.samples.size());
  if (shots > 0) {
    qcbind::detail::Rng seeder(shot_seed);
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
      preds[i] = forward::forward_sampled(ds.samples[i].amplitudes, ck.params,
                                          ck.arch, shots, seeder.next())
                     .dg_pred;
  } else {
    preds = trainer::predict_all(ds.samples, ck.params, ck.arch);
  }
  const auto labels = trainer::labels_of(ds.samples);
  const metrics::Metrics m = metrics::evaluate(preds, labels);

  std::string text = "dataset     " + dataset_path + "\n";
  text += "samples     " + std::to_string(ds.samples.size()) + "\n";
  text += "shots       " +
          (shots > 0 ? std::to_string(shots) : std::string("exact")) + "\n";
  text += "rmsd        " + metrics::format_metric(m.rmsd) + "\n";
  text += "pcc         " + metrics::format_metric(m.pcc) + "\n";
  std::cout << text;

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    io::write_text_file(out_dir + "/metrics.txt", text);
    std::vector<trainer::PredictionRow> rows;
    rows.reserve(ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
      rows.push_back({ds.samples[i].id, ds.samples[i].label_dg, preds[i]});
    io::write_text_file(out_dir + "/predictions.csv",
                        metrics::predictions_csv_text(rows));
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    io::write_run_manifest(out_dir + "/manifest.txt", "eval",
                           {{"checkpoint", checkpoint_path},
                            {"dataset", dataset_path},
                            {"shots", std::to_string(shots)}},
                           wall);
  }
}

inline void cmd_predict(const std::string& checkpoint_path,
                        const std::string& dataset_path,
                        const std::string& out_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const io::Checkpoint ck = io::load_checkpoint(checkpoint_path);
  const io::Dataset ds = io::load_dataset(dataset_path);
  detail::check_dataset_arch(ds, ck.arch, dataset_path);
  const auto preds = trainer::predict_all(ds.samples, ck.params, ck.arch);
  std::vector<trainer::PredictionRow> rows;
  rows.reserve(ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    rows.push_back({ds.samples[i].id, ds.samples[i].label_dg, preds[i]});
  io::write_text_file(out_path, metrics::predictions_csv_text(rows));
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  io::write_run_manifest(out_path + ".manifest.txt", "predict",
                         {{"checkpoint", checkpoint_path},
                          {"dataset", dataset_path},
                          {"out", out_path}},
                         wall);
  std::cout << "wrote " << rows.size() << " predictions -> " << out_path
            << "\n";
}

inline void cmd_noise_eval(const std::string& checkpoint_path,
                           const std::string& dataset_path,
                           const noise::NoiseConfig& cfg, bool allow_large_dm,
                           const std::string& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const io::Checkpoint ck = io::load_checkpoint(checkpoint_path);
  const io::Dataset ds = io::load_dataset(dataset_path);
  detail::check_dataset_arch(ds, ck.arch, dataset_path);
  if (ck.arch.n_qubits > 9 && !allow_large_dm)
    throw ConfigError(
        "density-matrix evaluation at " + std::to_string(ck.arch.n_qubits) +
        " qubits needs about 128 MB per matrix; pass --allow-large-dm to "
        "proceed");

  const auto projected = forward::project_filters(ck.params);
  const auto labels = trainer::labels_of(ds.samples);
  const auto clean = trainer::predict_all(ds.samples, ck.params, ck.arch);
  std::vector<double> noisy(ds.samples.size());
  const auto eval_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      noisy[i] = noise::noisy_forward_projected(ds.samples[i].amplitudes,
                                                projected, ck.params.w0,
                                                ck.params.w1, ck.arch, cfg)
                     .dg_pred;
  };
  if (ck.arch.n_qubits > 9) {
    // Large density matrices: one sample at a time keeps the footprint at a
    // single matrix set; the row passes inside each sample still parallelize.
    eval_range(0, ds.samples.size());
  } else {
    qcbind::detail::parallel_for(ds.samples.size(), eval_range);
  }

  const metrics::Metrics m_clean = metrics::evaluate(clean, labels);
  const metrics::Metrics m_noisy = metrics::evaluate(noisy, labels);
  std::string text = "strategy      " +
                     std::string(noise::strategy_name(cfg.strategy)) + "\n";
  text += "depol_p       " + io::format_f64(cfg.depol_p) + "\n";
  text += "phase_gamma   " + io::format_f64(cfg.phase_gamma) + "\n";
  text += "noise-free    rmsd " + metrics::format_metric(m_clean.rmsd) +
          "  pcc " + metrics::format_metric(m_clean.pcc) + "\n";
  text += "noisy         rmsd " + metrics::format_metric(m_noisy.rmsd) +
          "  pcc " + metrics::format_metric(m_noisy.pcc) + "\n";
  std::cout << text;

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir);
    io::write_text_file(out_dir + "/noise_eval.txt", text);
    const double wall = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    io::write_run_manifest(
        out_dir + "/manifest.txt", "noise-eval",
        {{"checkpoint", checkpoint_path},
         {"dataset", dataset_path},
         {"noise.strategy", noise::strategy_name(cfg.strategy)},
         {"noise.depol_p", io::format_f64(cfg.depol_p)},
         {"noise.phase_gamma", io::format_f64(cfg.phase_gamma)}},
        wall);
  }
}

inline void cmd_sweep(io::RunConfig rc, const std::string& config_path,
                      const std::vector<double>& lrs,
                      const std::vector<std::uint64_t>& seeds) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto arch = detail::resolve_arch(rc);
  const auto train_set = detail::resolve_dataset(rc.train_dataset,
                                                 rc.train_manifest, arch,
                                                 "train");
  const auto test_set = detail::resolve_dataset(rc.test_dataset,
                                                rc.test_manifest, arch,
                                                "test");
  detail::resolve_steps(rc, train_set.size());

  const trainer::SweepResult result =
      trainer::sweep(train_set, test_set, arch, lrs, seeds, rc.train);
  const std::string text = metrics::sweep_summary_text(arch, result);
  std::cout << text;

  std::error_code ec;
  std::filesystem::create_directories(rc.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + rc.out_dir);
  io::write_text_file(rc.out_dir + "/sweep_summary.txt", text);
  auto entries = io::resolved_entries(rc);
  entries.emplace_back("config", config_path);
  std::string lr_list;
  for (double lr : lrs) lr_list += (lr_list.empty() ? "" : ",") +
                                   io::format_f64(lr);
  entries.emplace_back("lrs", lr_list);
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  io::write_run_manifest(rc.out_dir + "/manifest.txt", "sweep", entries, wall);
}

inline void cmd_verify(int draws, const std::string& checkpoint_path) {
  const verify::Report report = verify::run_all(draws, checkpoint_path);
  for (const auto& c : report.checks) {
    std::printf("%-4s %-48s max deviation %.3e (threshold %.0e)%s%s\n",
                c.pass ? "ok" : "FAIL", c.name.c_str(), c.max_deviation,
                c.threshold, c.detail.empty() ? "" : " -- ",
                c.detail.c_str());
  }
  if (!report.all_pass())
    throw NumericCheckError("verification failed; see the checks above");
}

// ---------------------------------------------------------------------------
// Argument parsing and dispatch.
// ---------------------------------------------------------------------------

inline int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const WiringError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e))
    return 1;
  if (dynamic_cast<const NumericCheckError*>(&e) ||
      dynamic_cast<const RankDeficiencyError*>(&e))
    return 3;
  return 2;  // parse, data, domain, io
}

inline int run_cli(const std::vector<std::string>& args) {
  CLI::App app{
      "quantum-convolution binding-affinity toolkit\n"
      "(QCBIND_THREADS caps worker threads; results do not depend on it)"};
  app.require_subcommand(1);

  // voxelize
  std::string vx_manifest, vx_out;
  int vx_qubits = 9;
  auto* vx = app.add_subcommand("voxelize",
                                "encode complex files into a dataset");
  vx->add_option("--manifest", vx_manifest, "complex-file list")->required();
  vx->add_option("--qubits", vx_qubits, "9 (4^3 grid) or 12 (8^3 grid)")
      ->check(CLI::IsMember({9, 12}));
  vx->add_option("--out", vx_out, "output dataset path")->required();

  // synth
  std::uint64_t sy_seed = 0;
  long long sy_count = 0;
  int sy_qubits = 9;
  double sy_sigma = 0.5;
  std::string sy_out;
  auto* sy = app.add_subcommand("synth", "generate a synthetic dataset");
  sy->add_option("--seed", sy_seed, "generator seed")->required();
  sy->add_option("--count", sy_count, "number of samples")->required();
  sy->add_option("--qubits", sy_qubits, "9 or 12")
      ->check(CLI::IsMember({9, 12}));
  sy->add_option("--sigma", sy_sigma, "label noise sigma, kcal/mol");
  sy->add_option("--out", sy_out, "output dataset path")->required();

  // train
  std::string tr_config, tr_out_dir;
  std::vector<std::string> tr_sets;
  auto* tr = app.add_subcommand("train", "run a training job");
  tr->add_option("--config", tr_config, "run config file")->required();
  tr->add_option("--set", tr_sets, "key=value config override (repeatable)");
  tr->add_option("--out-dir", tr_out_dir, "override the output directory");

  // eval
  std::string ev_ck, ev_ds, ev_out_dir;
  long long ev_shots = 0;
  std::uint64_t ev_shot_seed = 0;
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  ev->add_option("--checkpoint", ev_ck, "checkpoint file")->required();
  ev->add_option("--dataset", ev_ds, "dataset file")->required();
  ev->add_option("--out-dir", ev_out_dir, "write metrics/predictions here");
  ev->add_option("--shots", ev_shots,
                 "finite-shot readout (0 = exact probabilities)");
  ev->add_option("--shot-seed", ev_shot_seed, "sampler seed");

  // predict
  std::string pr_ck, pr_ds, pr_out;
  auto* pr = app.add_subcommand("predict", "write predictions for a dataset");
  pr->add_option("--checkpoint", pr_ck, "checkpoint file")->required();
  pr->add_option("--dataset", pr_ds, "dataset file")->required();
  pr->add_option("--out", pr_out, "output csv path")->required();

  // noise-eval
  std::string ne_ck, ne_ds, ne_config, ne_strategy = "final_qubit",
              ne_out_dir;
  double ne_p = 0.05, ne_gamma = 0.03;
  bool ne_allow_large = false;
  auto* ne = app.add_subcommand("noise-eval",
                                "evaluate a checkpoint under noise");
  ne->add_option("--checkpoint", ne_ck, "checkpoint file")->required();
  ne->add_option("--dataset", ne_ds, "dataset file")->required();
  ne->add_option("--config", ne_config,
                 "run config supplying noise.* defaults");
  auto* ne_strategy_opt =
      ne->add_option("--strategy", ne_strategy, "none|final_qubit|layer_wise");
  auto* ne_p_opt = ne->add_option("--depol-p", ne_p,
                                  "depolarizing probability");
  auto* ne_gamma_opt = ne->add_option("--phase-gamma", ne_gamma,
                                      "phase damping probability");
  ne->add_flag("--allow-large-dm", ne_allow_large,
               "permit 12-qubit density matrices (~128 MB each)");
  ne->add_option("--out-dir", ne_out_dir, "write the report here");

  // sweep
  std::string sw_config, sw_lrs = "1e-2,1e-3,1e-4,1e-5", sw_seeds,
              sw_out_dir;
  std::vector<std::string> sw_sets;
  auto* sw = app.add_subcommand("sweep", "learning-rate x seed sweep");
  sw->add_option("--config", sw_config, "run config file")->required();
  sw->add_option("--lrs", sw_lrs, "comma-separated learning rates");
  sw->add_option("--seeds", sw_seeds,
                 "comma-separated seeds (default: config seed)");
  sw->add_option("--set", sw_sets, "key=value config override (repeatable)");
  sw->add_option("--out-dir", sw_out_dir, "override the output directory");

  // verify
  int vf_draws = 3;
  std::string vf_ck;
  auto* vf = app.add_subcommand("verify", "run the consistency suite");
  vf->add_option("--draws", vf_draws, "random draws per architecture")
      ->check(CLI::PositiveNumber);
  vf->add_option("--checkpoint", vf_ck, "also validate this checkpoint");

  std::vector<const char*> argv;
  argv.push_back("qcbind");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*vx) {
      cmd_voxelize(vx_manifest, vx_qubits, vx_out);
    } else if (*sy) {
      cmd_synth(sy_seed, sy_count, sy_qubits, sy_sigma, sy_out);
    } else if (*tr) {
      io::RunConfig rc = io::load_run_config(tr_config);
      detail::apply_overrides(rc, tr_sets);
      if (!tr_out_dir.empty()) rc.out_dir = tr_out_dir;
      cmd_train(std::move(rc), tr_config);
    } else if (*ev) {
      cmd_eval(ev_ck, ev_ds, ev_out_dir, ev_shots, ev_shot_seed);
    } else if (*pr) {
      cmd_predict(pr_ck, pr_ds, pr_out);
    } else if (*ne) {
      // Config file supplies defaults; explicit flags win.
      noise::NoiseConfig cfg;
      cfg.strategy = noise::parse_strategy(ne_strategy);
      cfg.depol_p = ne_p;
      cfg.phase_gamma = ne_gamma;
      if (!ne_config.empty()) {
        const io::RunConfig rc = io::load_run_config(ne_config);
        if (ne_strategy_opt->count() == 0) cfg.strategy = rc.noise.strategy;
        if (ne_p_opt->count() == 0) cfg.depol_p = rc.noise.depol_p;
        if (ne_gamma_opt->count() == 0) cfg.phase_gamma = rc.noise.phase_gamma;
      }
      cmd_noise_eval(ne_ck, ne_ds, cfg, ne_allow_large, ne_out_dir);
    } else if (*sw) {
      io::RunConfig rc = io::load_run_config(sw_config);
      detail::apply_overrides(rc, sw_sets);
      if (!sw_out_dir.empty()) rc.out_dir = sw_out_dir;
      const auto lrs = detail::parse_double_list(sw_lrs, "lr list");
      const auto seeds = sw_seeds.empty()
                             ? std::vector<std::uint64_t>{rc.train.seed}
                             : detail::parse_seed_list(sw_seeds);
      cmd_sweep(std::move(rc), sw_config, lrs, seeds);
    } else if (*vf) {
      cmd_verify(vf_draws, vf_ck);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace qcbind::cli

#endif  // QCBIND_CLI_HPP
