// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// Report emission for training and sweep runs: predictions.csv
// (id,dg_true,dg_pred), trajectory.csv (step,train_rmsd) and a human-readable
// summary.txt. Floats are serialized at 17 significant digits so parsing a
// CSV reproduces the in-memory values exactly.

#ifndef QCBIND_REPORTS_HPP
#define QCBIND_REPORTS_HPP

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "qcbind/common.hpp"
#include "qcbind/io.hpp"
#include "qcbind/metrics.hpp"
#include "qcbind/trainer.hpp"

namespace qcbind::metrics {

inline std::string format_metric(double v) {
  if (std::isnan(v)) return "undefined";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string predictions_csv_text(
    std::span<const trainer::PredictionRow> rows) {
  std::string out = "id,dg_true,dg_pred\n";
  for (const auto& r : rows)
    out += r.id + "," + io::format_f64(r.dg_true) + "," +
           io::format_f64(r.dg_pred) + "\n";
  return out;
}

inline std::vector<trainer::PredictionRow> parse_predictions_csv(
    std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line) || ingest::detail::trim(line) != "id,dg_true,dg_pred")
    throw ParseError("predictions csv: missing 'id,dg_true,dg_pred' header");
  std::vector<trainer::PredictionRow> rows;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (ingest::detail::trim(line).empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = line.rfind(',');
    if (c1 == std::string::npos || c2 == c1)
      throw ParseError("predictions csv line " + std::to_string(line_no) +
                       ": expected three fields");
    trainer::PredictionRow r;
    r.id = line.substr(0, c1);
    r.dg_true = io::parse_f64(line.substr(c1 + 1, c2 - c1 - 1),
                              "predictions csv dg_true");
    r.dg_pred = io::parse_f64(line.substr(c2 + 1), "predictions csv dg_pred");
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string trajectory_csv_text(
    std::span<const trainer::TrajectoryPoint> traj) {
  std::string out = "step,train_rmsd\n";
  for (const auto& p : traj)
    out += std::to_string(p.step) + "," + io::format_f64(p.train_rmsd) + "\n";
  return out;
}

inline std::vector<trainer::TrajectoryPoint> parse_trajectory_csv(
    std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  if (!std::getline(is, line) ||
      ingest::detail::trim(line) != "step,train_rmsd")
    throw ParseError("trajectory csv: missing 'step,train_rmsd' header");
  std::vector<trainer::TrajectoryPoint> out;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (ingest::detail::trim(line).empty()) continue;
    const std::size_t c = line.find(',');
    if (c == std::string::npos)
      throw ParseError("trajectory csv line " + std::to_string(line_no) +
                       ": expected two fields");
    trainer::TrajectoryPoint p;
    p.step = io::parse_i64(line.substr(0, c), "trajectory csv step");
    p.train_rmsd = io::parse_f64(line.substr(c + 1), "trajectory csv rmsd");
    out.push_back(p);
  }
  return out;
}

inline std::string summary_text(const trainer::RunRecord& run) {
  const auto [total, independent] = forward::count_params(run.arch);
  std::ostringstream os;
  os << "arch        " << run.arch.name << "\n";
  os << "qubits      " << run.arch.n_qubits << "\n";
  os << "params      " << total << " total, " << independent << " independent";
  if (!run.arch.count_note.empty()) os << " (*)";
  os << "\n";
  if (!run.arch.count_note.empty()) os << "(*) " << run.arch.count_note << "\n";
  os << "lr          " << io::format_f64(run.config.lr) << "\n";
  os << "momentum    " << io::format_f64(run.config.momentum) << "\n";
  os << "batch_size  " << run.config.batch_size << "\n";
  os << "steps       " << run.config.steps << "\n";
  os << "seed        " << run.config.seed << "\n";
  os << "initial train  rmsd " << format_metric(run.initial_train.rmsd)
     << "  pcc " << format_metric(run.initial_train.pcc) << "\n";
  os << "initial test   rmsd " << format_metric(run.initial_test.rmsd)
     << "  pcc " << format_metric(run.initial_test.pcc) << "\n";
  os << "final train    rmsd " << format_metric(run.final_train.rmsd)
     << "  pcc " << format_metric(run.final_train.pcc) << "\n";
  os << "final test     rmsd " << format_metric(run.final_test.rmsd)
     << "  pcc " << format_metric(run.final_test.pcc) << "\n";
  return os.str();
}

// Writes predictions.csv, trajectory.csv and summary.txt into out_dir.
// Timestamps and wall time are deliberately absent, so re-running an
// identical configuration reproduces these files byte for byte.
inline void emit_reports(const trainer::RunRecord& run,
                         const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir);
  io::write_text_file(out_dir + "/predictions.csv",
                      predictions_csv_text(run.test_predictions));
  io::write_text_file(out_dir + "/trajectory.csv",
                      trajectory_csv_text(run.trajectory));
  io::write_text_file(out_dir + "/summary.txt", summary_text(run));
}

inline std::string format_mean_std(const trainer::Aggregate& a) {
  return format_metric(a.mean) + " +- " + format_metric(a.stddev);
}

inline std::string sweep_summary_text(const forward::ArchitectureSpec& arch,
                                      const trainer::SweepResult& result) {
  const auto [total, independent] = forward::count_params(arch);
  std::ostringstream os;
  os << "arch " << arch.name << "  qubits " << arch.n_qubits << "  params "
     << total << " (" << independent << (arch.count_note.empty() ? ")" : ") (*)")
     << "\n";
  if (!arch.count_note.empty()) os << "(*) " << arch.count_note << "\n";
  os << "\nruns:\n";
  os << "lr            seed        train_rmsd  train_pcc   test_rmsd   "
        "test_pcc\n";
  for (const auto& run : result.runs) {
    char line[160];
    std::snprintf(line, sizeof line, "%-13g %-11llu %-11s %-11s %-11s %s\n",
                  run.lr, static_cast<unsigned long long>(run.seed),
                  format_metric(run.train.rmsd).c_str(),
                  format_metric(run.train.pcc).c_str(),
                  format_metric(run.test.rmsd).c_str(),
                  format_metric(run.test.pcc).c_str());
    os << line;
  }
  os << "\nmean +- std over " << result.runs.size() << " runs:\n";
  os << "train rmsd  " << format_mean_std(result.train_rmsd) << "\n";
  os << "train pcc   " << format_mean_std(result.train_pcc) << "\n";
  os << "test rmsd   " << format_mean_std(result.test_rmsd) << "\n";
  os << "test pcc    " << format_mean_std(result.test_pcc) << "\n";
  return os.str();
}

}  // namespace qcbind::metrics

#endif  // QCBIND_REPORTS_HPP
