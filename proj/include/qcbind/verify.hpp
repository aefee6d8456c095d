// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// Built-in cross-engine consistency suite: the statevector forward pass and
// the zero-noise density-matrix path must agree on every shipped
// architecture, and the block-diagonal batched application must match both
// per-state application and a brute-force dense block operator. Also hosts
// the numerical validity checks for saved checkpoints.

#ifndef QCBIND_VERIFY_HPP
#define QCBIND_VERIFY_HPP

#include <cmath>
#include <string>
#include <vector>

#include "qcbind/common.hpp"
#include "qcbind/forward.hpp"
#include "qcbind/io.hpp"
#include "qcbind/noise.hpp"
#include "qcbind/trainer.hpp"

namespace qcbind::verify {

struct CheckResult {
  std::string name;
  double max_deviation = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline std::vector<double> random_unit_state(qcbind::detail::Rng& rng,
                                             std::size_t dim) {
  std::vector<double> v(dim);
  double norm = 0.0;
  for (double& x : v) {
    x = rng.normal();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

inline linalg::Matrix random_orthogonal(qcbind::detail::Rng& rng, int side) {
  const int arity = qcbind::detail::log2_exact(
      static_cast<std::size_t>(side), "random_orthogonal");
  linalg::RawFilter raw{arity, linalg::Matrix(side, side)};
  for (double& v : raw.entries.data) v = rng.normal();
  return linalg::project_orthogonal(raw).q;
}

inline constexpr double kCrossEngineTol = 1e-10;
inline constexpr double kBlockParallelTol = 1e-12;

// Statevector forward vs zero-noise density forward on all five builtin
// architectures, `draws` random (params, state) pairs each.
inline CheckResult check_cross_engine(int draws, std::uint64_t seed) {
  CheckResult result;
  result.name = "cross-engine statevector vs density";
  result.threshold = kCrossEngineTol;
  qcbind::detail::Rng rng(qcbind::detail::mix_seed(seed, 11));
  const noise::NoiseConfig zero_noise{0.0, 0.0, noise::Strategy::none};
  for (const auto& arch : forward::builtin_archs()) {
    const std::size_t dim = std::size_t{1} << arch.n_qubits;
    for (int d = 0; d < draws; ++d) {
      const auto params = trainer::init_params(arch, rng.next());
      const auto state = random_unit_state(rng, dim);
      const auto projected = forward::project_filters(params);
      const auto sv = forward::forward_projected(state, projected, params.w0,
                                                 params.w1, arch);
      const auto dm = noise::noisy_forward_projected(
          state, projected, params.w0, params.w1, arch, zero_noise);
      const double dev = std::max(std::abs(sv.p0 - dm.p0),
                                  std::abs(sv.dg_pred - dm.dg_pred));
      result.max_deviation = std::max(result.max_deviation, dev);
    }
  }
  result.pass = result.max_deviation <= result.threshold;
  return result;
}

// block_parallel_apply against both per-state application and a brute-force
// dense block-diagonal operator, over every (m, n) with m <= 3, n <= 4.
inline CheckResult check_block_parallel(std::uint64_t seed) {
  CheckResult result;
  result.name = "block-diagonal batched application";
  result.threshold = kBlockParallelTol;
  qcbind::detail::Rng rng(qcbind::detail::mix_seed(seed, 13));
  for (int m = 0; m <= 3; ++m)
    for (int n = 1; n <= 4; ++n) {
      const std::size_t count = std::size_t{1} << m;
      const std::size_t len = std::size_t{1} << n;
      const linalg::Matrix u = random_orthogonal(rng, static_cast<int>(len));
      std::vector<std::vector<double>> states;
      for (std::size_t i = 0; i < count; ++i)
        states.push_back(random_unit_state(rng, len));

      const auto fast = forward::block_parallel_apply(states, u);

      // Brute force: materialize diag(u, ..., u) and multiply the
      // concatenated register directly.
      const std::size_t big = count * len;
      std::vector<double> reg(big, 0.0), out(big, 0.0);
      const double scale = 1.0 / std::sqrt(static_cast<double>(count));
      for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = 0; j < len; ++j)
          reg[i * len + j] = states[i][j] * scale;
      for (std::size_t r = 0; r < big; ++r) {
        const std::size_t block = r / len;
        double acc = 0.0;
        for (std::size_t c = 0; c < len; ++c)
          acc += u(static_cast<int>(r % len), static_cast<int>(c)) *
                 reg[block * len + c];
        out[r] = acc;
      }

      for (std::size_t i = 0; i < count; ++i) {
        const auto direct =
            linalg::apply_filter(states[i], {n, u},
                                 [n] {
                                   std::vector<int> q(n);
                                   for (int k = 0; k < n; ++k) q[k] = k;
                                   return q;
                                 }());
        for (std::size_t j = 0; j < len; ++j) {
          const double brute = out[i * len + j] / scale;
          result.max_deviation =
              std::max({result.max_deviation,
                        std::abs(fast[i][j] - direct[j]),
                        std::abs(fast[i][j] - brute)});
        }
      }
    }
  result.pass = result.max_deviation <= result.threshold;
  return result;
}

// Numerical validity of a saved model: every raw filter must project cleanly
// (full rank), the projected factors must be orthogonal, and both engines
// must agree on it.
inline std::vector<CheckResult> check_checkpoint(const std::string& path,
                                                 std::uint64_t seed) {
  std::vector<CheckResult> results;
  const io::Checkpoint ck = io::load_checkpoint(path);

  CheckResult proj;
  proj.name = "checkpoint filter projection rank condition";
  proj.threshold = linalg::kSigmaMin;
  std::vector<linalg::ProjectedFilter> projected;
  try {
    projected = forward::project_filters(ck.params);
    proj.pass = true;
    proj.max_deviation = 0.0;
  } catch (const RankDeficiencyError& e) {
    proj.pass = false;
    proj.detail = e.what();
  }
  results.push_back(proj);
  if (!proj.pass) return results;

  CheckResult orth;
  orth.name = "checkpoint projected-filter orthogonality";
  orth.threshold = 1e-10;
  for (const auto& pf : projected)
    orth.max_deviation =
        std::max(orth.max_deviation, linalg::orthogonality_error(pf.q));
  orth.pass = orth.max_deviation <= orth.threshold;
  results.push_back(orth);

  CheckResult engines;
  engines.name = "checkpoint cross-engine agreement";
  engines.threshold = kCrossEngineTol;
  qcbind::detail::Rng rng(qcbind::detail::mix_seed(seed, 17));
  const noise::NoiseConfig zero_noise{0.0, 0.0, noise::Strategy::none};
  for (int d = 0; d < 3; ++d) {
    const auto state =
        random_unit_state(rng, std::size_t{1} << ck.arch.n_qubits);
    const auto sv = forward::forward_projected(state, projected, ck.params.w0,
                                               ck.params.w1, ck.arch);
    const auto dm = noise::noisy_forward_projected(
        state, projected, ck.params.w0, ck.params.w1, ck.arch, zero_noise);
    engines.max_deviation =
        std::max(engines.max_deviation, std::abs(sv.p0 - dm.p0));
  }
  engines.pass = engines.max_deviation <= engines.threshold;
  results.push_back(engines);
  return results;
}

inline Report run_all(int draws = 3, const std::string& checkpoint_path = "",
                      std::uint64_t seed = 0x5eedULL) {
  Report report;
  report.checks.push_back(check_cross_engine(draws, seed));
  report.checks.push_back(check_block_parallel(seed));
  if (!checkpoint_path.empty()) {
    const auto ck_checks = check_checkpoint(checkpoint_path, seed);
    report.checks.insert(report.checks.end(), ck_checks.begin(),
                         ck_checks.end());
  }
  return report;
}

}  // namespace qcbind::verify

#endif  // QCBIND_VERIFY_HPP
