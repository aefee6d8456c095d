// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// Mixed-state evaluation: density matrices evolved by filter conjugation and
// by depolarizing / phase-damping channels, under two injection strategies
// (once on the measured qubit before readout, or after every layer on the
// qubits that layer touches).

#ifndef QCBIND_NOISE_HPP
#define QCBIND_NOISE_HPP

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcbind/common.hpp"
#include "qcbind/forward.hpp"
#include "qcbind/linalg.hpp"

namespace qcbind::noise {

// Real symmetric density matrix. Real arithmetic is closed here: states and
// filters are real, and the one complex Kraus operator we need (Pauli Y)
// conjugates real matrices to real matrices via its real companion iY.
struct DensityMatrix {
  int n_qubits = 0;
  std::vector<double> rho;  // dim x dim, row-major

  DensityMatrix() = default;
  explicit DensityMatrix(int n)
      : n_qubits(n),
        rho((std::size_t{1} << n) * (std::size_t{1} << n), 0.0) {}

  std::size_t dim() const { return std::size_t{1} << n_qubits; }
  double& at(std::size_t r, std::size_t c) { return rho[r * dim() + c]; }
  double at(std::size_t r, std::size_t c) const { return rho[r * dim() + c]; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) t += at(i, i);
    return t;
  }
};

enum class Strategy { none, final_qubit, layer_wise };

struct NoiseConfig {
  double depol_p = 0.05;
  double phase_gamma = 0.03;
  Strategy strategy = Strategy::none;
};

inline Strategy parse_strategy(std::string_view s) {
  if (s == "none") return Strategy::none;
  if (s == "final_qubit") return Strategy::final_qubit;
  if (s == "layer_wise") return Strategy::layer_wise;
  throw ConfigError("unknown noise strategy '" + std::string(s) +
                    "' (none, final_qubit, layer_wise)");
}

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::final_qubit: return "final_qubit";
    case Strategy::layer_wise: return "layer_wise";
  }
  return "none";
}

// |state><state| for a unit-norm state.
inline DensityMatrix to_density(std::span<const double> state) {
  const int n = qcbind::detail::log2_exact(state.size(), "to_density");
  double sq = 0.0;
  for (double v : state) sq += v * v;
  if (std::abs(sq - 1.0) > 1e-6)
    throw DomainError("to_density: state squared norm " + std::to_string(sq) +
                      " is not 1 within 1e-6");
  DensityMatrix dm(n);
  const std::size_t dim = dm.dim();
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      dm.rho[r * dim + c] = state[r] * state[c];
  return dm;
}

// rho -> M rho M^T on the listed qubit axes, in place. Pass 1 mixes row
// groups (vectorized along whole rows), pass 2 applies the same contraction
// within each row.
inline void conjugate_on_qubits(DensityMatrix& dm, const linalg::Matrix& mat,
                                std::span<const int> qubits) {
  const std::size_t dim = dm.dim();
  const std::size_t block = std::size_t{1} << qubits.size();
  if (mat.rows != static_cast<int>(block) ||
      mat.cols != static_cast<int>(block))
    throw ShapeError("conjugate_on_qubits: matrix side mismatch");
  const auto plan = linalg::detail_axes::make_axis_plan(qubits, dm.n_qubits);

  std::vector<std::size_t> bases;
  bases.reserve(dim / block);
  for (std::size_t base = 0; base < dim; ++base)
    if (!(base & plan.selected)) bases.push_back(base);

  // Pass 1: rows.
  qcbind::detail::parallel_for(
      bases.size(), [&](std::size_t lo, std::size_t hi) {
        std::vector<double> temp(block * dim);
        for (std::size_t g = lo; g < hi; ++g) {
          const std::size_t base = bases[g];
          for (std::size_t b = 0; b < block; ++b) {
            const double* src = &dm.rho[(base | plan.offsets[b]) * dim];
            double* t = &temp[b * dim];
            for (std::size_t c = 0; c < dim; ++c) t[c] = src[c];
          }
          for (std::size_t a = 0; a < block; ++a) {
            double* dst = &dm.rho[(base | plan.offsets[a]) * dim];
            const double* mrow = mat.row(static_cast<int>(a));
            const double m0 = mrow[0];
            const double* t0 = &temp[0];
            for (std::size_t c = 0; c < dim; ++c) dst[c] = m0 * t0[c];
            for (std::size_t b = 1; b < block; ++b) {
              const double mb = mrow[b];
              if (mb == 0.0) continue;
              const double* tb = &temp[b * dim];
              for (std::size_t c = 0; c < dim; ++c) dst[c] += mb * tb[c];
            }
          }
        }
      });

  // Pass 2: columns, one contiguous row at a time.
  qcbind::detail::parallel_for(dim, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r)
      linalg::apply_matrix_on_qubits(
          std::span<double>(&dm.rho[r * dim], dim), mat, qubits, dm.n_qubits);
  });
}

inline DensityMatrix apply_filter_dm(const DensityMatrix& dm,
                                     const linalg::OrthFilter& filter,
                                     const std::vector<int>& qubits) {
  if (static_cast<int>(qubits.size()) != filter.arity)
    throw WiringError("apply_filter_dm: qubit list length does not match "
                      "filter arity");
  DensityMatrix out = dm;
  conjugate_on_qubits(out, filter.q, qubits);
  return out;
}

namespace detail_pauli {

inline const linalg::Matrix& pauli_x() {
  static const linalg::Matrix m = [] {
    linalg::Matrix x(2, 2);
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    return x;
  }();
  return m;
}

// iY = [[0, -1], [1, 0]]: conjugating a real matrix by Y equals conjugating
// by this real matrix, since the i factors cancel in Y rho Y^dagger.
inline const linalg::Matrix& pauli_iy() {
  static const linalg::Matrix m = [] {
    linalg::Matrix j(2, 2);
    j(0, 1) = -1.0;
    j(1, 0) = 1.0;
    return j;
  }();
  return m;
}

inline const linalg::Matrix& pauli_z() {
  static const linalg::Matrix m = [] {
    linalg::Matrix z(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    return z;
  }();
  return m;
}

}  // namespace detail_pauli

// Depolarizing channel with Kraus set
// {sqrt(1-p) I, sqrt(p/3) X, sqrt(p/3) Y, sqrt(p/3) Z} on one qubit.
inline void depolarize_inplace(DensityMatrix& dm, int qubit, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError("depolarize: probability must be in [0, 1]");
  linalg::detail_axes::check_wiring(std::span<const int>(&qubit, 1),
                                    dm.n_qubits);
  if (p == 0.0) return;

  const std::span<const int> q(&qubit, 1);
  DensityMatrix x = dm;
  conjugate_on_qubits(x, detail_pauli::pauli_x(), q);
  DensityMatrix y = dm;
  conjugate_on_qubits(y, detail_pauli::pauli_iy(), q);
  DensityMatrix z = dm;
  conjugate_on_qubits(z, detail_pauli::pauli_z(), q);
  const double keep = 1.0 - p;
  const double mix = p / 3.0;
  for (std::size_t i = 0; i < dm.rho.size(); ++i)
    dm.rho[i] = keep * dm.rho[i] + mix * (x.rho[i] + y.rho[i] + z.rho[i]);
}

inline DensityMatrix depolarize(const DensityMatrix& dm, int qubit, double p) {
  DensityMatrix out = dm;
  depolarize_inplace(out, qubit, p);
  return out;
}

// Phase damping with Kraus set {diag(1, sqrt(1-gamma)), diag(0, sqrt(gamma))}
// on one qubit: populations stay put, the qubit's coherences shrink by
// sqrt(1-gamma).
inline void phase_damp_inplace(DensityMatrix& dm, int qubit, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw DomainError("phase_damp: gamma must be in [0, 1]");
  linalg::detail_axes::check_wiring(std::span<const int>(&qubit, 1),
                                    dm.n_qubits);
  if (gamma == 0.0) return;
  const std::size_t dim = dm.dim();
  const std::size_t mask = std::size_t{1} << (dm.n_qubits - 1 - qubit);
  const double damp = std::sqrt(1.0 - gamma);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if ((r ^ c) & mask) dm.rho[r * dim + c] *= damp;
}

inline DensityMatrix phase_damp(const DensityMatrix& dm, int qubit,
                                double gamma) {
  DensityMatrix out = dm;
  phase_damp_inplace(out, qubit, gamma);
  return out;
}

// P(measured qubit = |0>) = trace of the upper-left half block.
inline double probability_zero(const DensityMatrix& dm) {
  double p0 = 0.0;
  for (std::size_t i = 0; i < dm.dim() / 2; ++i) p0 += dm.at(i, i);
  return p0;
}

inline forward::Prediction noisy_forward_projected(
    std::span<const double> state,
    std::span<const linalg::ProjectedFilter> filters, double w0, double w1,
    const forward::ArchitectureSpec& arch, const NoiseConfig& cfg) {
  const std::size_t dim = std::size_t{1} << arch.n_qubits;
  if (state.size() != dim)
    throw ShapeError("noisy_forward: state length does not match architecture");
  if (filters.size() != arch.layers.size())
    throw ShapeError("noisy_forward: filter count mismatch");

  DensityMatrix dm = to_density(state);
  for (std::size_t k = 0; k < arch.layers.size(); ++k) {
    conjugate_on_qubits(dm, filters[k].q, arch.layers[k].qubits);
    if (cfg.strategy == Strategy::layer_wise) {
      // Depolarize first, then phase damp; the channels commute on the same
      // qubit but the order is fixed for determinism.
      for (int q : arch.layers[k].qubits) {
        depolarize_inplace(dm, q, cfg.depol_p);
        phase_damp_inplace(dm, q, cfg.phase_gamma);
      }
    }
  }
  if (cfg.strategy == Strategy::final_qubit) {
    depolarize_inplace(dm, arch.measured_qubit, cfg.depol_p);
    phase_damp_inplace(dm, arch.measured_qubit, cfg.phase_gamma);
  }
  return forward::make_prediction(probability_zero(dm), w0, w1);
}

inline forward::Prediction noisy_forward(std::span<const double> state,
                                         const forward::ModelParams& params,
                                         const forward::ArchitectureSpec& arch,
                                         const NoiseConfig& cfg) {
  forward::validate_arch(arch);
  forward::check_params_match(params, arch);
  const auto filters = forward::project_filters(params);
  return noisy_forward_projected(state, filters, params.w0, params.w1, arch,
                                 cfg);
}

}  // namespace qcbind::noise

#endif  // QCBIND_NOISE_HPP
