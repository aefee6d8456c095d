// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic dataset generation: random atom clouds run through the full
// ingest pipeline, labeled by a hidden teacher model of the same architecture
// plus Gaussian observation noise. Lets every training and evaluation path be
// exercised without any external structure data.

#ifndef QCBIND_SYNTH_HPP
#define QCBIND_SYNTH_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "qcbind/common.hpp"
#include "qcbind/forward.hpp"
#include "qcbind/ingest.hpp"
#include "qcbind/trainer.hpp"

namespace qcbind::ingest {

inline const forward::ArchitectureSpec& teacher_arch(int n_qubits) {
  return forward::builtin_arch(n_qubits == 9 ? "fig1a" : "fig1f");
}

namespace detail_synth {

inline ComplexSample random_cloud(qcbind::detail::Rng& rng) {
  ComplexSample sample;
  sample.pkd = 0.0;  // labels come from the teacher, not from pkd

  const auto draw_element = [&]() {
    const double u = rng.uniform();
    if (u < 0.55) return Element::carbon;
    if (u < 0.70) return Element::nitrogen;
    if (u < 0.90) return Element::oxygen;
    return Element::other;
  };

  const int n_ligand = 8 + static_cast<int>(rng.below(13));    // 8..20
  for (int i = 0; i < n_ligand; ++i) {
    AtomRecord atom;
    atom.role = Role::ligand;
    atom.element = draw_element();
    for (int k = 0; k < 3; ++k) atom.position[k] = rng.normal(0.0, 1.8);
    sample.atoms.push_back(atom);
  }
  const int n_protein = 20 + static_cast<int>(rng.below(41));  // 20..60
  for (int i = 0; i < n_protein; ++i) {
    AtomRecord atom;
    atom.role = Role::protein;
    atom.element = draw_element();
    double dir[3], norm = 0.0;
    for (double& d : dir) {
      d = rng.normal();
      norm += d * d;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) norm = 1.0;
    const double radius = 2.5 + 3.5 * rng.uniform();  // shell around ligand
    for (int k = 0; k < 3; ++k) atom.position[k] = dir[k] / norm * radius;
    sample.atoms.push_back(atom);
  }
  return sample;
}

}  // namespace detail_synth

// Deterministic per seed. Teacher filters are drawn like any fresh model;
// the teacher readout is drawn from a binding-energy-like range (both weights
// negative, at least 4 kcal/mol apart) so labels carry a learnable spread.
inline std::vector<EncodedState> synth_dataset(std::uint64_t seed,
                                               long long count, int n_qubits,
                                               double noise_sigma = 0.5) {
  if (count < 0) throw DomainError("synth_dataset: count must be >= 0");
  if (noise_sigma < 0.0)
    throw DomainError("synth_dataset: noise sigma must be >= 0");
  const int side = side_for_qubits(n_qubits);
  const auto& arch = teacher_arch(n_qubits);

  qcbind::detail::Rng rng(qcbind::detail::mix_seed(seed, /*stream=*/7));
  forward::ModelParams teacher =
      trainer::init_params(arch, rng.next(), 0.0, 1.0);
  teacher.w0 = -2.0 - 6.0 * rng.uniform();
  teacher.w1 = teacher.w0 - 4.0 - 6.0 * rng.uniform();
  const auto projected = forward::project_filters(teacher);

  std::vector<EncodedState> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    EncodedState state;
    for (int attempt = 0;; ++attempt) {
      const ComplexSample cloud = detail_synth::random_cloud(rng);
      try {
        const VoxelGrid grid = downsample(voxelize(cloud), side);
        state = normalize_encode(grid, 0.0);
        break;
      } catch (const DataError&) {
        if (attempt >= 16)
          throw DataError("synth_dataset: could not draw a non-degenerate "
                          "cloud");
      }
    }
    char id[32];
    std::snprintf(id, sizeof id, "synth-%06lld", i);
    state.id = id;
    const forward::Prediction pred = forward::forward_projected(
        state.amplitudes, projected, teacher.w0, teacher.w1, arch);
    state.label_dg = pred.dg_pred + rng.normal(0.0, noise_sigma);
    out.push_back(std::move(state));
  }
  return out;
}

}  // namespace qcbind::ingest

#endif  // QCBIND_SYNTH_HPP
