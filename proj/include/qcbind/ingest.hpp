// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// Structure ingestion: parse protein-ligand complex files, rasterize atoms
// into an 8-channel occupancy grid centered on the ligand, max-pool, and
// normalize into a unit amplitude vector with the binding label in kcal/mol.

#ifndef QCBIND_INGEST_HPP
#define QCBIND_INGEST_HPP

#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qcbind/common.hpp"

namespace qcbind::ingest {

enum class Role { ligand, protein };
enum class Element { carbon, nitrogen, oxygen, other };

struct AtomRecord {
  Role role;
  Element element;
  std::array<double, 3> position;  // Angstrom
};

struct ComplexSample {
  std::string id;
  std::vector<AtomRecord> atoms;
  double pkd = 0.0;
};

inline constexpr int kChannels = 8;
inline constexpr int kFullSide = 32;
inline constexpr double kGridExtent = 16.0;  // Angstrom per grid edge
inline constexpr double kFullSpacing = kGridExtent / kFullSide;  // 0.5 A

// 8-channel occupancy grid; values are indexed (channel, x, y, z).
struct VoxelGrid {
  int side = 0;
  double spacing = 0.0;  // Angstrom per voxel
  std::vector<double> values;

  VoxelGrid() = default;
  VoxelGrid(int side_, double spacing_)
      : side(side_),
        spacing(spacing_),
        values(static_cast<std::size_t>(kChannels) * side_ * side_ * side_,
               0.0) {}

  std::size_t index(int c, int x, int y, int z) const {
    return ((static_cast<std::size_t>(c) * side + x) * side + y) * side + z;
  }
  double& at(int c, int x, int y, int z) { return values[index(c, x, y, z)]; }
  double at(int c, int x, int y, int z) const {
    return values[index(c, x, y, z)];
  }
};

// Flattened, norm-1 amplitude vector plus its regression label.
struct EncodedState {
  std::string id;
  std::vector<double> amplitudes;  // length 2^n
  double label_dg = 0.0;           // kcal/mol
};

inline double vdw_radius(Element e) {
  switch (e) {
    case Element::carbon: return 1.9;
    case Element::nitrogen: return 1.8;
    case Element::oxygen: return 1.7;
    case Element::other: return 2.0;
  }
  return 2.0;  // unreachable
}

// Ligand channels 0-3, protein channels 4-7, each ordered C, N, O, other.
inline int channel_index(Role role, Element element) {
  return (role == Role::protein ? 4 : 0) + static_cast<int>(element);
}

// Smooth occupancy profile of one atom as a function of r = distance / vdW
// radius: exp(-2 r^2) inside the radius, ((3 - 2r)/e)^2 out to 1.5 radii,
// zero beyond. Continuous at both breakpoints.
inline double occupancy(double r) {
  if (!(r >= 0.0))
    throw DomainError("occupancy: distance ratio must be >= 0");
  if (r < 1.0) return std::exp(-2.0 * r * r);
  if (r < 1.5) {
    const double t = (3.0 - 2.0 * r) / std::numbers::e;
    return t * t;
  }
  return 0.0;
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_double(const std::string& tok, int line_no,
                           const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what +
                     " '" + tok + "'");
  return v;
}

// nullopt means hydrogen (dropped); anything not C/N/O maps to other.
inline std::optional<Element> element_from_token(const std::string& tok) {
  const std::string u = upper(tok);
  if (u == "H") return std::nullopt;
  if (u == "C") return Element::carbon;
  if (u == "N") return Element::nitrogen;
  if (u == "O") return Element::oxygen;
  return Element::other;
}

}  // namespace detail

// Parses the canonical complex format: one `pkd <value>` header line plus one
// `P|L <element> <x> <y> <z>` line per atom, '#' comments and blank lines
// ignored. Hydrogens are dropped at parse time.
inline ComplexSample parse_complex(std::string_view text,
                                   std::string id = "") {
  ComplexSample sample;
  sample.id = std::move(id);
  bool have_pkd = false;
  int n_ligand = 0, n_protein = 0;

  std::istringstream stream{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    const std::string line = detail::trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    const auto toks = detail::split_ws(line);

    if (detail::upper(toks[0]) == "PKD") {
      if (toks.size() != 2)
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected 'pkd <value>'");
      if (have_pkd)
        throw ParseError("line " + std::to_string(line_no) +
                         ": duplicate pkd header");
      sample.pkd = detail::parse_double(toks[1], line_no, "pkd value");
      have_pkd = true;
      continue;
    }

    if (toks.size() != 5)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'P|L <element> <x> <y> <z>'");
    const std::string role_tok = detail::upper(toks[0]);
    Role role;
    if (role_tok == "P")
      role = Role::protein;
    else if (role_tok == "L")
      role = Role::ligand;
    else
      throw ParseError("line " + std::to_string(line_no) + ": unknown role '" +
                       toks[0] + "'");
    const auto element = detail::element_from_token(toks[1]);
    AtomRecord atom;
    atom.role = role;
    for (int k = 0; k < 3; ++k)
      atom.position[k] =
          detail::parse_double(toks[2 + k], line_no, "coordinate");
    if (!element) continue;  // hydrogen
    atom.element = *element;
    sample.atoms.push_back(atom);
    (role == Role::ligand ? n_ligand : n_protein) += 1;
  }

  if (!have_pkd) throw DataError("missing pkd header line");
  if (n_ligand == 0 || n_protein == 0)
    throw DataError("degenerate complex: needs at least one ligand and one "
                    "protein atom");
  return sample;
}

// Unweighted mean of ligand atom coordinates.
inline std::array<double, 3> ligand_centroid(const ComplexSample& sample) {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int n = 0;
  for (const auto& a : sample.atoms) {
    if (a.role != Role::ligand) continue;
    for (int k = 0; k < 3; ++k) c[k] += a.position[k];
    ++n;
  }
  if (n == 0) throw DataError("degenerate complex: no ligand atoms");
  for (int k = 0; k < 3; ++k) c[k] /= n;
  return c;
}

// Rasterizes the sample onto the full 32^3 grid (0.5 A spacing, voxel
// centers spanning -7.75 .. +7.75 A about the ligand centroid). Each voxel
// accumulates the occupancy of every same-channel atom within 1.5 radii;
// atoms beyond the grid simply contribute to no voxel.
inline VoxelGrid voxelize(const ComplexSample& sample) {
  VoxelGrid grid(kFullSide, kFullSpacing);
  const auto center = ligand_centroid(sample);
  const double origin = -0.5 * (kFullSide - 1) * kFullSpacing;  // -7.75 A

  for (const auto& atom : sample.atoms) {
    const double radius = vdw_radius(atom.element);
    const double reach = 1.5 * radius;
    const int channel = channel_index(atom.role, atom.element);

    std::array<double, 3> rel;  // atom position relative to grid origin
    std::array<int, 3> lo, hi;
    bool in_reach = true;
    for (int k = 0; k < 3; ++k) {
      rel[k] = atom.position[k] - center[k] - origin;
      lo[k] = std::max(0, static_cast<int>(
                              std::ceil((rel[k] - reach) / kFullSpacing)));
      hi[k] = std::min(kFullSide - 1,
                       static_cast<int>(
                           std::floor((rel[k] + reach) / kFullSpacing)));
      if (lo[k] > hi[k]) in_reach = false;
    }
    if (!in_reach) continue;

    for (int x = lo[0]; x <= hi[0]; ++x) {
      const double dx = x * kFullSpacing - rel[0];
      for (int y = lo[1]; y <= hi[1]; ++y) {
        const double dy = y * kFullSpacing - rel[1];
        for (int z = lo[2]; z <= hi[2]; ++z) {
          const double dz = z * kFullSpacing - rel[2];
          const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
          const double r = dist / radius;
          if (r >= 1.5) continue;
          grid.at(channel, x, y, z) += occupancy(r);
        }
      }
    }
  }
  return grid;
}

// Non-overlapping max-pool from 32^3 down to 8^3 or 4^3, per channel.
inline VoxelGrid downsample(const VoxelGrid& grid, int target_side) {
  if (grid.side != kFullSide)
    throw ConfigError("downsample expects a full-resolution 32^3 grid");
  if (target_side != 8 && target_side != 4)
    throw ConfigError("unsupported downsample target side " +
                      std::to_string(target_side) + " (use 8 or 4)");
  const int window = grid.side / target_side;
  VoxelGrid out(target_side, grid.spacing * window);
  for (int c = 0; c < kChannels; ++c)
    for (int x = 0; x < target_side; ++x)
      for (int y = 0; y < target_side; ++y)
        for (int z = 0; z < target_side; ++z) {
          double best = 0.0;
          for (int i = 0; i < window; ++i)
            for (int j = 0; j < window; ++j)
              for (int k = 0; k < window; ++k)
                best = std::max(best, grid.at(c, x * window + i,
                                              y * window + j, z * window + k));
          out.at(c, x, y, z) = best;
        }
  return out;
}

// Number of qubits needed for an 8-channel grid of the given side.
inline int qubits_for_side(int side) {
  if (side == 4) return 9;    // 8 * 4^3 = 512
  if (side == 8) return 12;   // 8 * 8^3 = 4096
  throw ConfigError("no qubit mapping for grid side " + std::to_string(side));
}

inline int side_for_qubits(int n_qubits) {
  if (n_qubits == 9) return 4;
  if (n_qubits == 12) return 8;
  throw ConfigError("no grid mapping for " + std::to_string(n_qubits) +
                    " qubits (use 9 or 12)");
}

// Scales ligand channels (0-3) and protein channels (4-7) so each group's
// squared sum is exactly 0.5, then flattens with
// index = channel * side^3 + x * side^2 + y * side + z.
inline EncodedState normalize_encode(const VoxelGrid& grid, double label_dg,
                                     std::string id = "") {
  if (grid.side != 8 && grid.side != 4)
    throw ConfigError("normalize_encode expects an 8^3 or 4^3 grid");
  const std::size_t per_role = grid.values.size() / 2;
  double sq_lig = 0.0, sq_prot = 0.0;
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const double v = grid.values[i];
    (i < per_role ? sq_lig : sq_prot) += v * v;
  }
  // The floor also rejects denormal dust whose rescale factor would overflow.
  constexpr double kMinRoleWeight = 1e-300;
  if (sq_lig <= kMinRoleWeight || sq_prot <= kMinRoleWeight)
    throw DataError("degenerate sample: empty " +
                    std::string(sq_lig <= kMinRoleWeight ? "ligand"
                                                         : "protein") +
                    " occupancy after pooling");

  EncodedState state;
  state.id = std::move(id);
  state.label_dg = label_dg;
  state.amplitudes.resize(grid.values.size());
  const double scale_lig = std::sqrt(0.5 / sq_lig);
  const double scale_prot = std::sqrt(0.5 / sq_prot);
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    state.amplitudes[i] = grid.values[i] * (i < per_role ? scale_lig
                                                         : scale_prot);
  return state;
}

inline constexpr double kGasConstantKcal = 1.98720425864e-3;  // kcal/(mol K)
inline constexpr double kTemperatureK = 298.15;

// pK_d -> binding free energy in kcal/mol: dG = -ln(10) R T pK_d.
inline double pkd_to_dg(double pkd) {
  return -std::numbers::ln10 * kGasConstantKcal * kTemperatureK * pkd;
}

}  // namespace qcbind::ingest

#endif  // QCBIND_INGEST_HPP
