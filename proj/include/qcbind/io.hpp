// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// File formats: the little-endian binary dataset and checkpoint containers,
// dataset manifests (one complex-file path per line), the key = value run
// configuration, and run manifest emission. All numbers round-trip exactly.

#ifndef QCBIND_IO_HPP
#define QCBIND_IO_HPP

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qcbind/common.hpp"
#include "qcbind/forward.hpp"
#include "qcbind/ingest.hpp"
#include "qcbind/noise.hpp"
#include "qcbind/trainer.hpp"

namespace qcbind::io {

// 17 significant digits: lossless text round-trip for binary64.
inline std::string format_f64(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline double parse_f64(const std::string& tok, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError(context + ": bad number '" + tok + "'");
  return v;
}

inline long long parse_i64(const std::string& tok,
                           const std::string& context) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError(context + ": bad integer '" + tok + "'");
  return v;
}

namespace detail_bin {

inline void write_u32(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
               static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  os.write(b, 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
  os.write(b, 8);
}

inline void write_f64(std::ostream& os, double v) {
  write_u64(os, std::bit_cast<std::uint64_t>(v));
}

inline void read_bytes(std::istream& is, char* dst, std::size_t n,
                       const std::string& path) {
  is.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw DataError("truncated file: " + path);
}

inline std::uint32_t read_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  read_bytes(is, reinterpret_cast<char*>(b), 4, path);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t read_u64(std::istream& is, const std::string& path) {
  unsigned char b[8];
  read_bytes(is, reinterpret_cast<char*>(b), 8, path);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline double read_f64(std::istream& is, const std::string& path) {
  return std::bit_cast<double>(read_u64(is, path));
}

inline void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is, const std::string& path) {
  const std::uint32_t len = read_u32(is, path);
  if (len > (1u << 20)) throw DataError("corrupt string length in " + path);
  std::string s(len, '\0');
  if (len) read_bytes(is, s.data(), len, path);
  return s;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  return is;
}

inline void check_magic(std::istream& is, const char* magic,
                        const std::string& path) {
  char got[4];
  read_bytes(is, got, 4, path);
  if (std::string_view(got, 4) != std::string_view(magic, 4))
    throw DataError("bad magic in " + path + " (expected " + magic + ")");
}

}  // namespace detail_bin

inline std::string read_text_file(const std::string& path) {
  auto is = detail_bin::open_in(path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

inline void write_text_file(const std::string& path,
                            std::string_view content) {
  auto os = detail_bin::open_out(path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Dataset container: "QCDS", u32 version, u32 n_qubits, u64 count, then per
// sample u32 id length + id bytes, f64 label, 2^n f64 amplitudes.
// Little-endian throughout.
// ---------------------------------------------------------------------------

struct Dataset {
  int n_qubits = 0;
  std::vector<ingest::EncodedState> samples;
};

inline void save_dataset(const std::string& path, const Dataset& ds) {
  const std::size_t dim = std::size_t{1} << ds.n_qubits;
  auto os = detail_bin::open_out(path);
  os.write("QCDS", 4);
  detail_bin::write_u32(os, 1);
  detail_bin::write_u32(os, static_cast<std::uint32_t>(ds.n_qubits));
  detail_bin::write_u64(os, ds.samples.size());
  for (const auto& s : ds.samples) {
    if (s.amplitudes.size() != dim)
      throw ShapeError("save_dataset: sample '" + s.id +
                       "' length does not match n_qubits");
    detail_bin::write_string(os, s.id);
    detail_bin::write_f64(os, s.label_dg);
    for (double a : s.amplitudes) detail_bin::write_f64(os, a);
  }
  if (!os) throw IoError("write failed: " + path);
}

inline Dataset load_dataset(const std::string& path) {
  auto is = detail_bin::open_in(path);
  detail_bin::check_magic(is, "QCDS", path);
  const std::uint32_t version = detail_bin::read_u32(is, path);
  if (version != 1)
    throw DataError("unsupported dataset version " + std::to_string(version) +
                    " in " + path);
  Dataset ds;
  ds.n_qubits = static_cast<int>(detail_bin::read_u32(is, path));
  if (ds.n_qubits < 1 || ds.n_qubits > 24)
    throw DataError("corrupt qubit count in " + path);
  const std::uint64_t count = detail_bin::read_u64(is, path);
  const std::size_t dim = std::size_t{1} << ds.n_qubits;
  ds.samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ingest::EncodedState s;
    s.id = detail_bin::read_string(is, path);
    s.label_dg = detail_bin::read_f64(is, path);
    s.amplitudes.resize(dim);
    for (double& a : s.amplitudes) a = detail_bin::read_f64(is, path);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Checkpoint container: "QCKP", u32 version, arch (name, n_qubits, layers),
// raw filter matrices row-major f64, readout weights. Bit-exact round-trip.
// ---------------------------------------------------------------------------

inline void save_checkpoint(const std::string& path,
                            const forward::ArchitectureSpec& arch,
                            const forward::ModelParams& params) {
  forward::check_params_match(params, arch);
  auto os = detail_bin::open_out(path);
  os.write("QCKP", 4);
  detail_bin::write_u32(os, 1);
  detail_bin::write_string(os, arch.name);
  detail_bin::write_u32(os, static_cast<std::uint32_t>(arch.n_qubits));
  detail_bin::write_u32(os, static_cast<std::uint32_t>(arch.layers.size()));
  for (const auto& layer : arch.layers) {
    detail_bin::write_u32(os, static_cast<std::uint32_t>(layer.arity));
    for (int q : layer.qubits)
      detail_bin::write_u32(os, static_cast<std::uint32_t>(q));
  }
  for (const auto& raw : params.raw_filters)
    for (double v : raw.entries.data) detail_bin::write_f64(os, v);
  detail_bin::write_f64(os, params.w0);
  detail_bin::write_f64(os, params.w1);
  if (!os) throw IoError("write failed: " + path);
}

struct Checkpoint {
  forward::ArchitectureSpec arch;
  forward::ModelParams params;
};

inline Checkpoint load_checkpoint(const std::string& path) {
  auto is = detail_bin::open_in(path);
  detail_bin::check_magic(is, "QCKP", path);
  const std::uint32_t version = detail_bin::read_u32(is, path);
  if (version != 1)
    throw DataError("unsupported checkpoint version " +
                    std::to_string(version) + " in " + path);
  Checkpoint ck;
  ck.arch.name = detail_bin::read_string(is, path);
  ck.arch.n_qubits = static_cast<int>(detail_bin::read_u32(is, path));
  const std::uint32_t n_layers = detail_bin::read_u32(is, path);
  if (ck.arch.n_qubits < 1 || ck.arch.n_qubits > 24 || n_layers > 64)
    throw DataError("corrupt checkpoint header in " + path);
  for (std::uint32_t k = 0; k < n_layers; ++k) {
    forward::Layer layer;
    layer.arity = static_cast<int>(detail_bin::read_u32(is, path));
    if (layer.arity < 1 || layer.arity > 12)
      throw DataError("corrupt layer arity in " + path);
    layer.qubits.resize(layer.arity);
    for (int& q : layer.qubits)
      q = static_cast<int>(detail_bin::read_u32(is, path));
    ck.arch.layers.push_back(std::move(layer));
  }
  forward::validate_arch(ck.arch);
  for (const auto& layer : ck.arch.layers) {
    const int side = 1 << layer.arity;
    linalg::RawFilter raw{layer.arity, linalg::Matrix(side, side)};
    for (double& v : raw.entries.data) v = detail_bin::read_f64(is, path);
    ck.params.raw_filters.push_back(std::move(raw));
  }
  ck.params.w0 = detail_bin::read_f64(is, path);
  ck.params.w1 = detail_bin::read_f64(is, path);
  return ck;
}

// ---------------------------------------------------------------------------
// Dataset manifest: one complex-file path per line; blank lines and '#'
// comments ignored.
// ---------------------------------------------------------------------------

inline std::vector<std::string> read_manifest(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> entries;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = ingest::detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    entries.push_back(t);
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Run configuration: `key = value` lines, '#' comments. Keys:
//   arch, arch_file, train_dataset, test_dataset, train_manifest,
//   test_manifest, lr, momentum, batch_size, steps, epochs, seed, init_low,
//   init_high, eval_interval, noise.strategy, noise.depol_p,
//   noise.phase_gamma, out_dir
// ---------------------------------------------------------------------------

struct RunConfig {
  std::string arch_name = "fig1a";
  std::string arch_file;
  std::string train_dataset, test_dataset;
  std::string train_manifest, test_manifest;
  trainer::TrainConfig train;
  bool steps_set = false;
  std::optional<long long> epochs;
  noise::NoiseConfig noise;
  std::string out_dir = "qcbind_run";
};

inline void apply_key(RunConfig& rc, const std::string& key,
                      const std::string& value) {
  const std::string ctx = "config key '" + key + "'";
  if (key == "arch") rc.arch_name = value;
  else if (key == "arch_file") rc.arch_file = value;
  else if (key == "train_dataset") rc.train_dataset = value;
  else if (key == "test_dataset") rc.test_dataset = value;
  else if (key == "train_manifest") rc.train_manifest = value;
  else if (key == "test_manifest") rc.test_manifest = value;
  else if (key == "lr") rc.train.lr = parse_f64(value, ctx);
  else if (key == "momentum") rc.train.momentum = parse_f64(value, ctx);
  else if (key == "batch_size")
    rc.train.batch_size = static_cast<int>(parse_i64(value, ctx));
  else if (key == "steps") {
    rc.train.steps = parse_i64(value, ctx);
    rc.steps_set = true;
  } else if (key == "epochs") rc.epochs = parse_i64(value, ctx);
  else if (key == "seed")
    rc.train.seed = static_cast<std::uint64_t>(parse_i64(value, ctx));
  else if (key == "init_low") rc.train.init_low = parse_f64(value, ctx);
  else if (key == "init_high") rc.train.init_high = parse_f64(value, ctx);
  else if (key == "eval_interval")
    rc.train.eval_interval = parse_i64(value, ctx);
  else if (key == "noise.strategy")
    rc.noise.strategy = noise::parse_strategy(value);
  else if (key == "noise.depol_p") rc.noise.depol_p = parse_f64(value, ctx);
  else if (key == "noise.phase_gamma")
    rc.noise.phase_gamma = parse_f64(value, ctx);
  else if (key == "out_dir") rc.out_dir = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

inline RunConfig parse_run_config(std::string_view text) {
  RunConfig rc;
  std::istringstream is{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = ingest::detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = ingest::detail::trim(t.substr(0, eq));
    const std::string value = ingest::detail::trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key or value");
    apply_key(rc, key, value);
  }
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  try {
    return parse_run_config(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Fully resolved key/value echo, in declaration order, for manifest files.
inline std::vector<std::pair<std::string, std::string>> resolved_entries(
    const RunConfig& rc) {
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("arch", rc.arch_name);
  if (!rc.arch_file.empty()) kv.emplace_back("arch_file", rc.arch_file);
  if (!rc.train_dataset.empty())
    kv.emplace_back("train_dataset", rc.train_dataset);
  if (!rc.test_dataset.empty())
    kv.emplace_back("test_dataset", rc.test_dataset);
  if (!rc.train_manifest.empty())
    kv.emplace_back("train_manifest", rc.train_manifest);
  if (!rc.test_manifest.empty())
    kv.emplace_back("test_manifest", rc.test_manifest);
  kv.emplace_back("lr", format_f64(rc.train.lr));
  kv.emplace_back("momentum", format_f64(rc.train.momentum));
  kv.emplace_back("batch_size", std::to_string(rc.train.batch_size));
  kv.emplace_back("steps", std::to_string(rc.train.steps));
  if (rc.epochs) kv.emplace_back("epochs", std::to_string(*rc.epochs));
  kv.emplace_back("seed", std::to_string(rc.train.seed));
  kv.emplace_back("init_low", format_f64(rc.train.init_low));
  kv.emplace_back("init_high", format_f64(rc.train.init_high));
  kv.emplace_back("eval_interval", std::to_string(rc.train.eval_interval));
  kv.emplace_back("noise.strategy", noise::strategy_name(rc.noise.strategy));
  kv.emplace_back("noise.depol_p", format_f64(rc.noise.depol_p));
  kv.emplace_back("noise.phase_gamma", format_f64(rc.noise.phase_gamma));
  kv.emplace_back("out_dir", rc.out_dir);
  return kv;
}

// Appends a run manifest: resolved configuration plus the only place where
// timestamps and wall time are recorded.
inline void write_run_manifest(
    const std::string& path, const std::string& subcommand,
    const std::vector<std::pair<std::string, std::string>>& entries,
    double wall_seconds) {
  std::ostringstream os;
  os << "# qcbind run manifest\n";
  os << "subcommand = " << subcommand << "\n";
  for (const auto& [k, v] : entries) os << k << " = " << v << "\n";
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  os << "timestamp_utc = " << stamp << "\n";
  os << "wall_seconds = " << format_f64(wall_seconds) << "\n";
  write_text_file(path, os.str());
}

}  // namespace qcbind::io

#endif  // QCBIND_IO_HPP
