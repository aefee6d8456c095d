// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// Noise-free statevector model: architecture plans (wiring of filters onto
// qubits), the forward pass with a single-qubit readout, and the
// block-diagonal batched application demo.

#ifndef QCBIND_FORWARD_HPP
#define QCBIND_FORWARD_HPP

#include <algorithm>
#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcbind/common.hpp"
#include "qcbind/linalg.hpp"

namespace qcbind::forward {

struct Layer {
  int arity = 0;
  std::vector<int> qubits;  // qubits[0] maps to the filter's top axis
};

struct ArchitectureSpec {
  std::string name;
  int n_qubits = 0;
  std::vector<Layer> layers;
  int measured_qubit = 0;
  std::string count_note;  // set when the independent count needs a footnote
};

// Raw (pre-projection) filters plus the linear readout.
struct ModelParams {
  std::vector<linalg::RawFilter> raw_filters;
  double w0 = 0.0;  // weight on P(|0>)
  double w1 = 0.0;  // weight on P(|1>)
};

struct Prediction {
  double p0 = 0.0;
  double p1 = 0.0;
  double dg_pred = 0.0;  // kcal/mol
};

inline void validate_arch(const ArchitectureSpec& arch) {
  if (arch.n_qubits < 1)
    throw WiringError("architecture '" + arch.name + "': needs >= 1 qubit");
  if (arch.measured_qubit != 0)
    throw WiringError("architecture '" + arch.name +
                      "': measured qubit must be 0");
  if (arch.layers.empty())
    throw WiringError("architecture '" + arch.name + "': no filter layers");
  for (std::size_t k = 0; k < arch.layers.size(); ++k) {
    const Layer& layer = arch.layers[k];
    if (layer.arity < 1 ||
        layer.arity != static_cast<int>(layer.qubits.size()))
      throw WiringError("architecture '" + arch.name + "': layer " +
                        std::to_string(k) +
                        " arity does not match its qubit list");
    try {
      linalg::detail_axes::check_wiring(layer.qubits, arch.n_qubits);
    } catch (const WiringError& e) {
      throw WiringError("architecture '" + arch.name + "': layer " +
                        std::to_string(k) + ": " + e.what());
    }
  }
  const auto& last = arch.layers.back().qubits;
  if (std::find(last.begin(), last.end(), arch.measured_qubit) == last.end())
    throw WiringError("architecture '" + arch.name +
                      "': funnel violation: final layer does not include "
                      "the measured qubit");
}

// The five shipped plans. fig1a's wiring is fixed; fig1b/fig1c/fig1f/fig1g
// follow the same funnel pattern: local filters cover disjoint qubit groups
// and a final filter over the lowest-indexed qubits feeds qubit 0.
inline const std::vector<ArchitectureSpec>& builtin_archs() {
  static const std::vector<ArchitectureSpec> archs = [] {
    std::vector<ArchitectureSpec> v;
    v.push_back({"fig1a",
                 9,
                 {{3, {0, 3, 4}}, {3, {1, 5, 6}}, {3, {2, 7, 8}},
                  {3, {0, 1, 2}}},
                 0,
                 "independent count applies 2^m(2^m-1)/2 to each of the four "
                 "filters; dropping one filter from the count gives 86 "
                 "instead of 114"});
    v.push_back({"fig1b",
                 9,
                 {{4, {0, 3, 4, 5}}, {4, {1, 6, 7, 8}}, {3, {0, 1, 2}}},
                 0,
                 ""});
    v.push_back({"fig1c",
                 9,
                 {{5, {0, 3, 4, 5, 6}}, {5, {0, 1, 2, 7, 8}}},
                 0,
                 ""});
    v.push_back({"fig1f",
                 12,
                 {{4, {0, 3, 4, 5}}, {4, {1, 6, 7, 8}}, {4, {2, 9, 10, 11}},
                  {3, {0, 1, 2}}},
                 0,
                 ""});
    v.push_back({"fig1g",
                 12,
                 {{5, {0, 3, 4, 5, 6}}, {5, {1, 7, 8, 9, 10}},
                  {4, {0, 1, 2, 11}}},
                 0,
                 ""});
    for (const auto& a : v) validate_arch(a);
    return v;
  }();
  return archs;
}

inline const ArchitectureSpec& builtin_arch(std::string_view name) {
  for (const auto& a : builtin_archs())
    if (a.name == name) return a;
  throw ConfigError("unknown architecture '" + std::string(name) +
                    "' (builtins: fig1a fig1b fig1c fig1f fig1g)");
}

inline std::pair<long long, long long> count_params(
    const ArchitectureSpec& arch) {
  std::vector<int> arities;
  arities.reserve(arch.layers.size());
  for (const auto& layer : arch.layers) arities.push_back(layer.arity);
  return linalg::param_counts(arities);
}

inline std::vector<linalg::ProjectedFilter> project_filters(
    const ModelParams& params) {
  std::vector<linalg::ProjectedFilter> out;
  out.reserve(params.raw_filters.size());
  for (const auto& raw : params.raw_filters)
    out.push_back(linalg::project_with_factors(raw));
  return out;
}

inline void check_params_match(const ModelParams& params,
                               const ArchitectureSpec& arch) {
  if (params.raw_filters.size() != arch.layers.size())
    throw ShapeError("model has " + std::to_string(params.raw_filters.size()) +
                     " filters but architecture '" + arch.name + "' expects " +
                     std::to_string(arch.layers.size()));
  for (std::size_t k = 0; k < arch.layers.size(); ++k)
    if (params.raw_filters[k].arity != arch.layers[k].arity)
      throw ShapeError("filter " + std::to_string(k) + " arity mismatch");
}

// P(measured qubit = |0>): with qubit 0 as the most significant index bit the
// |0> outcome is the first half of the amplitude vector.
inline double probability_zero(std::span<const double> state) {
  double p0 = 0.0;
  for (std::size_t i = 0; i < state.size() / 2; ++i) p0 += state[i] * state[i];
  return p0;
}

inline Prediction make_prediction(double p0, double w0, double w1) {
  p0 = std::clamp(p0, 0.0, 1.0);
  Prediction pred;
  pred.p0 = p0;
  pred.p1 = 1.0 - p0;
  pred.dg_pred = w0 * pred.p0 + w1 * pred.p1;
  return pred;
}

// Forward pass on pre-projected filters. When `trace` is given it receives
// the statevector before layer 0 and after every layer (layers + 1 entries).
inline Prediction forward_projected(
    std::span<const double> state,
    std::span<const linalg::ProjectedFilter> filters, double w0, double w1,
    const ArchitectureSpec& arch,
    std::vector<std::vector<double>>* trace = nullptr) {
  const std::size_t dim = std::size_t{1} << arch.n_qubits;
  if (state.size() != dim)
    throw ShapeError("state length " + std::to_string(state.size()) +
                     " does not match architecture '" + arch.name + "' (2^" +
                     std::to_string(arch.n_qubits) + ")");
  if (filters.size() != arch.layers.size())
    throw ShapeError("filter count does not match architecture layers");

  std::vector<double> cur(state.begin(), state.end());
  if (trace) {
    trace->clear();
    trace->push_back(cur);
  }
  for (std::size_t k = 0; k < arch.layers.size(); ++k) {
    linalg::apply_matrix_on_qubits(cur, filters[k].q, arch.layers[k].qubits,
                                   arch.n_qubits);
    if (trace) trace->push_back(cur);
  }
  return make_prediction(probability_zero(cur), w0, w1);
}

inline Prediction forward(std::span<const double> state,
                          const ModelParams& params,
                          const ArchitectureSpec& arch) {
  validate_arch(arch);
  check_params_match(params, arch);
  const auto filters = project_filters(params);
  return forward_projected(state, filters, params.w0, params.w1, arch);
}

// Finite-shot readout: Bernoulli sampling of the measured qubit with a seeded
// generator. Exact probabilities remain the default evaluation mode.
inline Prediction forward_sampled(std::span<const double> state,
                                  const ModelParams& params,
                                  const ArchitectureSpec& arch,
                                  long long shots, std::uint64_t seed) {
  if (shots < 1) throw DomainError("forward_sampled: shots must be >= 1");
  const Prediction exact = forward(state, params, arch);
  qcbind::detail::Rng rng(seed);
  long long zeros = 0;
  for (long long s = 0; s < shots; ++s)
    if (rng.uniform() < exact.p0) ++zeros;
  return make_prediction(static_cast<double>(zeros) / shots, params.w0,
                         params.w1);
}

// Applies one 2^n x 2^n operator to 2^m states at once by concatenating them
// into a single 2^(m+n) register and acting with the block-diagonal operator
// diag(u, ..., u); equivalent to applying u to each state independently.
inline std::vector<std::vector<double>> block_parallel_apply(
    const std::vector<std::vector<double>>& states,
    const linalg::Matrix& u_bind) {
  if (states.empty()) throw ShapeError("block_parallel_apply: no states");
  if (u_bind.rows != u_bind.cols)
    throw ShapeError("block_parallel_apply: operator must be square");
  const int m = qcbind::detail::log2_exact(states.size(),
                                           "block_parallel_apply state count");
  const int n = qcbind::detail::log2_exact(
      static_cast<std::size_t>(u_bind.rows), "block_parallel_apply operator");
  const std::size_t len = std::size_t{1} << n;
  for (const auto& s : states)
    if (s.size() != len)
      throw ShapeError("block_parallel_apply: state length " +
                       std::to_string(s.size()) + " != operator side " +
                       std::to_string(len));

  const double scale = 1.0 / std::sqrt(static_cast<double>(states.size()));
  std::vector<double> reg(states.size() * len);
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < len; ++j) reg[i * len + j] = states[i][j] * scale;

  // The shared operator acts on the low-order n qubits; the extra m qubits
  // select the block.
  std::vector<int> low_qubits(n);
  for (int k = 0; k < n; ++k) low_qubits[k] = m + k;
  linalg::apply_matrix_on_qubits(reg, u_bind, low_qubits, m + n);

  std::vector<std::vector<double>> out(states.size(),
                                       std::vector<double>(len));
  const double unscale = 1.0 / scale;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = 0; j < len; ++j) out[i][j] = reg[i * len + j] * unscale;
  return out;
}

// ---------------------------------------------------------------------------
// Architecture DSL:
//   arch <name> { qubits <n>; filter <m> on [i, j, ...]; ...; measure 0 }
// '#' starts a comment; a file may hold several arch blocks.
// ---------------------------------------------------------------------------

namespace detail_dsl {

struct Token {
  std::string text;
  int line = 0;
};

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> toks;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (std::string_view("{}[],;").find(ch) != std::string_view::npos) {
      toks.push_back({std::string(1, ch), line});
      ++i;
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
        ch == '-') {
      std::size_t b = i;
      while (i < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[i])) ||
              text[i] == '_' || text[i] == '-'))
        ++i;
      toks.push_back({std::string(text.substr(b, i - b)), line});
      continue;
    }
    throw ConfigError("arch file: unexpected character '" +
                      std::string(1, ch) + "' at line " +
                      std::to_string(line));
  }
  return toks;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<ArchitectureSpec> parse() {
    std::vector<ArchitectureSpec> out;
    while (!done()) out.push_back(parse_arch());
    if (out.empty()) throw ConfigError("arch file: no arch blocks found");
    return out;
  }

 private:
  bool done() const { return pos_ >= toks_.size(); }

  const Token& peek() const {
    if (done()) throw ConfigError("arch file: unexpected end of input");
    return toks_[pos_];
  }

  Token take() {
    Token t = peek();
    ++pos_;
    return t;
  }

  void expect(std::string_view text) {
    const Token t = take();
    if (t.text != text)
      throw ConfigError("arch file line " + std::to_string(t.line) +
                        ": expected '" + std::string(text) + "', got '" +
                        t.text + "'");
  }

  int take_int() {
    const Token t = take();
    for (char c : t.text)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw ConfigError("arch file line " + std::to_string(t.line) +
                          ": expected an integer, got '" + t.text + "'");
    try {
      return std::stoi(t.text);
    } catch (const std::exception&) {
      throw ConfigError("arch file line " + std::to_string(t.line) +
                        ": integer out of range '" + t.text + "'");
    }
  }

  ArchitectureSpec parse_arch() {
    expect("arch");
    ArchitectureSpec arch;
    arch.name = take().text;
    expect("{");
    bool have_qubits = false;
    while (peek().text != "}") {
      const Token kw = take();
      if (kw.text == "qubits") {
        arch.n_qubits = take_int();
        have_qubits = true;
      } else if (kw.text == "filter") {
        Layer layer;
        layer.arity = take_int();
        expect("on");
        expect("[");
        while (true) {
          layer.qubits.push_back(take_int());
          const Token sep = take();
          if (sep.text == "]") break;
          if (sep.text != ",")
            throw ConfigError("arch file line " + std::to_string(sep.line) +
                              ": expected ',' or ']' in qubit list");
        }
        arch.layers.push_back(std::move(layer));
      } else if (kw.text == "measure") {
        arch.measured_qubit = take_int();
      } else {
        throw ConfigError("arch file line " + std::to_string(kw.line) +
                          ": unknown statement '" + kw.text + "'");
      }
      expect(";");
    }
    expect("}");
    if (!have_qubits)
      throw ConfigError("arch '" + arch.name + "': missing 'qubits' statement");
    validate_arch(arch);
    return arch;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail_dsl

inline std::vector<ArchitectureSpec> parse_arch_text(std::string_view text) {
  return detail_dsl::Parser(detail_dsl::tokenize(text)).parse();
}

inline std::string arch_to_text(const ArchitectureSpec& arch) {
  std::string out = "arch " + arch.name + " {\n  qubits " +
                    std::to_string(arch.n_qubits) + ";\n";
  for (const auto& layer : arch.layers) {
    out += "  filter " + std::to_string(layer.arity) + " on [";
    for (std::size_t i = 0; i < layer.qubits.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(layer.qubits[i]);
    }
    out += "];\n";
  }
  out += "  measure " + std::to_string(arch.measured_qubit) + ";\n}\n";
  return out;
}

}  // namespace qcbind::forward

#endif  // QCBIND_FORWARD_HPP
