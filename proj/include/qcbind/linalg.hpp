// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense real linear algebra for quantum filters: orthogonal projection of raw
// parameter matrices (polar factor via SVD) and application of 2^m x 2^m
// filters to selected qubit axes of a 2^n amplitude vector.

#ifndef QCBIND_LINALG_HPP
#define QCBIND_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "qcbind/common.hpp"

namespace qcbind::linalg {

// Smallest singular value admitted by the projection; below this the polar
// factor direction is ill-defined.
inline constexpr double kSigmaMin = 1e-8;

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(int r, int c)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  const double* row(int r) const {
    return data.data() + static_cast<std::size_t>(r) * cols;
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  Matrix transposed() const {
    Matrix t(cols, rows);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  bool operator==(const Matrix& o) const = default;
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw ShapeError("matrix product: inner sizes differ");
  Matrix out(a.rows, b.cols);
  for (int r = 0; r < a.rows; ++r)
    for (int k = 0; k < a.cols; ++k) {
      const double v = a(r, k);
      if (v == 0.0) continue;
      for (int c = 0; c < b.cols; ++c) out(r, c) += v * b(k, c);
    }
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw ShapeError("max_abs_diff: shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

// max-norm of q^T q - I.
inline double orthogonality_error(const Matrix& q) {
  return max_abs_diff(multiply(q.transposed(), q), Matrix::identity(q.cols));
}

// Trainable filter parameters before the orthogonality projection.
struct RawFilter {
  int arity = 0;           // m; matrix side is 2^m
  Matrix entries;          // 2^m x 2^m
};

// Orthogonal filter actually applied to the state.
struct OrthFilter {
  int arity = 0;
  Matrix q;
};

// Projection together with the SVD factors needed by the backward pass.
struct ProjectedFilter {
  int arity = 0;
  Matrix q;                   // u * v^T, the polar factor
  Matrix u;
  Matrix v;
  std::vector<double> sigma;  // descending
};

namespace detail_eigen {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) e(r, c) = m(r, c);
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) m(r, c) = e(r, c);
  return m;
}

}  // namespace detail_eigen

// Polar projection with retained factors. Throws RankDeficiencyError when the
// smallest singular value is at or below kSigmaMin.
inline ProjectedFilter project_with_factors(const RawFilter& raw) {
  const int side = 1 << raw.arity;
  if (raw.entries.rows != side || raw.entries.cols != side)
    throw ShapeError("filter entries must be 2^m x 2^m for arity m=" +
                     std::to_string(raw.arity));
  for (double v : raw.entries.data)
    if (!std::isfinite(v)) throw DomainError("filter entries must be finite");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail_eigen::to_eigen(raw.entries),
                                        Eigen::ComputeFullU |
                                            Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s(side - 1) <= kSigmaMin)
    throw RankDeficiencyError(
        "projection ill-defined: smallest singular value " +
        std::to_string(s(side - 1)) + " <= " + std::to_string(kSigmaMin));

  ProjectedFilter pf;
  pf.arity = raw.arity;
  pf.u = detail_eigen::from_eigen(svd.matrixU());
  pf.v = detail_eigen::from_eigen(svd.matrixV());
  pf.sigma.assign(s.data(), s.data() + side);
  pf.q = detail_eigen::from_eigen(svd.matrixU() * svd.matrixV().transpose());
  return pf;
}

// Nearest orthogonal matrix in Frobenius norm (the polar factor u v^T).
inline OrthFilter project_orthogonal(const RawFilter& raw) {
  ProjectedFilter pf = project_with_factors(raw);
  return OrthFilter{pf.arity, std::move(pf.q)};
}

// Pulls a loss gradient back through the projection: given dL/dq, returns
// dL/dM for the raw matrix M = u diag(sigma) v^T whose polar factor is q.
// With A = u^T dM v the differential of q is u W v^T where
// W_ij = (A_ij - A_ji) / (sigma_i + sigma_j); transposing that linear map
// gives dL/dM = u C v^T with C_ij = (B_ij - B_ji) / (sigma_i + sigma_j) and
// B = u^T (dL/dq) v. Full rank keeps every denominator positive, so repeated
// singular values are fine.
inline Matrix polar_backward(const ProjectedFilter& pf, const Matrix& grad_q) {
  const int side = 1 << pf.arity;
  if (grad_q.rows != side || grad_q.cols != side)
    throw ShapeError("polar_backward: gradient shape mismatch");
  const Matrix b = multiply(multiply(pf.u.transposed(), grad_q), pf.v);
  Matrix c(side, side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j)
      c(i, j) = (b(i, j) - b(j, i)) / (pf.sigma[i] + pf.sigma[j]);
  return multiply(multiply(pf.u, c), pf.v.transposed());
}

namespace detail_axes {

// Precomputed index machinery for acting on a subset of qubit axes.
// Convention: qubit 0 is the most significant bit of the amplitude index, and
// qubits[0] is the most significant bit of the combined 2^m filter axis.
struct AxisPlan {
  std::size_t selected = 0;           // union of selected bit masks
  std::vector<std::size_t> offsets;   // combined index -> scattered bits
};

inline void check_wiring(std::span<const int> qubits, int n_qubits) {
  std::size_t seen = 0;
  for (int q : qubits) {
    if (q < 0 || q >= n_qubits)
      throw WiringError("qubit index " + std::to_string(q) +
                        " out of range for " + std::to_string(n_qubits) +
                        " qubits");
    const std::size_t mask = std::size_t{1} << q;
    if (seen & mask)
      throw WiringError("duplicate qubit index " + std::to_string(q));
    seen |= mask;
  }
}

inline AxisPlan make_axis_plan(std::span<const int> qubits, int n_qubits) {
  check_wiring(qubits, n_qubits);
  const int m = static_cast<int>(qubits.size());
  AxisPlan plan;
  plan.offsets.assign(std::size_t{1} << m, 0);
  for (int k = 0; k < m; ++k) {
    const std::size_t mask = std::size_t{1} << (n_qubits - 1 - qubits[k]);
    plan.selected |= mask;
    for (std::size_t a = 0; a < plan.offsets.size(); ++a)
      if ((a >> (m - 1 - k)) & 1) plan.offsets[a] |= mask;
  }
  return plan;
}

}  // namespace detail_axes

// In-place contraction of `mat` against the listed qubit axes of `state`.
// Accepts any square matrix of side 2^m; orthogonality is the caller's
// contract when norm preservation matters.
inline void apply_matrix_on_qubits(std::span<double> state, const Matrix& mat,
                                   std::span<const int> qubits, int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::size_t block = std::size_t{1} << qubits.size();
  if (state.size() != dim)
    throw ShapeError("state length " + std::to_string(state.size()) +
                     " does not match 2^" + std::to_string(n_qubits));
  if (mat.rows != static_cast<int>(block) || mat.cols != static_cast<int>(block))
    throw ShapeError("filter matrix side does not match qubit count");
  const auto plan = detail_axes::make_axis_plan(qubits, n_qubits);

  std::vector<double> in(block);
  std::vector<double> out(block);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & plan.selected) continue;
    for (std::size_t b = 0; b < block; ++b)
      in[b] = state[base | plan.offsets[b]];
    for (std::size_t a = 0; a < block; ++a) {
      const double* mrow = mat.row(static_cast<int>(a));
      double acc = 0.0;
      for (std::size_t b = 0; b < block; ++b) acc += mrow[b] * in[b];
      out[a] = acc;
    }
    for (std::size_t a = 0; a < block; ++a)
      state[base | plan.offsets[a]] = out[a];
  }
}

// Value-returning filter application; n is inferred from the state length.
inline std::vector<double> apply_filter(std::span<const double> state,
                                        const OrthFilter& filter,
                                        const std::vector<int>& qubits) {
  const int n_qubits = qcbind::detail::log2_exact(state.size(), "apply_filter");
  if (static_cast<int>(qubits.size()) != filter.arity)
    throw WiringError("qubit list length " + std::to_string(qubits.size()) +
                      " does not match filter arity " +
                      std::to_string(filter.arity));
  std::vector<double> out(state.begin(), state.end());
  apply_matrix_on_qubits(out, filter.q, qubits, n_qubits);
  return out;
}

// grad(a, b) += sum over non-selected axes of upstream[.., a, ..] * input[.., b, ..].
// This is the matrix-gradient half of the contraction's backward pass.
inline void accumulate_filter_grad(Matrix& grad,
                                   std::span<const double> upstream,
                                   std::span<const double> input,
                                   std::span<const int> qubits, int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::size_t block = std::size_t{1} << qubits.size();
  if (upstream.size() != dim || input.size() != dim)
    throw ShapeError("accumulate_filter_grad: state length mismatch");
  if (grad.rows != static_cast<int>(block) ||
      grad.cols != static_cast<int>(block))
    throw ShapeError("accumulate_filter_grad: gradient shape mismatch");
  const auto plan = detail_axes::make_axis_plan(qubits, n_qubits);

  std::vector<double> up(block);
  std::vector<double> in(block);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & plan.selected) continue;
    for (std::size_t k = 0; k < block; ++k) {
      up[k] = upstream[base | plan.offsets[k]];
      in[k] = input[base | plan.offsets[k]];
    }
    for (std::size_t a = 0; a < block; ++a) {
      if (up[a] == 0.0) continue;
      double* grow = grad.data.data() + a * block;
      const double ua = up[a];
      for (std::size_t b = 0; b < block; ++b) grow[b] += ua * in[b];
    }
  }
}

// Total and independent trainable-parameter counts for a list of filter
// arities, including the two readout weights. A 2^m x 2^m orthogonal matrix
// carries 2^m(2^m - 1)/2 independent parameters.
inline std::pair<long long, long long> param_counts(
    std::span<const int> arities) {
  long long total = 2;
  long long independent = 2;
  for (int m : arities) {
    const long long side = 1LL << m;
    total += side * side;
    independent += side * (side - 1) / 2;
  }
  return {total, independent};
}

}  // namespace qcbind::linalg

#endif  // QCBIND_LINALG_HPP
