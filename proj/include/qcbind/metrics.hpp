// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef QCBIND_METRICS_HPP
#define QCBIND_METRICS_HPP

#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "qcbind/common.hpp"

namespace qcbind::metrics {

struct Metrics {
  double rmsd = 0.0;
  double pcc = std::numeric_limits<double>::quiet_NaN();
};

inline void check_pair(std::span<const double> a, std::span<const double> b,
                       const char* what) {
  if (a.size() != b.size())
    throw ShapeError(std::string(what) + ": length mismatch (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  if (a.empty()) throw DomainError(std::string(what) + ": empty input");
}

inline double rmsd(std::span<const double> preds,
                   std::span<const double> labels) {
  check_pair(preds, labels, "rmsd");
  double acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i] - labels[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(preds.size()));
}

// Pearson product-moment coefficient with population (n-denominator) moments;
// the denominator choice cancels in the ratio.
inline double pcc(std::span<const double> preds,
                  std::span<const double> labels) {
  check_pair(preds, labels, "pcc");
  const std::size_t n = preds.size();
  if (n < 2) throw DomainError("pcc: needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += preds[i];
    my += labels[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = preds[i] - mx;
    const double dy = labels[i] - my;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  if (vx <= 0.0 || vy <= 0.0)
    throw DomainError("pcc: undefined correlation (zero variance)");
  return cov / std::sqrt(vx * vy);
}

// rmsd plus pcc; an undefined correlation is reported as NaN rather than
// aborting a whole evaluation run.
inline Metrics evaluate(std::span<const double> preds,
                        std::span<const double> labels) {
  Metrics m;
  m.rmsd = rmsd(preds, labels);
  try {
    m.pcc = pcc(preds, labels);
  } catch (const DomainError&) {
    m.pcc = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

}  // namespace qcbind::metrics

#endif  // QCBIND_METRICS_HPP
