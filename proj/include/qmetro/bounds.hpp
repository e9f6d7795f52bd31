// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qmetro/error.hpp"
#include "qmetro/fock.hpp"
#include "qmetro/qfim.hpp"

/// Cramer-Rao bounds from QFIMs, closed-form bounds for path-symmetric
/// probes, and the symmetry diagnostics that gate the closed forms.
namespace qmetro {

inline constexpr double kMaxCondition = 1e12;
inline constexpr double kDefaultSymmetryTol = 1e-9;

enum class Scheme { parallel, imaging };
enum class Route { closed_form, matrix_inverse };

constexpr const char* to_string(Scheme s) {
  return s == Scheme::parallel ? "parallel" : "imaging";
}
constexpr const char* to_string(Route r) {
  return r == Route::closed_form ? "closed-form" : "matrix-inverse";
}

/// Symmetric d-interferometer probe: common mode variance, covariance inside
/// one interferometer, covariance between modes of different interferometers.
struct SymmetryParamsParallel {
  double variance = 0.0;
  double c_intra = 0.0;
  double c_inter = 0.0;
  int d = 1;
};

/// Symmetric imaging probe: common probe-mode variance and common covariance
/// between distinct probe modes.
struct SymmetryParamsImaging {
  double variance = 0.0;
  double covariance = 0.0;
  int d = 1;
};

struct PrecisionReport {
  std::vector<double> per_phase;  // variances delta phi_i^2
  double aggregate_phi = 0.0;     // sum of standard deviations
  double mandel_q = 0.0;
  double correlation_j = 0.0;
  double mean_per_mode = 0.0;
  double mean_total = 0.0;
  Route route = Route::closed_form;
};

namespace detail {

inline void check_covariance_bound(double variance, double cov,
                                   const char* name) {
  if (!std::isfinite(variance) || !std::isfinite(cov) || variance < 0.0) {
    fail(ErrorKind::invalid_argument, "variance must be finite and >= 0");
  }
  if (std::abs(cov) > variance * (1.0 + 1e-12) + 1e-15) {
    fail(ErrorKind::invalid_argument,
         std::string("|") + name + "| exceeds the variance");
  }
}

inline void check_d(int d) {
  if (d < 1) fail(ErrorKind::invalid_argument, "d must be at least 1");
}

}  // namespace detail

/// Diagonal of F^{-1} divided by the number of repetitions.
inline std::vector<double> crb_from_qfim(const Qfim& qfim, int repetitions = 1) {
  if (repetitions < 1) {
    fail(ErrorKind::invalid_argument, "repetitions must be at least 1");
  }
  if (qfim.size() == 0) fail(ErrorKind::invalid_argument, "empty QFIM");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qfim.matrix(),
                                                     Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || !(lo > 0.0) || hi / lo > kMaxCondition) {
    fail(ErrorKind::non_identifiable,
         "QFIM is singular or ill-conditioned; some parameter combination "
         "carries no information");
  }
  const Eigen::MatrixXd inv = qfim.matrix().inverse();
  std::vector<double> out(static_cast<std::size_t>(qfim.size()));
  for (Eigen::Index i = 0; i < qfim.size(); ++i) {
    out[static_cast<std::size_t>(i)] = inv(i, i) / repetitions;
  }
  return out;
}

/// Inverse of lambda (I + omega J) with J the d x d all-ones matrix:
///   (1/lambda) (I - omega / (1 + omega d) J).
inline Eigen::MatrixXd ones_structured_inverse(double lambda, double omega,
                                               int d) {
  detail::check_d(d);
  if (lambda == 0.0 || !std::isfinite(lambda) || !std::isfinite(omega)) {
    fail(ErrorKind::singular_matrix, "structured matrix has lambda = 0");
  }
  const double denom = 1.0 + omega * d;
  if (std::abs(denom) < 1e-12) {
    fail(ErrorKind::singular_matrix, "structured matrix has 1 + omega d = 0");
  }
  const auto n = static_cast<Eigen::Index>(d);
  const double shift = omega / denom;
  Eigen::MatrixXd inv = Eigen::MatrixXd::Constant(n, n, -shift / lambda);
  inv.diagonal().array() += 1.0 / lambda;
  return inv;
}

inline double parallel_bound(const SymmetryParamsParallel& p) {
  detail::check_d(p.d);
  detail::check_covariance_bound(p.variance, p.c_intra, "C_intra");
  detail::check_covariance_bound(p.variance, p.c_inter, "C_inter");
  const double gap = p.variance - p.c_intra;
  if (!(gap > 0.0)) {
    fail(ErrorKind::no_information, "V - C_intra must be positive");
  }
  return 1.0 / (2.0 * gap);
}

inline double parallel_bound_mandel(double n_bar, double q, double j) {
  if (!(n_bar > 0.0)) fail(ErrorKind::invalid_argument, "n_bar must be > 0");
  if (q < -1.0) fail(ErrorKind::invalid_argument, "Mandel Q must be >= -1");
  if (std::abs(j) > 1.0) fail(ErrorKind::invalid_argument, "|J| must be <= 1");
  const double denom = 2.0 * n_bar * (1.0 + q) * (1.0 - j);
  if (!(denom > 0.0)) {
    fail(ErrorKind::no_information, "bound denominator vanishes");
  }
  return 1.0 / denom;
}

/// f(d, J) = (1 + (d-2) J) / (1 + (d-1) J).
inline double imaging_correlation_factor(int d, double j) {
  detail::check_d(d);
  const double denom = 1.0 + (d - 1) * j;
  if (!(denom > 0.0)) {
    fail(ErrorKind::non_identifiable, "1 + (d-1) J must be positive");
  }
  return (1.0 + (d - 2) * j) / denom;
}

inline double imaging_bound(const SymmetryParamsImaging& p) {
  detail::check_d(p.d);
  detail::check_covariance_bound(p.variance, p.covariance, "C");
  if (!(p.variance > 0.0)) {
    fail(ErrorKind::no_information, "probe-mode variance is zero");
  }
  // A single phase has no probe-probe covariance: F = 4V.
  if (p.d == 1) return 1.0 / (4.0 * p.variance);
  const double v = p.variance;
  const double c = p.covariance;
  const double gap = v - c;
  const double collective = v + (p.d - 1) * c;
  if (!(gap > 0.0) || !(collective > 0.0)) {
    fail(ErrorKind::non_identifiable,
         "imaging QFIM is singular (V - C or V + (d-1) C not positive)");
  }
  return (v + (p.d - 2) * c) / (4.0 * gap * collective);
}

inline double imaging_bound_mandel(double n_bar, double q, double j, int d) {
  detail::check_d(d);
  if (!(n_bar > 0.0)) fail(ErrorKind::invalid_argument, "n_bar must be > 0");
  if (q < -1.0) fail(ErrorKind::invalid_argument, "Mandel Q must be >= -1");
  if (std::abs(j) > 1.0) fail(ErrorKind::invalid_argument, "|J| must be <= 1");
  if (!(1.0 + q > 0.0)) {
    fail(ErrorKind::no_information, "probe-mode variance is zero");
  }
  if (d == 1) return 1.0 / (4.0 * n_bar * (1.0 + q));
  if (!(1.0 - j > 0.0)) {
    fail(ErrorKind::non_identifiable, "J = 1 leaves the QFIM singular");
  }
  const double f = imaging_correlation_factor(d, j);
  return f / (4.0 * n_bar * (1.0 + q) * (1.0 - j));
}

/// Full 2d x 2d QFIM of a symmetric parallel probe, differences first.
inline Eigen::MatrixXd structured_parallel_qfim(const SymmetryParamsParallel& p) {
  detail::check_d(p.d);
  const auto n = static_cast<Eigen::Index>(p.d);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  f.topLeftCorner(n, n).diagonal().setConstant(2.0 * (p.variance - p.c_intra));
  f.bottomRightCorner(n, n).setConstant(4.0 * p.c_inter);
  f.bottomRightCorner(n, n).diagonal().setConstant(
      2.0 * (p.variance + p.c_intra));
  return f;
}

/// Block inverse of structured_parallel_qfim: a scaled identity for the
/// difference phases and the ones-structured inverse for the sum phases.
inline Eigen::MatrixXd structured_parallel_inverse(
    const SymmetryParamsParallel& p) {
  const auto n = static_cast<Eigen::Index>(p.d);
  const double lambda = 2.0 * (p.variance + p.c_intra - 2.0 * p.c_inter);
  if (lambda == 0.0) {
    fail(ErrorKind::singular_matrix, "V + C_intra - 2 C_inter vanishes");
  }
  const double omega = 4.0 * p.c_inter / lambda;
  Eigen::MatrixXd inv = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  inv.topLeftCorner(n, n).diagonal().setConstant(parallel_bound(p));
  inv.bottomRightCorner(n, n) = ones_structured_inverse(lambda, omega, p.d);
  return inv;
}

inline Eigen::MatrixXd structured_imaging_inverse(const SymmetryParamsImaging& p) {
  detail::check_d(p.d);
  const double gap = p.variance - p.covariance;
  if (!(gap > 0.0)) fail(ErrorKind::non_identifiable, "V - C must be positive");
  return ones_structured_inverse(4.0 * gap, p.covariance / gap, p.d);
}

/// delta Phi = sum_i delta phi_i, from per-phase variances.
inline double aggregate_phi(std::span<const double> per_phase_variances) {
  double total = 0.0;
  for (double v : per_phase_variances) {
    if (!(v > 0.0)) {
      fail(ErrorKind::invalid_argument, "per-phase variances must be > 0");
    }
    total += std::sqrt(v);
  }
  return total;
}

struct ParallelDiagnostics {
  SymmetryParamsParallel params;
  double n_bar = 0.0;
  double n_total = 0.0;
  double mandel_q = 0.0;
  double correlation_j = 0.0;
};

struct ImagingDiagnostics {
  SymmetryParamsImaging params;
  double n_bar = 0.0;
  double n_total = 0.0;
  double mandel_q = 0.0;
  double correlation_j = 0.0;
};

using Diagnostics = std::variant<ParallelDiagnostics, ImagingDiagnostics>;

namespace detail {

/// Collects values that should agree and reports the first pair that does not.
class EqualityCheck {
 public:
  EqualityCheck(std::string what, double tol) : what_(std::move(what)), tol_(tol) {}

  void add(double value, std::string label) {
    if (count_ == 0) {
      first_ = value;
      first_label_ = label;
    } else if (std::abs(value - first_) > tol_) {
      std::ostringstream msg;
      msg.precision(17);
      msg << what_ << " differ: " << first_label_ << " = " << first_ << ", "
          << label << " = " << value;
      fail(ErrorKind::asymmetric_state, msg.str());
    }
    sum_ += value;
    ++count_;
  }

  double mean() const { return count_ == 0 ? 0.0 : sum_ / count_; }
  bool empty() const { return count_ == 0; }

 private:
  std::string what_;
  double tol_;
  double first_ = 0.0;
  std::string first_label_;
  double sum_ = 0.0;
  int count_ = 0;
};

inline std::string mode_label(const char* prefix, Eigen::Index a) {
  return std::string(prefix) + "_" + std::to_string(a + 1);
}

inline std::string pair_label(Eigen::Index a, Eigen::Index b) {
  return "C_" + std::to_string(a + 1) + "," + std::to_string(b + 1);
}

inline double mandel_q(double variance, double mean) {
  if (!(mean > 0.0)) {
    fail(ErrorKind::mandel_undefined, "mean photon number is zero");
  }
  return (variance - mean) / mean;
}

inline double correlation(double cov, double variance) {
  return variance > 0.0 ? cov / variance : 0.0;
}

}  // namespace detail

/// Measures the covariance structure of a 2d-mode state and checks that it
/// is symmetric under relabelling interferometers and swapping the arms of
/// each interferometer.
inline ParallelDiagnostics diagnose_parallel(const SparseState& state, int d,
                                             double tol = kDefaultSymmetryTol) {
  detail::check_d(d);
  if (state.mode_count() != 2 * static_cast<std::size_t>(d)) {
    fail(ErrorKind::mode_mismatch, "parallel scheme needs 2d modes");
  }
  const NumberStatistics s = number_statistics(state);
  const auto m = static_cast<Eigen::Index>(state.mode_count());

  detail::EqualityCheck means("mode means", tol);
  detail::EqualityCheck variances("mode variances", tol);
  detail::EqualityCheck intra("intra-interferometer covariances", tol);
  detail::EqualityCheck inter("inter-interferometer covariances", tol);
  for (Eigen::Index a = 0; a < m; ++a) {
    means.add(s.means[a], detail::mode_label("n", a));
    variances.add(s.covariance(a, a), detail::mode_label("V", a));
  }
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b) {
      if (a / 2 == b / 2) {
        intra.add(s.covariance(a, b), detail::pair_label(a, b));
      } else {
        inter.add(s.covariance(a, b), detail::pair_label(a, b));
      }
    }
  }

  ParallelDiagnostics out;
  out.params = {variances.mean(), intra.mean(), inter.mean(), d};
  out.n_bar = means.mean();
  out.n_total = s.means.sum();
  out.mandel_q = detail::mandel_q(out.params.variance, out.n_bar);
  out.correlation_j = detail::correlation(out.params.c_intra, out.params.variance);
  return out;
}

/// Same for the imaging scheme: d probe modes followed by one reference mode,
/// which is exempt from the symmetry requirement.
inline ImagingDiagnostics diagnose_imaging(const SparseState& state, int d,
                                           double tol = kDefaultSymmetryTol) {
  detail::check_d(d);
  if (state.mode_count() != static_cast<std::size_t>(d) + 1) {
    fail(ErrorKind::mode_mismatch, "imaging scheme needs d + 1 modes");
  }
  const NumberStatistics s = number_statistics(state);
  const auto probes = static_cast<Eigen::Index>(d);

  detail::EqualityCheck means("probe-mode means", tol);
  detail::EqualityCheck variances("probe-mode variances", tol);
  detail::EqualityCheck cross("probe-probe covariances", tol);
  for (Eigen::Index a = 0; a < probes; ++a) {
    means.add(s.means[a], detail::mode_label("n", a));
    variances.add(s.covariance(a, a), detail::mode_label("V", a));
    for (Eigen::Index b = a + 1; b < probes; ++b) {
      cross.add(s.covariance(a, b), detail::pair_label(a, b));
    }
  }

  ImagingDiagnostics out;
  out.params = {variances.mean(), cross.mean(), d};
  out.n_bar = means.mean();
  out.n_total = s.means.sum();
  out.mandel_q = detail::mandel_q(out.params.variance, out.n_bar);
  out.correlation_j = detail::correlation(out.params.covariance, out.params.variance);
  return out;
}

inline Diagnostics diagnostics(const SparseState& state, Scheme scheme, int d,
                               double tol = kDefaultSymmetryTol) {
  if (scheme == Scheme::parallel) return diagnose_parallel(state, d, tol);
  return diagnose_imaging(state, d, tol);
}

/// Per-phase bounds for a state under one scheme. Path-symmetric states use
/// the closed form; anything else falls back to inverting the full QFIM, with
/// Q and J then read off the first probe mode and the first probe pair.
inline PrecisionReport precision_report(const SparseState& state, Scheme scheme,
                                        int d, double tol = kDefaultSymmetryTol,
                                        int repetitions = 1) {
  if (repetitions < 1) {
    fail(ErrorKind::invalid_argument, "repetitions must be at least 1");
  }
  PrecisionReport report;
  const auto n = static_cast<std::size_t>(d);
  try {
    if (scheme == Scheme::parallel) {
      const auto diag = diagnose_parallel(state, d, tol);
      report.per_phase.assign(n, parallel_bound(diag.params) / repetitions);
      report.mandel_q = diag.mandel_q;
      report.correlation_j = diag.correlation_j;
      report.mean_per_mode = diag.n_bar;
      report.mean_total = diag.n_total;
    } else {
      const auto diag = diagnose_imaging(state, d, tol);
      report.per_phase.assign(n, imaging_bound(diag.params) / repetitions);
      report.mandel_q = diag.mandel_q;
      report.correlation_j = diag.correlation_j;
      report.mean_per_mode = diag.n_bar;
      report.mean_total = diag.n_total;
    }
    report.route = Route::closed_form;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::asymmetric_state) throw;
    const auto gens = scheme == Scheme::parallel ? parallel_generators(d)
                                                 : imaging_generators(d);
    const auto full = crb_from_qfim(qfim_covariance(state, gens), repetitions);
    report.per_phase.assign(full.begin(), full.begin() + d);
    const NumberStatistics s = number_statistics(state);
    const auto probes = scheme == Scheme::parallel ? 2 * d : d;
    report.mean_per_mode = s.means.head(probes).mean();
    report.mean_total = s.means.sum();
    report.mandel_q = detail::mandel_q(s.covariance(0, 0), s.means[0]);
    report.correlation_j =
        probes > 1 ? s.covariance(0, 1) /
                         std::sqrt(s.covariance(0, 0) * s.covariance(1, 1))
                   : 0.0;
    if (!std::isfinite(report.correlation_j)) report.correlation_j = 0.0;
    report.route = Route::matrix_inverse;
  }
  report.aggregate_phi = aggregate_phi(report.per_phase);
  return report;
}

}  // namespace qmetro
