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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmetro/error.hpp"
#include "qmetro/fock.hpp"

namespace qmetro {

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPsdFloor = 1e-10;
inline constexpr double kOffBlockTolerance = 1e-8;
inline constexpr double kDefaultStep = 1e-4;
inline constexpr double kMaxStep = 1e-2;

/// Real combination of number operators, O = sum_j coeffs[j] * n_j.
/// Any two generators commute, so the covariance QFIM formula is exact.
struct Generator {
  std::vector<double> coeffs;
  std::string label;
};

/// phi_i = theta_i - theta_{d+1} with the reference phase pinned to zero:
/// generator i is n_i on d + 1 modes.
inline std::vector<Generator> imaging_generators(int d) {
  if (d < 1) fail(ErrorKind::invalid_argument, "d must be at least 1");
  const auto modes = static_cast<std::size_t>(d) + 1;
  std::vector<Generator> gens;
  gens.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    Generator g{std::vector<double>(modes, 0.0), "phi_" + std::to_string(i + 1)};
    g.coeffs[static_cast<std::size_t>(i)] = 1.0;
    gens.push_back(std::move(g));
  }
  return gens;
}

/// Interferometer i owns modes 2i and 2i+1 (zero based). The first d
/// generators are the differences (n_a - n_b)/2, the last d the sums.
inline std::vector<Generator> parallel_generators(int d) {
  if (d < 1) fail(ErrorKind::invalid_argument, "d must be at least 1");
  const auto modes = 2 * static_cast<std::size_t>(d);
  std::vector<Generator> gens;
  gens.reserve(modes);
  for (int sign = -1; sign <= 1; sign += 2) {
    for (int i = 0; i < d; ++i) {
      Generator g{std::vector<double>(modes, 0.0),
                  "phi_" + std::to_string(i + 1) + (sign < 0 ? "-" : "+")};
      g.coeffs[2 * static_cast<std::size_t>(i)] = 0.5;
      g.coeffs[2 * static_cast<std::size_t>(i) + 1] = 0.5 * sign;
      gens.push_back(std::move(g));
    }
  }
  return gens;
}

enum class QfimSource { analytic_covariance, finite_difference_oracle };

/// Quantum Fisher information matrix over a labelled set of generators.
/// Construction enforces symmetry and positive semidefiniteness, both
/// measured relative to max(1, largest entry).
class Qfim {
 public:
  Qfim(Eigen::MatrixXd matrix, std::vector<std::string> labels,
       QfimSource source)
      : matrix_(std::move(matrix)), labels_(std::move(labels)), source_(source) {
    if (matrix_.rows() != matrix_.cols()) {
      fail(ErrorKind::invalid_argument, "QFIM must be square");
    }
    if (static_cast<Eigen::Index>(labels_.size()) != matrix_.rows()) {
      fail(ErrorKind::invalid_argument, "one label per QFIM row required");
    }
    if (!matrix_.allFinite()) {
      fail(ErrorKind::invalid_argument, "QFIM has non-finite entries");
    }
    const double scale = std::max(1.0, max_abs());
    if (size() > 0) {
      const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
      if (asym > kSymmetryTolerance * scale) {
        fail(ErrorKind::invalid_argument, "QFIM is not symmetric");
      }
      if (min_eigenvalue() < -kPsdFloor * scale) {
        fail(ErrorKind::invalid_argument,
             "QFIM is not positive semidefinite");
      }
    }
  }

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  QfimSource source() const noexcept { return source_; }
  Eigen::Index size() const noexcept { return matrix_.rows(); }
  double operator()(Eigen::Index l, Eigen::Index m) const {
    return matrix_(l, m);
  }

  double max_abs() const {
    return size() == 0 ? 0.0 : matrix_.cwiseAbs().maxCoeff();
  }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        matrix_, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
  }

 private:
  Eigen::MatrixXd matrix_;
  std::vector<std::string> labels_;
  QfimSource source_;
};

namespace detail {

inline Eigen::MatrixXd generator_matrix(const SparseState& state,
                                        const std::vector<Generator>& gens) {
  const auto m = static_cast<Eigen::Index>(state.mode_count());
  Eigen::MatrixXd g(m, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t l = 0; l < gens.size(); ++l) {
    if (gens[l].coeffs.size() != state.mode_count()) {
      fail(ErrorKind::mode_mismatch, "generator '" + gens[l].label +
                                         "' has " +
                                         std::to_string(gens[l].coeffs.size()) +
                                         " coefficients for " +
                                         std::to_string(state.mode_count()) +
                                         " modes");
    }
    for (Eigen::Index a = 0; a < m; ++a) {
      const double c = gens[l].coeffs[static_cast<std::size_t>(a)];
      if (!std::isfinite(c)) {
        fail(ErrorKind::invalid_argument, "generator coefficient not finite");
      }
      g(a, static_cast<Eigen::Index>(l)) = c;
    }
  }
  return g;
}

inline std::vector<std::string> labels_of(const std::vector<Generator>& gens) {
  std::vector<std::string> labels;
  labels.reserve(gens.size());
  for (const auto& g : gens) labels.push_back(g.label);
  return labels;
}

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& f) {
  return 0.5 * (f + f.transpose());
}

}  // namespace detail

/// F_lm = 4 Cov(O_l, O_m), expanded over the number covariance matrix.
inline Qfim qfim_covariance(const SparseState& state,
                            const std::vector<Generator>& gens) {
  const Eigen::MatrixXd g = detail::generator_matrix(state, gens);
  const NumberStatistics stats = number_statistics(state);
  const Eigen::MatrixXd f = 4.0 * g.transpose() * stats.covariance * g;
  return Qfim(detail::symmetrized(f), detail::labels_of(gens),
              QfimSource::analytic_covariance);
}

namespace detail {

inline Eigen::MatrixXd fd_matrix(const SparseState& state,
                                 const std::vector<Generator>& gens,
                                 double step) {
  const std::size_t n = state.support_size();
  const std::size_t dp = gens.size();
  std::vector<std::vector<Amplitude>> deriv(dp, std::vector<Amplitude>(n));
  std::vector<double> theta(state.mode_count());
  for (std::size_t l = 0; l < dp; ++l) {
    for (std::size_t j = 0; j < theta.size(); ++j) {
      theta[j] = step * gens[l].coeffs[j];
    }
    const SparseState plus = apply_phase(state, theta);
    for (auto& t : theta) t = -t;
    const SparseState minus = apply_phase(state, theta);
    for (std::size_t k = 0; k < n; ++k) {
      deriv[l][k] = (plus.amplitude(k) - minus.amplitude(k)) / (2.0 * step);
    }
  }

  // <d_l psi | psi>
  std::vector<Amplitude> proj(dp, Amplitude{0.0, 0.0});
  for (std::size_t l = 0; l < dp; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      proj[l] += std::conj(deriv[l][k]) * state.amplitude(k);
    }
  }

  const auto size = static_cast<Eigen::Index>(dp);
  Eigen::MatrixXd f(size, size);
  for (std::size_t l = 0; l < dp; ++l) {
    for (std::size_t m = 0; m < dp; ++m) {
      Amplitude inner{0.0, 0.0};
      for (std::size_t k = 0; k < n; ++k) {
        inner += std::conj(deriv[l][k]) * deriv[m][k];
      }
      // <psi|d_m psi> = conj(<d_m psi|psi>)
      const Amplitude value = inner - proj[l] * std::conj(proj[m]);
      f(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) =
          4.0 * value.real();
    }
  }
  return symmetrized(f);
}

}  // namespace detail

/// Independent route through the pure-state formula
///   F_lm = 4 Re[<d_l psi|d_m psi> - <d_l psi|psi><psi|d_m psi>]
/// with central-difference derivative states taken along each generator.
/// Richardson refinement combines steps h and h/2 to cancel the O(h^2) term.
inline Qfim qfim_fd_oracle(const SparseState& state,
                           const std::vector<Generator>& gens,
                           double step = kDefaultStep,
                           bool richardson = false) {
  if (!(step > 0.0 && step <= kMaxStep)) {
    fail(ErrorKind::invalid_argument, "finite-difference step must lie in (0, 1e-2]");
  }
  detail::generator_matrix(state, gens);  // shape validation only
  Eigen::MatrixXd f = detail::fd_matrix(state, gens, step);
  if (richardson) {
    const Eigen::MatrixXd half = detail::fd_matrix(state, gens, 0.5 * step);
    f = (4.0 * half - f) / 3.0;
  }
  return Qfim(std::move(f), detail::labels_of(gens),
              QfimSource::finite_difference_oracle);
}

/// Top-left d x d block of a parallel-scheme QFIM (the difference phases).
/// Refuses when the difference/sum cross block does not vanish, since the
/// block inverse then differs from the corresponding block of F^{-1}.
inline Qfim extract_minus_block(const Qfim& qfim, int d,
                                double tolerance = kOffBlockTolerance) {
  if (d < 1 || qfim.size() != 2 * static_cast<Eigen::Index>(d)) {
    fail(ErrorKind::invalid_argument,
         "expected a " + std::to_string(2 * d) + "x" + std::to_string(2 * d) +
             " parallel-scheme QFIM");
  }
  const auto n = static_cast<Eigen::Index>(d);
  const double off = qfim.matrix().block(0, n, n, n).cwiseAbs().maxCoeff();
  if (off > tolerance) {
    fail(ErrorKind::asymmetric_state,
         "difference/sum cross block has magnitude " + std::to_string(off) +
             "; invert the full matrix instead");
  }
  return Qfim(qfim.matrix().topLeftCorner(n, n),
              std::vector<std::string>(qfim.labels().begin(),
                                       qfim.labels().begin() + n),
              qfim.source());
}

}  // namespace qmetro
