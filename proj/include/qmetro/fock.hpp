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
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmetro/error.hpp"

/// Multimode pure bosonic states in a truncated Fock space.
///
/// A state stores only the occupation vectors that carry a non-negligible
/// amplitude. Entries are kept in lexicographic order of the occupation
/// vector, which makes overlaps a linear merge and tensor products come out
/// already sorted. States are immutable once built.
namespace qmetro {

using Amplitude = std::complex<double>;

inline constexpr double kPruneThreshold = 1e-15;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kDegenerateNorm = 1e-12;
inline constexpr double kDefaultEpsilon = 1e-12;
inline constexpr std::size_t kMaxModes = 16;
inline constexpr std::size_t kMaxSupport = 10'000'000;
inline constexpr unsigned kMaxCutoff = 2048;

/// Photon counts per mode; the label of a multimode Fock basis element.
class OccupationVector {
 public:
  OccupationVector() = default;
  OccupationVector(std::initializer_list<unsigned> counts) : counts_(counts) {}
  explicit OccupationVector(std::vector<unsigned> counts)
      : counts_(std::move(counts)) {}

  std::size_t size() const noexcept { return counts_.size(); }
  unsigned operator[](std::size_t mode) const { return counts_.at(mode); }
  std::span<const unsigned> counts() const noexcept { return counts_; }

  unsigned total() const {
    return std::accumulate(counts_.begin(), counts_.end(), 0u);
  }
  unsigned max_count() const {
    return counts_.empty() ? 0u
                           : *std::max_element(counts_.begin(), counts_.end());
  }

  auto operator<=>(const OccupationVector&) const = default;

 private:
  std::vector<unsigned> counts_;
};

struct TruncationReport {
  double tail_mass = 0.0;
  unsigned cutoff_used = 0;
};

class SparseState;

namespace detail {
struct StateAssembler;
}

class SparseState {
 public:
  using Term = std::pair<OccupationVector, Amplitude>;

  /// Builds a state from explicit terms. Duplicate occupations are summed and
  /// tiny amplitudes pruned; the result must already be normalized.
  static SparseState from_terms(std::size_t mode_count, unsigned cutoff,
                                std::span<const Term> terms);
  static SparseState from_terms(std::size_t mode_count, unsigned cutoff,
                                std::initializer_list<Term> terms) {
    return from_terms(mode_count, cutoff,
                      std::span<const Term>(terms.begin(), terms.size()));
  }

  /// Like from_terms, but rescales to unit norm instead of rejecting.
  static SparseState normalized(std::size_t mode_count, unsigned cutoff,
                                std::span<const Term> terms);

  std::size_t mode_count() const noexcept { return mode_count_; }
  unsigned cutoff() const noexcept { return cutoff_; }
  std::size_t support_size() const noexcept { return amplitudes_.size(); }

  std::span<const std::uint16_t> occupation(std::size_t k) const {
    return {occupations_.data() + k * mode_count_, mode_count_};
  }
  OccupationVector occupation_vector(std::size_t k) const {
    auto occ = occupation(k);
    return OccupationVector(std::vector<unsigned>(occ.begin(), occ.end()));
  }
  Amplitude amplitude(std::size_t k) const { return amplitudes_[k]; }
  std::span<const Amplitude> amplitudes() const noexcept { return amplitudes_; }

  /// Amplitude of a basis element, zero when it is not stored.
  Amplitude amplitude_at(const OccupationVector& occ) const {
    if (occ.size() != mode_count_) {
      fail(ErrorKind::mode_mismatch, "occupation length does not match state");
    }
    std::size_t lo = 0;
    std::size_t hi = support_size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const auto row = occupation(mid);
      const auto cmp = std::lexicographical_compare_three_way(
          row.begin(), row.end(), occ.counts().begin(), occ.counts().end());
      if (cmp == 0) return amplitudes_[mid];
      if (cmp < 0) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return {0.0, 0.0};
  }

  double norm_squared() const {
    double sum = 0.0;
    for (const auto& a : amplitudes_) sum += std::norm(a);
    return sum;
  }

 private:
  friend struct detail::StateAssembler;

  SparseState(std::size_t mode_count, unsigned cutoff,
              std::vector<std::uint16_t> occupations,
              std::vector<Amplitude> amplitudes)
      : mode_count_(mode_count),
        cutoff_(cutoff),
        occupations_(std::move(occupations)),
        amplitudes_(std::move(amplitudes)) {}

  std::size_t mode_count_ = 0;
  unsigned cutoff_ = 0;
  std::vector<std::uint16_t> occupations_;  // row-major, mode_count_ per entry
  std::vector<Amplitude> amplitudes_;
};

namespace detail {

enum class NormPolicy { check, renormalize, keep };

inline void check_shape(std::size_t mode_count, unsigned cutoff) {
  if (mode_count == 0) {
    fail(ErrorKind::invalid_argument, "a state needs at least one mode");
  }
  if (mode_count > kMaxModes) {
    fail(ErrorKind::resource, "mode count " + std::to_string(mode_count) +
                                  " exceeds the cap of " +
                                  std::to_string(kMaxModes));
  }
  if (cutoff > kMaxCutoff) {
    fail(ErrorKind::resource, "cutoff " + std::to_string(cutoff) +
                                  " exceeds the cap of " +
                                  std::to_string(kMaxCutoff));
  }
}

struct StateAssembler {
  /// Input rows must be sorted and unique.
  static SparseState sorted(std::size_t mode_count, unsigned cutoff,
                            std::vector<std::uint16_t> occ,
                            std::vector<Amplitude> amp, NormPolicy policy) {
    double norm2 = 0.0;
    for (const auto& a : amp) norm2 += std::norm(a);
    double scale = 1.0;
    switch (policy) {
      case NormPolicy::check:
        if (std::abs(norm2 - 1.0) >= kNormTolerance) {
          fail(ErrorKind::normalization,
               "state is not normalized (norm^2 = " + std::to_string(norm2) +
                   ")");
        }
        break;
      case NormPolicy::renormalize:
        if (std::sqrt(norm2) < kDegenerateNorm) {
          fail(ErrorKind::degenerate_superposition,
               "cannot normalize a vector of vanishing norm");
        }
        scale = 1.0 / std::sqrt(norm2);
        break;
      case NormPolicy::keep:
        break;
    }

    std::size_t out = 0;
    for (std::size_t k = 0; k < amp.size(); ++k) {
      const Amplitude a = amp[k] * scale;
      if (std::abs(a) < kPruneThreshold) continue;
      if (out != k) {
        std::copy_n(occ.begin() + k * mode_count, mode_count,
                    occ.begin() + out * mode_count);
      }
      amp[out] = a;
      ++out;
    }
    amp.resize(out);
    occ.resize(out * mode_count);
    return SparseState(mode_count, cutoff, std::move(occ), std::move(amp));
  }

  /// Sorts rows, sums duplicates, then defers to sorted().
  static SparseState unsorted(std::size_t mode_count, unsigned cutoff,
                              const std::vector<std::uint16_t>& occ,
                              const std::vector<Amplitude>& amp,
                              NormPolicy policy) {
    const std::size_t n = amp.size();
    auto row = [&](std::size_t k) {
      return std::span<const std::uint16_t>(occ.data() + k * mode_count,
                                            mode_count);
    };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       const auto ra = row(a);
                       const auto rb = row(b);
                       return std::lexicographical_compare(
                           ra.begin(), ra.end(), rb.begin(), rb.end());
                     });

    std::vector<std::uint16_t> sorted_occ;
    std::vector<Amplitude> sorted_amp;
    sorted_occ.reserve(occ.size());
    sorted_amp.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = row(order[i]);
      if (!sorted_amp.empty() &&
          std::equal(r.begin(), r.end(),
                     sorted_occ.end() - static_cast<std::ptrdiff_t>(mode_count))) {
        sorted_amp.back() += amp[order[i]];
        continue;
      }
      sorted_occ.insert(sorted_occ.end(), r.begin(), r.end());
      sorted_amp.push_back(amp[order[i]]);
    }
    return sorted(mode_count, cutoff, std::move(sorted_occ),
                  std::move(sorted_amp), policy);
  }

  static SparseState from_terms(std::size_t mode_count, unsigned cutoff,
                                std::span<const SparseState::Term> terms,
                                NormPolicy policy) {
    check_shape(mode_count, cutoff);
    if (terms.size() > kMaxSupport) {
      fail(ErrorKind::resource, "support exceeds the amplitude cap");
    }
    std::vector<std::uint16_t> occ;
    std::vector<Amplitude> amp;
    occ.reserve(terms.size() * mode_count);
    amp.reserve(terms.size());
    for (const auto& [label, a] : terms) {
      if (label.size() != mode_count) {
        fail(ErrorKind::mode_mismatch,
             "occupation vector length does not match mode count");
      }
      for (unsigned c : label.counts()) {
        if (c > cutoff) {
          fail(ErrorKind::cutoff, "occupation " + std::to_string(c) +
                                      " exceeds cutoff " +
                                      std::to_string(cutoff));
        }
        occ.push_back(static_cast<std::uint16_t>(c));
      }
      amp.push_back(a);
    }
    return unsorted(mode_count, cutoff, occ, amp, policy);
  }

  static SparseState with_amplitudes(const SparseState& like,
                                     std::vector<Amplitude> amp) {
    return SparseState(like.mode_count_, like.cutoff_, like.occupations_,
                       std::move(amp));
  }

  static const std::vector<std::uint16_t>& rows(const SparseState& s) {
    return s.occupations_;
  }
};

}  // namespace detail

inline SparseState SparseState::from_terms(std::size_t mode_count,
                                           unsigned cutoff,
                                           std::span<const Term> terms) {
  return detail::StateAssembler::from_terms(mode_count, cutoff, terms,
                                            detail::NormPolicy::check);
}

inline SparseState SparseState::normalized(std::size_t mode_count,
                                           unsigned cutoff,
                                           std::span<const Term> terms) {
  return detail::StateAssembler::from_terms(mode_count, cutoff, terms,
                                            detail::NormPolicy::renormalize);
}

/// |occ> as a state with the given per-mode cutoff.
inline SparseState fock_basis(const OccupationVector& occ, unsigned cutoff) {
  const SparseState::Term term{occ, Amplitude{1.0, 0.0}};
  return SparseState::from_terms(occ.size(), cutoff,
                                 std::span<const SparseState::Term>(&term, 1));
}

inline SparseState fock_basis(const OccupationVector& occ) {
  return fock_basis(occ, occ.max_count());
}

inline SparseState vacuum(std::size_t mode_count, unsigned cutoff = 0) {
  return fock_basis(OccupationVector(std::vector<unsigned>(mode_count, 0u)),
                    cutoff);
}

struct CoherentMode {
  SparseState state;
  TruncationReport truncation;
};

/// Single-mode D(alpha)|0>, truncated at the smallest cutoff whose Poisson
/// tail mass is at most epsilon, then renormalized.
inline CoherentMode coherent_mode(Amplitude alpha,
                                  double epsilon = kDefaultEpsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    fail(ErrorKind::invalid_argument, "epsilon must lie in (0, 1)");
  }
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    fail(ErrorKind::invalid_argument, "alpha must be finite");
  }
  const double mean = std::norm(alpha);
  if (mean == 0.0) {
    return {vacuum(1), TruncationReport{0.0, 0}};
  }

  // Poisson weights in log space so large |alpha| neither over- nor
  // underflows; the far end sits many standard deviations past the mean.
  const double log_mean = std::log(mean);
  const auto far = static_cast<std::size_t>(
      std::ceil(mean + 12.0 * std::sqrt(mean) + 40.0));
  std::vector<double> log_p(far + 1);
  for (std::size_t n = 0; n <= far; ++n) {
    log_p[n] = -mean + static_cast<double>(n) * log_mean -
               std::lgamma(static_cast<double>(n) + 1.0);
  }
  std::vector<double> tail(far + 1, 0.0);  // tail[c] = sum_{n > c} p_n
  for (std::size_t n = far; n-- > 0;) {
    tail[n] = tail[n + 1] + std::exp(log_p[n + 1]);
  }
  std::size_t cutoff = 0;
  while (cutoff < far && tail[cutoff] > epsilon) ++cutoff;
  if (cutoff > kMaxCutoff) {
    fail(ErrorKind::resource, "coherent amplitude needs cutoff " +
                                  std::to_string(cutoff) + " above the cap " +
                                  std::to_string(kMaxCutoff));
  }

  const double phase = std::arg(alpha);
  std::vector<std::uint16_t> occ(cutoff + 1);
  std::vector<Amplitude> amp(cutoff + 1);
  for (std::size_t n = 0; n <= cutoff; ++n) {
    occ[n] = static_cast<std::uint16_t>(n);
    amp[n] = std::polar(std::exp(0.5 * log_p[n]),
                        static_cast<double>(n) * phase);
  }
  auto state = detail::StateAssembler::sorted(
      1, static_cast<unsigned>(cutoff), std::move(occ), std::move(amp),
      detail::NormPolicy::renormalize);
  return {std::move(state),
          TruncationReport{tail[cutoff], static_cast<unsigned>(cutoff)}};
}

struct WeightedState {
  Amplitude coefficient;
  std::reference_wrapper<const SparseState> state;
};

struct Superposition {
  SparseState state;
  /// Norm of the unnormalized sum.
  double norm;
};

/// Normalized sum of weighted states. Factors may have different cutoffs;
/// the result takes the largest.
inline Superposition superpose(std::span<const WeightedState> terms) {
  if (terms.empty()) {
    fail(ErrorKind::invalid_argument, "superposition of no terms");
  }
  const std::size_t modes = terms.front().state.get().mode_count();
  unsigned cutoff = 0;
  std::size_t total = 0;
  for (const auto& t : terms) {
    if (t.state.get().mode_count() != modes) {
      fail(ErrorKind::mode_mismatch, "superposed states differ in mode count");
    }
    cutoff = std::max(cutoff, t.state.get().cutoff());
    total += t.state.get().support_size();
  }
  std::vector<std::uint16_t> occ;
  std::vector<Amplitude> amp;
  occ.reserve(total * modes);
  amp.reserve(total);
  for (const auto& t : terms) {
    const auto& s = t.state.get();
    const auto& rows = detail::StateAssembler::rows(s);
    occ.insert(occ.end(), rows.begin(), rows.end());
    for (const auto& a : s.amplitudes()) amp.push_back(t.coefficient * a);
  }
  // Norm of the merged vector, before any rescaling.
  auto raw = detail::StateAssembler::unsorted(modes, cutoff, occ, amp,
                                              detail::NormPolicy::keep);
  const double norm = std::sqrt(raw.norm_squared());
  if (norm < kDegenerateNorm) {
    fail(ErrorKind::degenerate_superposition,
         "superposition has vanishing norm");
  }
  std::vector<Amplitude> scaled(raw.amplitudes().begin(),
                                raw.amplitudes().end());
  std::vector<std::uint16_t> rows = detail::StateAssembler::rows(raw);
  return {detail::StateAssembler::sorted(modes, cutoff, std::move(rows),
                                         std::move(scaled),
                                         detail::NormPolicy::renormalize),
          norm};
}

inline Superposition superpose(std::initializer_list<WeightedState> terms) {
  return superpose(std::span<const WeightedState>(terms.begin(), terms.size()));
}

/// Product state; modes are concatenated in factor order.
inline SparseState tensor(std::span<const SparseState> factors) {
  if (factors.empty()) {
    fail(ErrorKind::invalid_argument, "tensor product of no factors");
  }
  std::size_t modes = 0;
  unsigned cutoff = 0;
  for (const auto& f : factors) {
    modes += f.mode_count();
    cutoff = std::max(cutoff, f.cutoff());
  }
  detail::check_shape(modes, cutoff);

  std::vector<std::uint16_t> occ = detail::StateAssembler::rows(factors.front());
  std::vector<Amplitude> amp(factors.front().amplitudes().begin(),
                             factors.front().amplitudes().end());
  std::size_t width = factors.front().mode_count();

  for (std::size_t f = 1; f < factors.size(); ++f) {
    const auto& right = factors[f];
    const std::size_t rw = right.mode_count();
    const auto& right_rows = detail::StateAssembler::rows(right);
    std::vector<std::uint16_t> next_occ;
    std::vector<Amplitude> next_amp;
    for (std::size_t i = 0; i < amp.size(); ++i) {
      for (std::size_t j = 0; j < right.support_size(); ++j) {
        const Amplitude a = amp[i] * right.amplitude(j);
        if (std::abs(a) < kPruneThreshold) continue;
        if (next_amp.size() == kMaxSupport) {
          fail(ErrorKind::resource,
               "tensor product support exceeds the cap of " +
                   std::to_string(kMaxSupport) + " amplitudes");
        }
        next_occ.insert(next_occ.end(), occ.begin() + i * width,
                        occ.begin() + (i + 1) * width);
        next_occ.insert(next_occ.end(), right_rows.begin() + j * rw,
                        right_rows.begin() + (j + 1) * rw);
        next_amp.push_back(a);
      }
    }
    occ = std::move(next_occ);
    amp = std::move(next_amp);
    width += rw;
  }
  // Row order is lexicographic already: the left block varies slowest.
  return detail::StateAssembler::sorted(modes, cutoff, std::move(occ),
                                        std::move(amp),
                                        detail::NormPolicy::renormalize);
}

inline SparseState tensor(const SparseState& a, const SparseState& b) {
  const std::vector<SparseState> factors{a, b};
  return tensor(factors);
}

/// <a|b>.
inline Amplitude overlap(const SparseState& a, const SparseState& b) {
  if (a.mode_count() != b.mode_count()) {
    fail(ErrorKind::mode_mismatch, "overlap of states with different modes");
  }
  Amplitude sum{0.0, 0.0};
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.support_size() && j < b.support_size()) {
    const auto ra = a.occupation(i);
    const auto rb = b.occupation(j);
    const auto cmp = std::lexicographical_compare_three_way(
        ra.begin(), ra.end(), rb.begin(), rb.end());
    if (cmp == 0) {
      sum += std::conj(a.amplitude(i)) * b.amplitude(j);
      ++i;
      ++j;
    } else if (cmp < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

struct NumberMoments {
  double mean_i;
  double mean_j;
  double product_mean;
  double cov;
};

/// Means of n_i and n_j, <n_i n_j>, and Cov(n_i, n_j). With i == j the
/// covariance is the variance of n_i.
inline NumberMoments number_moments(const SparseState& state, std::size_t i,
                                    std::size_t j) {
  if (i >= state.mode_count() || j >= state.mode_count()) {
    fail(ErrorKind::index_out_of_range, "mode index out of range");
  }
  double mi = 0.0;
  double mj = 0.0;
  double pm = 0.0;
  for (std::size_t k = 0; k < state.support_size(); ++k) {
    const double p = std::norm(state.amplitude(k));
    const auto occ = state.occupation(k);
    const double ni = occ[i];
    const double nj = occ[j];
    mi += p * ni;
    mj += p * nj;
    pm += p * (ni * nj);
  }
  // Centred second pass avoids cancellation for large means.
  double cov = 0.0;
  for (std::size_t k = 0; k < state.support_size(); ++k) {
    const double p = std::norm(state.amplitude(k));
    const auto occ = state.occupation(k);
    cov += p * ((occ[i] - mi) * (occ[j] - mj));
  }
  return {mi, mj, pm, cov};
}

struct NumberStatistics {
  Eigen::VectorXd means;
  Eigen::MatrixXd covariance;
};

/// All mode means and the full number covariance matrix in two passes.
inline NumberStatistics number_statistics(const SparseState& state) {
  const auto m = static_cast<Eigen::Index>(state.mode_count());
  Eigen::VectorXd means = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < state.support_size(); ++k) {
    const double p = std::norm(state.amplitude(k));
    const auto occ = state.occupation(k);
    for (Eigen::Index a = 0; a < m; ++a) means[a] += p * occ[a];
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd centred(m);
  for (std::size_t k = 0; k < state.support_size(); ++k) {
    const double p = std::norm(state.amplitude(k));
    const auto occ = state.occupation(k);
    for (Eigen::Index a = 0; a < m; ++a) centred[a] = occ[a] - means[a];
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b <= a; ++b) {
        cov(a, b) += p * (centred[a] * centred[b]);
      }
    }
  }
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b) cov(a, b) = cov(b, a);
  }
  return {std::move(means), std::move(cov)};
}

inline double mean_total_photons(const SparseState& state) {
  double total = 0.0;
  for (std::size_t k = 0; k < state.support_size(); ++k) {
    const auto occ = state.occupation(k);
    const double n = std::accumulate(occ.begin(), occ.end(), 0.0);
    total += std::norm(state.amplitude(k)) * n;
  }
  return total;
}

/// Photon-number distribution of one mode, indexed 0..cutoff.
inline std::vector<double> marginal_distribution(const SparseState& state,
                                                 std::size_t mode) {
  if (mode >= state.mode_count()) {
    fail(ErrorKind::index_out_of_range, "mode index out of range");
  }
  std::vector<double> p(state.cutoff() + 1, 0.0);
  for (std::size_t k = 0; k < state.support_size(); ++k) {
    p[state.occupation(k)[mode]] += std::norm(state.amplitude(k));
  }
  return p;
}

/// U(theta)|psi> with U(theta) = exp(i sum_j theta_j n_j).
inline SparseState apply_phase(const SparseState& state,
                               std::span<const double> theta) {
  if (theta.size() != state.mode_count()) {
    fail(ErrorKind::mode_mismatch, "phase vector length does not match modes");
  }
  for (double t : theta) {
    if (!std::isfinite(t)) fail(ErrorKind::invalid_argument, "phase not finite");
  }
  std::vector<Amplitude> amp(state.support_size());
  for (std::size_t k = 0; k < state.support_size(); ++k) {
    const auto occ = state.occupation(k);
    double phase = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) phase += theta[j] * occ[j];
    amp[k] = state.amplitude(k) * std::polar(1.0, phase);
  }
  return detail::StateAssembler::with_amplitudes(state, std::move(amp));
}

inline SparseState apply_phase(const SparseState& state,
                               std::initializer_list<double> theta) {
  return apply_phase(state, std::span<const double>(theta.begin(), theta.size()));
}

}  // namespace qmetro
