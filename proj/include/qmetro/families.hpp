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
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qmetro/bounds.hpp"
#include "qmetro/error.hpp"
#include "qmetro/fock.hpp"

/// Probe-state families: closed-form analytics and truncated Fock
/// realizations of the same states, so one can be checked against the other.
namespace qmetro {

enum class Family { gecs, ucs, gns, uno, noon_pair, coherent };

constexpr std::string_view to_string(Family f) {
  switch (f) {
    case Family::gecs: return "gecs";
    case Family::ucs: return "ucs";
    case Family::gns: return "gns";
    case Family::uno: return "uno";
    case Family::noon_pair: return "noon_pair";
    case Family::coherent: return "coherent";
  }
  return "unknown";
}

inline Family family_from_string(std::string_view name) {
  for (Family f : {Family::gecs, Family::ucs, Family::gns, Family::uno,
                   Family::noon_pair, Family::coherent}) {
    if (name == to_string(f)) return f;
  }
  fail(ErrorKind::config, "unknown family '" + std::string(name) + "'");
}

/// Reference-mode weight of a GNS: either a fixed value or d^{1/4}.
class GammaChoice {
 public:
  static GammaChoice automatic() { return GammaChoice(true, 0.0); }
  static GammaChoice fixed(double value) { return GammaChoice(false, value); }

  bool is_auto() const noexcept { return auto_; }
  double value_or_nan() const noexcept { return auto_ ? std::nan("") : value_; }

  double resolve(int d) const {
    return auto_ ? std::pow(static_cast<double>(d), 0.25) : value_;
  }
  /// gamma^2; the automatic choice is sqrt(d) evaluated directly.
  double resolve_squared(int d) const {
    return auto_ ? std::sqrt(static_cast<double>(d)) : value_ * value_;
  }

 private:
  GammaChoice(bool a, double v) : auto_(a), value_(v) {}
  bool auto_;
  double value_;
};

struct FamilySpec {
  Family family = Family::coherent;
  int d = 1;
  std::optional<Amplitude> alpha;
  std::optional<double> nu;
  std::optional<GammaChoice> gamma;
  std::optional<int> n_photons;
  double epsilon = kDefaultEpsilon;
};

struct FamilyAnalytics {
  Scheme scheme = Scheme::parallel;
  double n_total = 0.0;        // mean photons over all modes
  double n_mode = 0.0;         // mean photons in one probe mode
  double variance = 0.0;       // probe-mode number variance
  double covariance = 0.0;     // C_intra (parallel) or probe-probe C (imaging)
  double mandel_q = 0.0;
  double correlation_j = 0.0;
  double bound_exact = 0.0;    // per-phase delta phi^2
  double bound_approx = 0.0;   // large-amplitude form, or bound_exact
  double normalization = 0.0;
};

struct FamilyBuild {
  SparseState state;
  FamilyAnalytics analytics;
  TruncationReport truncation;
};

inline Scheme natural_scheme(Family f) {
  return (f == Family::gns || f == Family::uno) ? Scheme::imaging
                                                : Scheme::parallel;
}

/// Rejects missing or inapplicable parameters, naming the offending field.
inline void validate(const FamilySpec& spec) {
  const std::string name(to_string(spec.family));
  const bool wants_alpha = spec.family == Family::gecs ||
                           spec.family == Family::ucs ||
                           spec.family == Family::coherent;
  const bool wants_nu = spec.family == Family::ucs || spec.family == Family::uno;
  const bool wants_gamma = spec.family == Family::gns;
  const bool wants_n = spec.family == Family::gns ||
                       spec.family == Family::uno ||
                       spec.family == Family::noon_pair;
  auto presence = [&](bool wanted, bool present, const char* field) {
    if (wanted && !present) {
      fail(ErrorKind::config, "family " + name + " requires parameter '" +
                                  field + "'");
    }
    if (!wanted && present) {
      fail(ErrorKind::config, "parameter '" + std::string(field) +
                                  "' does not apply to family " + name);
    }
  };
  presence(wants_alpha, spec.alpha.has_value(), "alpha");
  presence(wants_nu, spec.nu.has_value(), "nu");
  presence(wants_gamma, spec.gamma.has_value(), "gamma");
  presence(wants_n, spec.n_photons.has_value(), "n_photons");

  if (spec.d < 1) fail(ErrorKind::config, "parameter 'd' must be >= 1");
  if (spec.alpha && (!std::isfinite(spec.alpha->real()) ||
                     !std::isfinite(spec.alpha->imag()))) {
    fail(ErrorKind::config, "parameter 'alpha' must be finite");
  }
  if (spec.nu && !(*spec.nu >= 0.0 && std::isfinite(*spec.nu))) {
    fail(ErrorKind::config, "parameter 'nu' must be finite and >= 0");
  }
  if (spec.gamma && !spec.gamma->is_auto() &&
      !(spec.gamma->resolve(spec.d) > 0.0 &&
        std::isfinite(spec.gamma->resolve(spec.d)))) {
    fail(ErrorKind::config, "parameter 'gamma' must be > 0 or auto");
  }
  if (spec.n_photons && *spec.n_photons < 1) {
    fail(ErrorKind::config, "parameter 'n_photons' must be >= 1");
  }
  if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
    fail(ErrorKind::config, "parameter 'epsilon' must lie in (0, 1)");
  }
}

namespace detail {

inline void finish_analytics(FamilyAnalytics& a) {
  a.mandel_q = a.n_mode > 0.0 ? (a.variance - a.n_mode) / a.n_mode : 0.0;
  a.correlation_j = a.variance > 0.0 ? a.covariance / a.variance : 0.0;
}

/// Mean total photon number of the amplitude-parameterized families.
inline double mean_total_of(Family family, int d, double alpha_sq, double nu) {
  const double modes = 2.0 * d;
  switch (family) {
    case Family::gecs:
      return alpha_sq / (1.0 + (modes - 1.0) * std::exp(-alpha_sq));
    case Family::ucs:
      return modes * alpha_sq /
             (nu * nu + 1.0 + 2.0 * nu * std::exp(-0.5 * alpha_sq));
    case Family::coherent:
      return modes * alpha_sq;
    default:
      fail(ErrorKind::invalid_argument,
           "family has no free amplitude parameter");
  }
}

}  // namespace detail

/// Closed-form analytics; no Fock construction.
inline FamilyAnalytics family_analytics(const FamilySpec& spec) {
  validate(spec);
  FamilyAnalytics a;
  a.scheme = natural_scheme(spec.family);
  const int d = spec.d;
  const double modes = 2.0 * d;

  switch (spec.family) {
    case Family::gecs: {
      const double x = std::norm(*spec.alpha);
      const double overlap_sum = 1.0 + (modes - 1.0) * std::exp(-x);
      a.normalization = 1.0 / std::sqrt(modes * overlap_sum);
      a.n_total = x / overlap_sum;
      a.n_mode = a.n_total / modes;
      a.variance = a.n_mode * (x + 1.0) - a.n_mode * a.n_mode;
      a.covariance = -a.n_mode * a.n_mode;
      if (!(a.n_total > 0.0)) {
        fail(ErrorKind::no_information, "GECS with alpha = 0 is the vacuum");
      }
      a.bound_exact = d / (a.n_total * (x + 1.0));
      a.bound_approx = d / (a.n_total * (a.n_total + 1.0));
      break;
    }
    case Family::ucs: {
      const double x = std::norm(*spec.alpha);
      const double nu = *spec.nu;
      const double cat_norm2 = nu * nu + 1.0 + 2.0 * nu * std::exp(-0.5 * x);
      a.normalization = std::pow(cat_norm2, -0.5 * modes);
      a.n_total = modes * x / cat_norm2;
      a.n_mode = x / cat_norm2;
      a.variance = a.n_mode * (x + 1.0 - a.n_mode);
      a.covariance = 0.0;
      const double spread = x + 1.0 - a.n_total / modes;
      if (!(a.n_total > 0.0) || !(spread > 0.0)) {
        fail(ErrorKind::no_information, "UCS probe has zero number variance");
      }
      a.bound_exact = d / (a.n_total * spread);
      a.bound_approx = d / (a.n_total * (nu * nu / modes * a.n_total + 1.0));
      break;
    }
    case Family::gns: {
      const double n = *spec.n_photons;
      const double g2 = spec.gamma->resolve_squared(d);
      const double s = d + g2;
      a.normalization = 1.0 / std::sqrt(s);
      a.n_total = n;
      a.n_mode = n / s;
      a.variance = n * n / s - n * n / (s * s);
      a.covariance = -n * n / (s * s);
      a.bound_exact = s * (1.0 + g2) / (4.0 * g2 * n * n);
      a.bound_approx = a.bound_exact;
      break;
    }
    case Family::uno: {
      const double n = *spec.n_photons;
      const double nu2 = *spec.nu * *spec.nu;
      a.normalization = 1.0 / std::sqrt(1.0 + nu2);
      a.n_mode = n / (1.0 + nu2);
      a.n_total = d * a.n_mode;
      a.variance = n * n * nu2 / ((1.0 + nu2) * (1.0 + nu2));
      a.covariance = 0.0;
      a.bound_exact = imaging_bound({a.variance, 0.0, 1});
      a.bound_approx = a.bound_exact;
      break;
    }
    case Family::noon_pair: {
      const double n = *spec.n_photons;
      a.normalization = 1.0 / std::sqrt(2.0);
      a.n_total = d * n;
      a.n_mode = 0.5 * n;
      a.variance = 0.25 * n * n;
      a.covariance = -0.25 * n * n;
      a.bound_exact = parallel_bound({a.variance, a.covariance, 0.0, d});
      a.bound_approx = a.bound_exact;
      break;
    }
    case Family::coherent: {
      const double x = std::norm(*spec.alpha);
      a.normalization = 1.0;
      a.n_total = modes * x;
      a.n_mode = x;
      a.variance = x;
      a.covariance = 0.0;
      if (!(x > 0.0)) {
        fail(ErrorKind::no_information, "coherent probe with alpha = 0");
      }
      a.bound_exact = 1.0 / (2.0 * x);
      a.bound_approx = a.bound_exact;
      break;
    }
  }
  detail::finish_analytics(a);
  return a;
}

namespace detail {

inline SparseState repeated(const SparseState& factor, std::size_t copies,
                            std::optional<SparseState> tail = std::nullopt) {
  std::vector<SparseState> factors(copies, factor);
  if (tail) factors.push_back(*tail);
  if (factors.size() == 1) return factors.front();
  return tensor(factors);
}

}  // namespace detail

/// N_g sum_a D_a(alpha)|0> over the 2d modes. The Fock realization is
/// normalized from its own overlaps rather than the closed-form N_g.
inline FamilyBuild build_gecs(const FamilySpec& spec) {
  if (spec.family != Family::gecs) {
    fail(ErrorKind::invalid_argument, "build_gecs needs a gecs spec");
  }
  FamilyAnalytics analytics = family_analytics(spec);
  const auto modes = 2 * static_cast<std::size_t>(spec.d);
  const CoherentMode coh = coherent_mode(*spec.alpha, spec.epsilon);
  const SparseState vac = vacuum(1);

  std::vector<SparseState> branches;
  branches.reserve(modes);
  for (std::size_t a = 0; a < modes; ++a) {
    std::vector<SparseState> factors;
    factors.reserve(modes);
    for (std::size_t b = 0; b < modes; ++b) {
      factors.push_back(b == a ? coh.state : vac);
    }
    branches.push_back(modes == 1 ? factors.front() : tensor(factors));
  }
  std::vector<WeightedState> terms;
  terms.reserve(modes);
  for (const auto& b : branches) terms.push_back({Amplitude{1.0, 0.0}, b});
  Superposition sum = superpose(terms);
  return {std::move(sum.state), analytics, coh.truncation};
}

/// (|alpha> + nu|0>)^{(x) 2d}, each factor normalized.
inline FamilyBuild build_ucs(const FamilySpec& spec) {
  if (spec.family != Family::ucs) {
    fail(ErrorKind::invalid_argument, "build_ucs needs a ucs spec");
  }
  FamilyAnalytics analytics = family_analytics(spec);
  const CoherentMode coh = coherent_mode(*spec.alpha, spec.epsilon);
  const SparseState vac = vacuum(1);
  const Superposition cat =
      superpose({{Amplitude{1.0, 0.0}, coh.state}, {Amplitude{*spec.nu, 0.0}, vac}});
  return {detail::repeated(cat.state, 2 * static_cast<std::size_t>(spec.d)),
          analytics, coh.truncation};
}

/// (|N,0,..,0> + ... + |0,..,N,0> + gamma |0,..,0,N>) / sqrt(d + gamma^2).
inline FamilyBuild build_gns(const FamilySpec& spec) {
  if (spec.family != Family::gns) {
    fail(ErrorKind::invalid_argument, "build_gns needs a gns spec");
  }
  FamilyAnalytics analytics = family_analytics(spec);
  const auto modes = static_cast<std::size_t>(spec.d) + 1;
  const auto n = static_cast<unsigned>(*spec.n_photons);
  const double g = spec.gamma->resolve(spec.d);
  const double weight = 1.0 / std::sqrt(spec.d + g * g);
  std::vector<SparseState::Term> terms;
  for (std::size_t a = 0; a < modes; ++a) {
    std::vector<unsigned> occ(modes, 0u);
    occ[a] = n;
    const double amp = a + 1 == modes ? g * weight : weight;
    terms.emplace_back(OccupationVector(std::move(occ)), Amplitude{amp, 0.0});
  }
  return {SparseState::normalized(modes, n, terms), analytics, {}};
}

/// Single-mode (|N> + nu|0>) / sqrt(1 + nu^2).
inline FamilyBuild build_uno(const FamilySpec& spec) {
  if (spec.family != Family::uno) {
    fail(ErrorKind::invalid_argument, "build_uno needs a uno spec");
  }
  FamilyAnalytics analytics = family_analytics(spec);
  const auto n = static_cast<unsigned>(*spec.n_photons);
  const double nu = *spec.nu;
  const double norm = 1.0 / std::sqrt(1.0 + nu * nu);
  const std::vector<SparseState::Term> terms{
      {OccupationVector{n}, Amplitude{norm, 0.0}},
      {OccupationVector{0u}, Amplitude{nu * norm, 0.0}}};
  return {SparseState::normalized(1, n, terms), analytics, {}};
}

/// d UNO probe modes followed by a vacuum reference mode.
inline FamilyBuild uno_imaging_array(const FamilySpec& spec) {
  FamilyBuild single = build_uno(spec);
  single.state = detail::repeated(single.state,
                                  static_cast<std::size_t>(spec.d), vacuum(1));
  return single;
}

/// (|N,0> + |0,N>) / sqrt(2).
inline FamilyBuild build_noon_pair(int n_photons) {
  FamilySpec spec;
  spec.family = Family::noon_pair;
  spec.n_photons = n_photons;
  FamilyAnalytics analytics = family_analytics(spec);
  const auto n = static_cast<unsigned>(n_photons);
  const double w = 1.0 / std::sqrt(2.0);
  const std::vector<SparseState::Term> terms{
      {OccupationVector{n, 0u}, Amplitude{w, 0.0}},
      {OccupationVector{0u, n}, Amplitude{w, 0.0}}};
  return {SparseState::normalized(2, n, terms), analytics, {}};
}

inline FamilyBuild build_coherent(const FamilySpec& spec) {
  if (spec.family != Family::coherent) {
    fail(ErrorKind::invalid_argument, "build_coherent needs a coherent spec");
  }
  FamilyAnalytics analytics = family_analytics(spec);
  const CoherentMode coh = coherent_mode(*spec.alpha, spec.epsilon);
  return {detail::repeated(coh.state, 2 * static_cast<std::size_t>(spec.d)),
          analytics, coh.truncation};
}

/// The Fock probe a spec describes, laid out for its natural scheme:
/// 2d modes for parallel families, d + 1 modes for imaging families.
inline FamilyBuild build_family(const FamilySpec& spec) {
  validate(spec);
  switch (spec.family) {
    case Family::gecs: return build_gecs(spec);
    case Family::ucs: return build_ucs(spec);
    case Family::gns: return build_gns(spec);
    case Family::uno: return uno_imaging_array(spec);
    case Family::coherent: return build_coherent(spec);
    case Family::noon_pair: {
      FamilyBuild pair = build_noon_pair(*spec.n_photons);
      pair.analytics = family_analytics(spec);
      pair.state = detail::repeated(pair.state, static_cast<std::size_t>(spec.d));
      return pair;
    }
  }
  fail(ErrorKind::invalid_argument, "unknown family");
}

/// Single-mode state whose amplitudes are the square roots of one mode's
/// photon-number distribution. The listed modes (all modes by default) must
/// share that distribution; the first of them supplies it.
inline SparseState single_mode_analogue(const SparseState& state,
                                        std::vector<std::size_t> modes = {},
                                        double tol = kDefaultSymmetryTol) {
  if (modes.empty()) {
    modes.resize(state.mode_count());
    for (std::size_t a = 0; a < modes.size(); ++a) modes[a] = a;
  }
  const std::vector<double> reference = marginal_distribution(state, modes.front());
  for (std::size_t k = 1; k < modes.size(); ++k) {
    const std::vector<double> other = marginal_distribution(state, modes[k]);
    for (std::size_t n = 0; n < reference.size(); ++n) {
      if (std::abs(other[n] - reference[n]) > tol) {
        fail(ErrorKind::asymmetric_state,
             "mode " + std::to_string(modes[k] + 1) +
                 " has a different photon-number distribution from mode " +
                 std::to_string(modes.front() + 1) + " at n = " +
                 std::to_string(n));
      }
    }
  }
  std::vector<SparseState::Term> terms;
  for (std::size_t n = 0; n < reference.size(); ++n) {
    if (reference[n] <= 0.0) continue;
    terms.emplace_back(OccupationVector{static_cast<unsigned>(n)},
                       Amplitude{std::sqrt(reference[n]), 0.0});
  }
  return SparseState::normalized(1, state.cutoff(), terms);
}

/// Adjusts |alpha| (keeping its phase) so the closed-form mean total photon
/// number hits the target. Bisection starts on [0, 64] and widens the upper
/// end by doubling while the target is still out of reach.
inline FamilySpec match_mean_photon(FamilySpec spec, double target_n_total) {
  validate(spec);
  if (!spec.alpha) {
    fail(ErrorKind::invalid_argument, "family has no free amplitude parameter");
  }
  const double nu = spec.nu.value_or(0.0);
  auto mean_at = [&](double r) {
    return detail::mean_total_of(spec.family, spec.d, r * r, nu);
  };
  if (!(target_n_total > 0.0) || !std::isfinite(target_n_total)) {
    fail(ErrorKind::unreachable,
         "target mean photon number must be positive and finite");
  }
  constexpr double kUpperCap = 4096.0;
  double lo = 0.0;
  double hi = 64.0;
  while (mean_at(hi) < target_n_total) {
    lo = hi;
    hi *= 2.0;
    if (hi > kUpperCap) {
      fail(ErrorKind::unreachable, "target mean photon number out of reach");
    }
  }
  for (int iter = 0; iter < 400 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double value = mean_at(mid);
    if (std::abs(value - target_n_total) <= 1e-13 * target_n_total) {
      lo = hi = mid;
      break;
    }
    (value < target_n_total ? lo : hi) = mid;
  }
  const double r = 0.5 * (lo + hi);
  const double phase = std::abs(*spec.alpha) > 0.0 ? std::arg(*spec.alpha) : 0.0;
  spec.alpha = std::polar(r, phase);
  return spec;
}

/// nu above which the UCS beats the GECS at equal mean photon number.
inline double crossover_nu(int d) {
  if (d < 1) fail(ErrorKind::invalid_argument, "d must be at least 1");
  return std::sqrt(2.0 * d);
}

}  // namespace qmetro
