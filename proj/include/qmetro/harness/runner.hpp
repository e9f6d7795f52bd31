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
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qmetro/bounds.hpp"
#include "qmetro/error.hpp"
#include "qmetro/families.hpp"
#include "qmetro/fock.hpp"
#include "qmetro/harness/config.hpp"
#include "qmetro/qfim.hpp"

namespace qmetro::harness {

inline constexpr double kDiscrepancyFloor = 1e-300;

enum ExitCode : int {
  kExitSuccess = 0,
  kExitTolerance = 1,
  kExitConfig = 2,
  kExitResource = 3,
};

struct ResultRow {
  std::string command;
  int point = 0;
  FamilySpec spec;
  Scheme scheme = Scheme::parallel;
  double tol = 0.0;
  std::optional<double> n_total;
  std::optional<double> bound_analytic;
  std::optional<double> bound_oracle;
  std::optional<double> discrepancy;
  std::optional<double> mandel_q;
  std::optional<double> correlation_j;
  std::string route;
  std::string status = "ok";
  std::string verdict;
  std::string verdict_alt;
  std::string message;

  bool ok() const { return status == "ok"; }
};

inline void apply_overrides(RunConfig& cfg, std::optional<double> tol,
                            std::optional<double> epsilon) {
  if (tol) {
    if (!(*tol > 0.0)) fail(ErrorKind::config, "--tol must be > 0");
    cfg.tol = *tol;
  }
  if (epsilon) {
    cfg.epsilon = *epsilon;
    for (auto& spec : cfg.families) {
      spec.epsilon = *epsilon;
      validate(spec);
    }
  }
}

namespace detail {

inline ResultRow echo(const RunConfig& cfg, const FamilySpec& spec, int point) {
  ResultRow row;
  row.command = to_string(cfg.command);
  row.point = point;
  row.spec = spec;
  row.scheme = cfg.scheme_for(spec);
  row.tol = cfg.tol;
  return row;
}

inline void mark_error(ResultRow& row, const Error& e) {
  row.status = std::string(to_string(e.kind()));
  row.message = e.what();
}

inline void check_scheme(const ResultRow& row) {
  if (row.scheme != natural_scheme(row.spec.family)) {
    fail(ErrorKind::config, "family " + std::string(to_string(row.spec.family)) +
                                " is defined for the " +
                                to_string(natural_scheme(row.spec.family)) +
                                " scheme");
  }
}

inline void fill_bound(ResultRow& row) {
  check_scheme(row);
  const FamilyAnalytics a = family_analytics(row.spec);
  row.n_total = a.n_total;
  row.bound_analytic = a.bound_exact;
  row.mandel_q = a.mandel_q;
  row.correlation_j = a.correlation_j;
  row.route = to_string(Route::closed_form);
}

inline double relative_gap(double analytic, double oracle) {
  return std::abs(analytic - oracle) / std::max(analytic, kDiscrepancyFloor);
}

/// Fock realization, covariance and finite-difference QFIMs, CRB, and the
/// comparison against the closed form.
inline void fill_validate(ResultRow& row, const RunConfig& cfg) {
  fill_bound(row);
  const FamilyBuild build = build_family(row.spec);
  const int d = row.spec.d;
  const auto gens = row.scheme == Scheme::parallel ? parallel_generators(d)
                                                   : imaging_generators(d);
  const Qfim cov = qfim_covariance(build.state, gens);
  const Qfim fd = qfim_fd_oracle(build.state, gens, cfg.step, true);

  std::vector<double> crb_cov;
  std::vector<double> crb_fd;
  if (row.scheme == Scheme::parallel) {
    try {
      crb_cov = crb_from_qfim(extract_minus_block(cov, d));
      crb_fd = crb_from_qfim(extract_minus_block(fd, d));
      row.route = "matrix-inverse:minus-block";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::asymmetric_state) throw;
      crb_cov = crb_from_qfim(cov);
      crb_fd = crb_from_qfim(fd);
      row.route = "matrix-inverse:full(asymmetric)";
    }
  } else {
    crb_cov = crb_from_qfim(cov);
    crb_fd = crb_from_qfim(fd);
    row.route = "matrix-inverse";
  }

  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    worst = std::max(worst, relative_gap(*row.bound_analytic, crb_cov[k]));
    worst = std::max(worst, relative_gap(*row.bound_analytic, crb_fd[k]));
  }
  row.bound_oracle = crb_cov.front();
  row.discrepancy = worst;
  row.n_total = mean_total_photons(build.state);

  try {
    const PrecisionReport report =
        precision_report(build.state, row.scheme, d, cfg.symmetry_tol);
    row.mandel_q = report.mandel_q;
    row.correlation_j = report.correlation_j;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::mandel_undefined) throw;
  }
  if (!(worst <= cfg.tol)) row.status = "tolerance_exceeded";
}

inline ResultRow evaluate_point(const RunConfig& cfg, const FamilySpec& spec,
                                int point, bool oracle) {
  ResultRow row = echo(cfg, spec, point);
  try {
    if (oracle) {
      fill_validate(row, cfg);
    } else {
      fill_bound(row);
    }
  } catch (const Error& e) {
    mark_error(row, e);
  }
  return row;
}

inline std::string lower_of(const std::string& a, double bound_a,
                            const std::string& b, double bound_b) {
  if (std::abs(bound_a - bound_b) <= 1e-12 * std::max(bound_a, bound_b)) {
    return "tie";
  }
  return bound_a < bound_b ? a : b;
}

inline std::string row_name(const ResultRow& row, char tag) {
  return std::string(to_string(row.spec.family)) + "(" + tag + ")";
}

}  // namespace detail

/// Closed-form bound for the single configured family.
inline ResultRow run_bound(const RunConfig& cfg) {
  ResultRow row = detail::echo(cfg, cfg.families.front(), 0);
  detail::fill_bound(row);
  return row;
}

/// Analytic bound cross-checked against the Fock oracle.
inline ResultRow run_validate(const RunConfig& cfg) {
  return detail::evaluate_point(cfg, cfg.families.front(), 0, true);
}

namespace detail {

inline FamilySpec spec_at(const RunConfig& cfg, const FamilySpec& base,
                          const SweepAxis& axis, double value) {
  FamilySpec spec = base;
  set_parameter(spec, axis.parameter, value);
  if (axis.match_n_total) spec = match_mean_photon(spec, *axis.match_n_total);
  spec.epsilon = cfg.epsilon;
  return spec;
}

}  // namespace detail

/// One row per axis point, in axis order. Point failures are recorded in the
/// row and do not stop the sweep.
inline std::vector<ResultRow> run_sweep(const RunConfig& cfg) {
  if (!cfg.sweep) fail(ErrorKind::config, "sweep requires a [sweep] section");
  std::vector<ResultRow> rows;
  const auto values = cfg.sweep->values();
  rows.reserve(values.size());
  int point = 0;
  for (double v : values) {
    FamilySpec spec = cfg.families.front();
    try {
      spec = detail::spec_at(cfg, spec, *cfg.sweep, v);
    } catch (const Error& e) {
      set_parameter(spec, cfg.sweep->parameter, v);
      ResultRow row = detail::echo(cfg, spec, point);
      detail::mark_error(row, e);
      rows.push_back(std::move(row));
      ++point;
      continue;
    }
    rows.push_back(detail::evaluate_point(cfg, spec, point, cfg.oracle));
    ++point;
  }
  return rows;
}

/// Header annotation for compare output, empty when none applies.
inline std::string compare_header(const RunConfig& cfg) {
  const Family a = cfg.families[0].family;
  const Family b = cfg.families[1].family;
  if ((a == Family::ucs && b == Family::gecs) ||
      (a == Family::gecs && b == Family::ucs)) {
    std::array<char, 64> buf{};
    const double nu = crossover_nu(cfg.families[0].d);
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), nu);
    return "# crossover_nu=" + std::string(buf.data(), res.ptr);
  }
  return {};
}

/// Paired rows per point. Amplitude families are compared at equal mean
/// photon number by re-tuning the non-anchor's alpha. The gns/uno pair is
/// reported under two photon-budget conventions: equal N per state
/// (verdict) and equal total mean photon number (verdict_alt).
inline std::vector<ResultRow> run_compare(const RunConfig& cfg) {
  if (!cfg.compare || cfg.families.size() != 2) {
    fail(ErrorKind::config, "compare requires two families and a [compare] rule");
  }
  const bool anchor_is_b = cfg.compare->anchor == 'b';
  const std::size_t anchor = anchor_is_b ? 1 : 0;
  const std::size_t tuned = anchor_is_b ? 0 : 1;
  const Family fa = cfg.families[0].family;
  const Family fb = cfg.families[1].family;
  const bool gns_uno = (fa == Family::gns && fb == Family::uno) ||
                       (fa == Family::uno && fb == Family::gns);
  if (!gns_uno && !cfg.families[tuned].alpha) {
    fail(ErrorKind::config,
         "compare needs the non-anchor family to have an 'alpha' parameter "
         "(or the gns/uno pair)");
  }

  std::vector<double> values{0.0};
  if (cfg.sweep) values = cfg.sweep->values();

  std::vector<ResultRow> rows;
  int point = 0;
  for (double v : values) {
    std::array<FamilySpec, 2> specs{cfg.families[0], cfg.families[1]};
    std::array<ResultRow, 2> pair;
    bool failed = false;
    try {
      if (cfg.sweep) {
        FamilySpec& target = specs[0];
        set_parameter(target, cfg.sweep->parameter, v);
        if (cfg.sweep->match_n_total && !(gns_uno)) {
          target = match_mean_photon(target, *cfg.sweep->match_n_total);
        }
      }
      if (!gns_uno) {
        const double n_total = family_analytics(specs[anchor]).n_total;
        specs[tuned] = match_mean_photon(specs[tuned], n_total);
      }
    } catch (const Error& e) {
      failed = true;
      for (std::size_t k = 0; k < 2; ++k) {
        pair[k] = detail::echo(cfg, specs[k], point);
        detail::mark_error(pair[k], e);
      }
    }
    if (!failed) {
      for (std::size_t k = 0; k < 2; ++k) {
        pair[k] = detail::evaluate_point(cfg, specs[k], point, cfg.oracle);
      }
      if (pair[0].ok() && pair[1].ok()) {
        const std::string na = detail::row_name(pair[0], 'a');
        const std::string nb = detail::row_name(pair[1], 'b');
        const double ba = *pair[0].bound_analytic;
        const double bb = *pair[1].bound_analytic;
        const std::string verdict = detail::lower_of(na, ba, nb, bb);
        std::string alt;
        if (gns_uno) {
          // Bounds of both families scale as 1/N^2 at fixed shape parameters,
          // so rescaling by the squared photon ratio puts them on one budget.
          const double na_total = *pair[0].n_total;
          const double nb_total = *pair[1].n_total;
          alt = detail::lower_of(na, ba * (na_total / nb_total) * (na_total / nb_total),
                                 nb, bb);
        }
        for (auto& r : pair) {
          r.verdict = verdict;
          r.verdict_alt = alt;
        }
      }
    }
    for (auto& r : pair) rows.push_back(std::move(r));
    ++point;
  }
  return rows;
}

inline int exit_code(const std::vector<ResultRow>& rows) {
  bool any_config = false;
  bool any_resource = false;
  bool any_failure = false;
  for (const auto& r : rows) {
    if (r.ok()) continue;
    any_failure = true;
    if (r.status == to_string(ErrorKind::config)) any_config = true;
    if (r.status == to_string(ErrorKind::resource)) any_resource = true;
  }
  if (any_config) return kExitConfig;
  if (any_resource) return kExitResource;
  return any_failure ? kExitTolerance : kExitSuccess;
}

namespace detail {

inline std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::string format_opt(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

}  // namespace detail

/// Comma-separated output, shortest round-trip number formatting. Compare
/// runs append the two verdict columns.
inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows,
                      bool with_verdicts, const std::string& header_note = {}) {
  if (!header_note.empty()) out << header_note << '\n';
  out << "command,point,family,scheme,d,alpha_re,alpha_im,nu,gamma,n_photons,"
         "epsilon,tol,n_total,bound_analytic,bound_oracle,discrepancy,mandel_q,"
         "correlation_j,route,status";
  if (with_verdicts) out << ",verdict,verdict_equal_total";
  out << '\n';
  using detail::format_opt;
  using detail::format_real;
  for (const auto& r : rows) {
    const auto& s = r.spec;
    std::string gamma;
    if (s.gamma) gamma = s.gamma->is_auto() ? "auto" : format_real(s.gamma->resolve(s.d));
    out << r.command << ',' << r.point << ',' << to_string(s.family) << ','
        << to_string(r.scheme) << ',' << s.d << ','
        << (s.alpha ? format_real(s.alpha->real()) : "") << ','
        << (s.alpha ? format_real(s.alpha->imag()) : "") << ','
        << format_opt(s.nu) << ',' << gamma << ','
        << (s.n_photons ? std::to_string(*s.n_photons) : "") << ','
        << format_real(s.epsilon) << ',' << format_real(r.tol) << ','
        << format_opt(r.n_total) << ',' << format_opt(r.bound_analytic) << ','
        << format_opt(r.bound_oracle) << ',' << format_opt(r.discrepancy) << ','
        << format_opt(r.mandel_q) << ',' << format_opt(r.correlation_j) << ','
        << r.route << ',' << r.status;
    if (with_verdicts) out << ',' << r.verdict << ',' << r.verdict_alt;
    out << '\n';
  }
}

}  // namespace qmetro::harness
