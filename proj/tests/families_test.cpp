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

#include "qmetro/families.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace qmetro {
namespace {

// Reference values evaluated independently at 30 significant digits.
constexpr double kGecsD2A2NTotal = 3.79165997531006241672454212336;
constexpr double kGecsD2A2Bound = 0.105494691666620254088115406382;
constexpr double kGecsD2A3NTotal = 8.9966691684614625021016822936;
constexpr double kUcsD1A1Nu1NTotal = 0.622459331201854564638900565746;
constexpr double kUcsD2A4Nu3NTotal = 6.39871208273771994982345699282;
constexpr double kUcsD2A4Nu3Bound = 0.0202958678177339524381604220474;

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a qmetro::Error";
  return ErrorKind::invalid_argument;
}

FamilySpec gecs(int d, Amplitude alpha) {
  return {.family = Family::gecs, .d = d, .alpha = alpha};
}
FamilySpec ucs(int d, Amplitude alpha, double nu) {
  return {.family = Family::ucs, .d = d, .alpha = alpha, .nu = nu};
}
FamilySpec gns(int d, int n, std::optional<double> gamma = std::nullopt) {
  return {.family = Family::gns,
          .d = d,
          .gamma = gamma ? GammaChoice::fixed(*gamma) : GammaChoice::automatic(),
          .n_photons = n};
}
FamilySpec uno(int d, int n, double nu) {
  return {.family = Family::uno, .d = d, .nu = nu, .n_photons = n};
}

double fock_bound(const FamilyBuild& b, int d) {
  return precision_report(b.state, natural_scheme(b.analytics.scheme == Scheme::imaging
                                                      ? Family::gns
                                                      : Family::gecs),
                          d)
      .per_phase.front();
}

TEST(FamilyNames, RoundTrip) {
  for (Family f : {Family::gecs, Family::ucs, Family::gns, Family::uno, Family::noon_pair,
                   Family::coherent}) {
    EXPECT_EQ(family_from_string(to_string(f)), f);
  }
  EXPECT_EQ(kind_of([] { family_from_string("squeezed"); }), ErrorKind::config);
}

TEST(Validate, NamesMissingAndInapplicableFields) {
  try {
    validate({.family = Family::ucs, .d = 2, .alpha = Amplitude{1.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_EQ(std::string(e.what()), "family ucs requires parameter 'nu'");
  }
  try {
    validate({.family = Family::gecs, .d = 2, .alpha = Amplitude{1.0}, .nu = 1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("'nu'"), std::string::npos);
  }
  EXPECT_EQ(kind_of([] { validate(gns(0, 1)); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { validate(uno(1, 1, -1.0)); }), ErrorKind::config);
  EXPECT_EQ(kind_of([] { validate(gns(2, 0)); }), ErrorKind::config);
}

TEST(Gecs, ClosedFormMatchesReference) {
  const FamilyAnalytics a = family_analytics(gecs(2, 2.0));
  EXPECT_NEAR(a.n_total, kGecsD2A2NTotal, 1e-14);
  EXPECT_NEAR(a.bound_exact, kGecsD2A2Bound, 1e-15);
  EXPECT_NEAR(family_analytics(gecs(2, 3.0)).n_total, kGecsD2A3NTotal, 1e-13);
  EXPECT_NEAR(a.covariance, -a.n_mode * a.n_mode, 1e-15);
  EXPECT_NEAR(a.bound_exact, parallel_bound_mandel(a.n_mode, a.mandel_q, a.correlation_j),
              1e-14);
}

TEST(Gecs, FockStateAgreesWithClosedForm) {
  for (int d : {1, 2, 3}) {
    const FamilyBuild b = build_family(gecs(d, 1.7));
    EXPECT_EQ(b.state.mode_count(), 2u * d);
    EXPECT_NEAR(mean_total_photons(b.state), b.analytics.n_total, 1e-9);
    const ParallelDiagnostics diag = diagnose_parallel(b.state, d);
    EXPECT_NEAR(diag.params.variance, b.analytics.variance, 1e-9);
    EXPECT_NEAR(diag.params.c_intra, b.analytics.covariance, 1e-9);
    if (d > 1) EXPECT_NEAR(diag.params.c_inter, b.analytics.covariance, 1e-9);
    EXPECT_NEAR(fock_bound(b, d), b.analytics.bound_exact, 1e-9);
  }
}

TEST(Gecs, ApproximationTightensWithAmplitude) {
  double prev = 1.0;
  for (double a : {2.0, 3.0, 5.0, 8.0}) {
    const FamilyAnalytics f = family_analytics(gecs(2, a));
    const double gap = std::abs(f.bound_approx - f.bound_exact) / f.bound_exact;
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(Gecs, ZeroAmplitudeCarriesNoInformation) {
  EXPECT_EQ(kind_of([] { family_analytics(gecs(1, 0.0)); }), ErrorKind::no_information);
}

TEST(Ucs, ClosedFormMatchesReference) {
  EXPECT_NEAR(family_analytics(ucs(1, 1.0, 1.0)).n_total, kUcsD1A1Nu1NTotal, 1e-15);
  const FamilyAnalytics a = family_analytics(ucs(2, 4.0, 3.0));
  EXPECT_NEAR(a.n_total, kUcsD2A4Nu3NTotal, 1e-14);
  EXPECT_NEAR(a.bound_exact, kUcsD2A4Nu3Bound, 1e-16);
  EXPECT_NEAR(a.bound_exact, 1.0 / (2.0 * a.variance), 1e-15);
  EXPECT_EQ(a.covariance, 0.0);
}

TEST(Ucs, FockStateAgreesWithClosedForm) {
  const FamilyBuild b = build_family(ucs(2, 2.0, 1.0));
  EXPECT_NEAR(mean_total_photons(b.state), b.analytics.n_total, 1e-9);
  EXPECT_NEAR(fock_bound(b, 2), b.analytics.bound_exact, 1e-9);
  const FamilyBuild one = build_family(ucs(1, 1.0, 1.0));
  EXPECT_NEAR(mean_total_photons(one.state), kUcsD1A1Nu1NTotal, 1e-10);
}

TEST(Ucs, VanishingVacuumWeightIsCoherent) {
  const FamilyAnalytics u = family_analytics(ucs(3, 1.3, 0.0));
  const FamilyAnalytics c =
      family_analytics({.family = Family::coherent, .d = 3, .alpha = Amplitude{1.3}});
  EXPECT_NEAR(u.n_total, c.n_total, 1e-14);
  EXPECT_NEAR(u.bound_exact, c.bound_exact, 1e-15);
  EXPECT_NEAR(c.bound_exact, 1.0 / (2.0 * 1.69), 1e-15);
}

TEST(Gns, AutomaticGammaReachesOptimum) {
  const double reference[] = {1.0, 1.45710678118654752440084436211, 2.25,
                              3.66421356237309504880168872421};
  const int ds[] = {1, 2, 4, 8};
  for (int k = 0; k < 4; ++k) {
    for (int n : {1, 2}) {
      const FamilyAnalytics a = family_analytics(gns(ds[k], n));
      const double expected = reference[k] / (n * n);
      EXPECT_NEAR(a.bound_exact, expected, 4e-16 * expected) << "d=" << ds[k];
    }
  }
}

TEST(Gns, CorrelationAndFockAgreement) {
  for (int d : {1, 2, 4, 9}) {
    const FamilySpec spec = gns(d, 2);
    const FamilyBuild b = build_family(spec);
    const double s = d + std::sqrt(static_cast<double>(d));
    if (d > 1) EXPECT_NEAR(b.analytics.correlation_j, -1.0 / (s - 1.0), 1e-14);
    const ImagingDiagnostics diag = diagnose_imaging(b.state, d);
    EXPECT_NEAR(diag.params.variance, b.analytics.variance, 1e-12);
    if (d > 1) EXPECT_NEAR(diag.params.covariance, b.analytics.covariance, 1e-12);
    EXPECT_NEAR(fock_bound(b, d), b.analytics.bound_exact, 1e-12);
  }
}

TEST(Uno, VarianceAndSinglePhaseBound) {
  const FamilyAnalytics a = family_analytics(uno(2, 3, 2.0));
  EXPECT_NEAR(a.variance, 9.0 * 4.0 / 25.0, 1e-15);
  EXPECT_NEAR(a.bound_exact, 25.0 / (4.0 * 36.0), 1e-15);
  EXPECT_NEAR(a.n_mode, 3.0 / 5.0, 1e-15);
  const FamilyBuild b = build_family(uno(2, 3, 2.0));
  EXPECT_EQ(b.state.mode_count(), 3u);
  EXPECT_NEAR(fock_bound(b, 2), a.bound_exact, 1e-12);
  EXPECT_EQ(kind_of([] { family_analytics(uno(1, 2, 0.0)); }), ErrorKind::no_information);
}

TEST(NoonPair, HeisenbergScaling) {
  for (int n = 1; n <= 4; ++n) {
    const FamilySpec spec{.family = Family::noon_pair, .d = 2, .n_photons = n};
    const FamilyBuild b = build_family(spec);
    EXPECT_NEAR(b.analytics.bound_exact, 1.0 / (n * n), 1e-15);
    EXPECT_NEAR(fock_bound(b, 2), 1.0 / (n * n), 1e-12);
    EXPECT_NEAR(b.analytics.n_total, 2.0 * n, 1e-15);
  }
}

TEST(SingleModeAnalogue, PreservesMeanAndMandel) {
  const FamilyBuild b = build_family(gecs(2, 2.0));
  const SparseState a = single_mode_analogue(b.state);
  const auto m = number_moments(a, 0, 0);
  EXPECT_NEAR(m.mean_i, b.analytics.n_mode, 1e-8);
  EXPECT_NEAR((m.cov - m.mean_i) / m.mean_i, b.analytics.mandel_q, 1e-8);

  const FamilyBuild g = build_family(gns(3, 2, 1.0));
  const SparseState ga = single_mode_analogue(g.state);
  const auto gm = number_moments(ga, 0, 0);
  EXPECT_NEAR(gm.mean_i, g.analytics.n_mode, 1e-10);
  EXPECT_NEAR((gm.cov - gm.mean_i) / gm.mean_i, g.analytics.mandel_q, 1e-10);
}

TEST(SingleModeAnalogue, RejectsModesWithDifferentStatistics) {
  const FamilyBuild g = build_family(gns(2, 2, 0.5));
  EXPECT_EQ(kind_of([&] { single_mode_analogue(g.state); }), ErrorKind::asymmetric_state);
  EXPECT_NO_THROW(single_mode_analogue(g.state, {0, 1}));
}

TEST(MatchMeanPhoton, HitsTargetAndKeepsPhase) {
  const FamilySpec c = match_mean_photon(ucs(1, 1.0, 0.0), 4.0);
  EXPECT_NEAR(std::abs(*c.alpha), std::sqrt(2.0), 1e-12);

  const FamilySpec g = match_mean_photon(gecs(2, std::polar(1.0, 0.4)), 6.0);
  EXPECT_NEAR(family_analytics(g).n_total, 6.0, 1e-12);
  EXPECT_NEAR(std::arg(*g.alpha), 0.4, 1e-14);

  // Far beyond the initial bracket: large vacuum weight needs |alpha| ~ 100.
  const FamilySpec wide = match_mean_photon(ucs(2, 1.0, 50.0), 16.0);
  EXPECT_GT(std::abs(*wide.alpha), 64.0);
  EXPECT_NEAR(family_analytics(wide).n_total, 16.0, 1e-11);
}

TEST(MatchMeanPhoton, RoundTripsGecsAmplitude) {
  const FamilySpec g = match_mean_photon(gecs(2, 1.0), kGecsD2A3NTotal);
  EXPECT_NEAR(std::abs(*g.alpha), 3.0, 1e-10);
}

TEST(MatchMeanPhoton, RejectsUnreachableTargets) {
  EXPECT_EQ(kind_of([] { match_mean_photon(gecs(1, 1.0), 0.0); }), ErrorKind::unreachable);
  EXPECT_EQ(kind_of([] { match_mean_photon(gecs(1, 1.0), -2.0); }), ErrorKind::unreachable);
  EXPECT_EQ(kind_of([] { match_mean_photon(gns(2, 1), 3.0); }), ErrorKind::invalid_argument);
}

TEST(Crossover, MatchesSquareRootOfModeCount) {
  EXPECT_DOUBLE_EQ(crossover_nu(1), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(crossover_nu(8), 4.0);
}

}  // namespace
}  // namespace qmetro
