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

#include "qmetro/fock.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace qmetro {
namespace {

using cplx = std::complex<double>;

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a qmetro::Error";
  return ErrorKind::invalid_argument;
}

TEST(FockBasis, VacuumAndExcitedLabels) {
  const SparseState vac = fock_basis({0u, 0u});
  ASSERT_EQ(vac.support_size(), 1u);
  EXPECT_EQ(vac.amplitude_at({0u, 0u}), cplx(1.0));

  const SparseState two = fock_basis({2u, 0u});
  EXPECT_EQ(two.mode_count(), 2u);
  EXPECT_EQ(two.amplitude_at({2u, 0u}), cplx(1.0));
  EXPECT_EQ(two.amplitude_at({0u, 2u}), cplx(0.0));
}

TEST(FockBasis, EntryAboveCutoffIsRejected) {
  EXPECT_EQ(kind_of([] { fock_basis({3u}, 2); }), ErrorKind::cutoff);
}

TEST(FockBasis, ModeCapIsResourceError) {
  EXPECT_EQ(kind_of([] { vacuum(kMaxModes + 1); }), ErrorKind::resource);
}

TEST(SparseState, UnnormalizedTermsAreRejected) {
  EXPECT_EQ(kind_of([] {
              SparseState::from_terms(1, 2, {{OccupationVector{0u}, cplx(1.0)},
                                             {OccupationVector{2u}, cplx(1.0)}});
            }),
            ErrorKind::normalization);
}

TEST(SparseState, DuplicateLabelsAreMergedAndTinyAmplitudesPruned) {
  const double h = 1.0 / std::sqrt(2.0);
  const SparseState s = SparseState::from_terms(
      1, 3,
      {{OccupationVector{1u}, cplx(0.5 * h)},
       {OccupationVector{0u}, cplx(h)},
       {OccupationVector{1u}, cplx(0.5 * h)},
       {OccupationVector{3u}, cplx(1e-17)}});
  EXPECT_EQ(s.support_size(), 2u);
  EXPECT_NEAR(std::abs(s.amplitude_at({1u})), h, 1e-15);
  EXPECT_EQ(s.amplitude_at({3u}), cplx(0.0));
}

TEST(CoherentMode, ZeroAmplitudeIsVacuum) {
  const CoherentMode c = coherent_mode(0.0);
  EXPECT_EQ(c.truncation.tail_mass, 0.0);
  EXPECT_EQ(c.truncation.cutoff_used, 0u);
  EXPECT_EQ(c.state.amplitude_at({0u}), cplx(1.0));
}

TEST(CoherentMode, UnitAmplitudeMatchesPoissonAmplitudes) {
  const CoherentMode c = coherent_mode(1.0, 1e-12);
  EXPECT_LE(c.truncation.tail_mass, 1e-12);
  double factorial = 1.0;
  for (unsigned n = 0; n <= c.truncation.cutoff_used; ++n) {
    if (n > 0) factorial *= n;
    const double expected = std::exp(-0.5) / std::sqrt(factorial);
    EXPECT_NEAR(c.state.amplitude_at({n}).real(), expected, 1e-12) << "n=" << n;
  }
  const auto m = number_moments(c.state, 0, 0);
  EXPECT_NEAR(m.mean_i, 1.0, 1e-10);
}

TEST(CoherentMode, LargeAmplitudeMean) {
  const CoherentMode c = coherent_mode(4.0, 1e-12);
  const auto m = number_moments(c.state, 0, 0);
  EXPECT_NEAR(m.mean_i, 16.0, 1e-8);
  EXPECT_NEAR(m.cov, 16.0, 1e-8);
}

TEST(CoherentMode, CutoffIsTheSmallestMeetingEpsilon) {
  for (double a : {0.5, 1.0, 2.0, 3.0}) {
    const double eps = 1e-10;
    const CoherentMode c = coherent_mode(a, eps);
    const double x = a * a;
    // Independent Poisson tail mass beyond a given cutoff.
    auto tail = [&](unsigned cut) {
      double head = 0.0;
      double p = std::exp(-x);
      for (unsigned n = 0; n <= cut; ++n) {
        if (n > 0) p *= x / n;
        head += p;
      }
      return 1.0 - head;
    };
    EXPECT_LE(tail(c.truncation.cutoff_used), eps * (1 + 1e-3));
    EXPECT_GT(tail(c.truncation.cutoff_used - 1), eps);
  }
}

TEST(CoherentMode, ComplexAmplitudeCarriesPhase) {
  const cplx alpha = std::polar(1.5, 0.7);
  const CoherentMode c = coherent_mode(alpha);
  const cplx a1 = c.state.amplitude_at({1u});
  const cplx a0 = c.state.amplitude_at({0u});
  EXPECT_NEAR(std::abs(a1 / a0 - alpha), 0.0, 1e-12);
  const auto m = number_moments(c.state, 0, 0);
  EXPECT_NEAR(m.mean_i, 2.25, 1e-9);
}

TEST(CoherentMode, RejectsBadEpsilonAndHugeAmplitude) {
  EXPECT_EQ(kind_of([] { coherent_mode(1.0, 0.0); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { coherent_mode(1.0, 1.0); }), ErrorKind::invalid_argument);
  EXPECT_EQ(kind_of([] { coherent_mode(100.0); }), ErrorKind::resource);
}

TEST(Superpose, OrthogonalTermsShareWeight) {
  const SparseState a = fock_basis({2u, 0u});
  const SparseState b = fock_basis({0u, 2u});
  const Superposition s = superpose({{1.0, a}, {1.0, b}});
  EXPECT_NEAR(s.norm, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.state.amplitude_at({2u, 0u}).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.state.amplitude_at({0u, 2u}).real(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Superpose, CatNormalizationMatchesVacuumOverlap) {
  const CoherentMode c = coherent_mode(1.0);
  const SparseState vac = vacuum(1);
  const Superposition s = superpose({{1.0, c.state}, {1.0, vac}});
  const double expected = 2.0 + 2.0 * oracle::vacuum_overlap(1.0);
  EXPECT_NEAR(s.norm * s.norm, expected, 1e-11);
  EXPECT_NEAR(s.state.norm_squared(), 1.0, 1e-12);
}

TEST(Superpose, CancellingTermsAreDegenerate) {
  const SparseState psi = coherent_mode(0.8).state;
  EXPECT_EQ(kind_of([&] { superpose({{1.0, psi}, {-1.0, psi}}); }),
            ErrorKind::degenerate_superposition);
}

TEST(Superpose, ModeMismatchIsRejected) {
  const SparseState a = vacuum(1);
  const SparseState b = vacuum(2);
  EXPECT_EQ(kind_of([&] { superpose({{1.0, a}, {1.0, b}}); }),
            ErrorKind::mode_mismatch);
}

TEST(Tensor, ConcatenatesOccupations) {
  const SparseState s = tensor(fock_basis({1u}), fock_basis({0u}));
  EXPECT_EQ(s.mode_count(), 2u);
  EXPECT_EQ(s.amplitude_at({1u, 0u}), cplx(1.0));
}

TEST(Tensor, ProductOfTwoTermStates) {
  const SparseState two = fock_basis({2u});
  const SparseState zero = fock_basis({0u}, 2);
  const SparseState half = superpose({{1.0, two}, {1.0, zero}}).state;
  const SparseState s = tensor(half, half);
  ASSERT_EQ(s.support_size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(s.amplitude(k).real(), 0.5, 1e-15);
}

TEST(Tensor, MeanPhotonNumberIsAdditive) {
  const SparseState c = coherent_mode(1.0).state;
  const std::vector<SparseState> four(4, c);
  const SparseState s = tensor(four);
  EXPECT_NEAR(mean_total_photons(s), 4.0, 1e-8);

  std::mt19937_64 rng(11);
  const SparseState a = oracle::random_state(rng, 2, 3).to_sparse();
  const SparseState b = oracle::random_state(rng, 1, 4).to_sparse();
  EXPECT_NEAR(mean_total_photons(tensor(a, b)),
              mean_total_photons(a) + mean_total_photons(b), 1e-10);
}

TEST(Tensor, SupportCapIsResourceError) {
  std::vector<SparseState::Term> terms;
  for (unsigned n = 0; n < 100; ++n) terms.emplace_back(OccupationVector{n}, cplx(0.1));
  const SparseState flat = SparseState::from_terms(1, 99, terms);
  const std::vector<SparseState> four(4, flat);
  EXPECT_EQ(kind_of([&] { tensor(four); }), ErrorKind::resource);
}

TEST(Overlap, BasisStates) {
  EXPECT_EQ(overlap(fock_basis({2u, 0u}), fock_basis({2u, 0u})), cplx(1.0));
  EXPECT_EQ(overlap(fock_basis({2u, 0u}), fock_basis({0u, 2u})), cplx(0.0));
}

TEST(Overlap, VacuumWithCoherent) {
  const cplx o = overlap(vacuum(1), coherent_mode(1.0).state);
  EXPECT_NEAR(o.real(), std::exp(-0.5), 1e-10);
  EXPECT_NEAR(o.imag(), 0.0, 1e-15);
}

TEST(Overlap, ConjugateSymmetryOnRandomStates) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseState a = oracle::random_state(rng, 3, 3).to_sparse();
    const SparseState b = oracle::random_state(rng, 3, 3).to_sparse();
    const cplx ab = overlap(a, b);
    const cplx ba = overlap(b, a);
    EXPECT_NEAR(std::abs(ab - std::conj(ba)), 0.0, 1e-15);
  }
  EXPECT_EQ(kind_of([] { overlap(vacuum(1), vacuum(2)); }), ErrorKind::mode_mismatch);
}

TEST(NumberMoments, CoherentIsPoissonian) {
  const auto m = number_moments(coherent_mode(2.0).state, 0, 0);
  EXPECT_NEAR(m.mean_i, 4.0, 1e-9);
  EXPECT_NEAR(m.cov, 4.0, 1e-9);
}

TEST(NumberMoments, NoonPairIsAnticorrelated) {
  const SparseState a = fock_basis({2u, 0u});
  const SparseState b = fock_basis({0u, 2u});
  const SparseState noon = superpose({{1.0, a}, {1.0, b}}).state;
  const auto m = number_moments(noon, 0, 1);
  EXPECT_NEAR(m.mean_i, 1.0, 1e-15);
  EXPECT_NEAR(m.mean_j, 1.0, 1e-15);
  EXPECT_NEAR(m.product_mean, 0.0, 1e-15);
  EXPECT_NEAR(m.cov, -1.0, 1e-15);
}

TEST(NumberMoments, NumberEigenstateHasNoVariance) {
  EXPECT_EQ(number_moments(fock_basis({2u}), 0, 0).cov, 0.0);
  EXPECT_EQ(kind_of([] { number_moments(fock_basis({2u}), 0, 1); }),
            ErrorKind::index_out_of_range);
}

TEST(NumberMoments, MatchDenseOracleAndAreHermitian) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t modes = 1 + trial % 4;
    const oracle::DenseState dense = oracle::random_state(rng, modes, 3);
    const SparseState s = dense.to_sparse();
    const auto f = oracle::qfim(dense, oracle::unit_generators(modes));
    const NumberStatistics stats = number_statistics(s);
    for (std::size_t i = 0; i < modes; ++i) {
      for (std::size_t j = 0; j < modes; ++j) {
        const auto mij = number_moments(s, i, j);
        const auto mji = number_moments(s, j, i);
        EXPECT_EQ(mij.cov, mji.cov);
        EXPECT_NEAR(4.0 * mij.cov, f[i][j], 1e-12);
        EXPECT_NEAR(stats.covariance(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(j)),
                    mij.cov, 1e-13);
      }
    }
  }
}

TEST(ApplyPhase, ZeroPhaseIsIdentity) {
  std::mt19937_64 rng(3);
  const SparseState s = oracle::random_state(rng, 2, 3).to_sparse();
  const SparseState t = apply_phase(s, {0.0, 0.0});
  ASSERT_EQ(t.support_size(), s.support_size());
  for (std::size_t k = 0; k < s.support_size(); ++k) EXPECT_EQ(t.amplitude(k), s.amplitude(k));
}

TEST(ApplyPhase, PiOnOnePhoton) {
  const SparseState t = apply_phase(fock_basis({1u, 0u}), {std::numbers::pi, 0.0});
  EXPECT_NEAR(t.amplitude_at({1u, 0u}).real(), -1.0, 1e-15);
  EXPECT_NEAR(t.amplitude_at({1u, 0u}).imag(), 0.0, 1e-15);
}

TEST(ApplyPhase, PreservesNormAndMoments) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseState s = oracle::random_state(rng, 3, 4).to_sparse();
    const std::vector<double> theta{angle(rng), angle(rng), angle(rng)};
    const SparseState t = apply_phase(s, theta);
    EXPECT_NEAR(t.norm_squared(), s.norm_squared(), 1e-14);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        const auto a = number_moments(s, i, j);
        const auto b = number_moments(t, i, j);
        EXPECT_NEAR(a.mean_i, b.mean_i, 1e-12);
        EXPECT_NEAR(a.product_mean, b.product_mean, 1e-12);
        EXPECT_NEAR(a.cov, b.cov, 1e-12);
      }
    }
  }
  EXPECT_EQ(kind_of([] { apply_phase(vacuum(2), {0.1}); }), ErrorKind::mode_mismatch);
}

TEST(Normalization, ConstructorsProduceUnitNorm) {
  EXPECT_NEAR(coherent_mode(3.0, 1e-6).state.norm_squared(), 1.0, 1e-12);
  EXPECT_NEAR(coherent_mode(std::polar(2.0, 1.0)).state.norm_squared(), 1.0, 1e-12);
  const SparseState c = coherent_mode(1.2).state;
  EXPECT_NEAR(tensor(c, c).norm_squared(), 1.0, 1e-12);
  const SparseState vac = vacuum(1);
  EXPECT_NEAR(superpose({{2.0, c}, {cplx(0, 1), vac}}).state.norm_squared(), 1.0, 1e-12);
}

TEST(Marginal, ProductStateMarginalIsFactorDistribution) {
  const SparseState c = coherent_mode(1.0).state;
  const SparseState s = tensor(c, fock_basis({1u}));
  const auto p = marginal_distribution(s, 0);
  for (unsigned n = 0; n < p.size(); ++n) {
    EXPECT_NEAR(p[n], std::norm(c.amplitude_at({n})), 1e-15);
  }
  const auto q = marginal_distribution(s, 1);
  EXPECT_NEAR(q[1], 1.0, 1e-12);
}

}  // namespace
}  // namespace qmetro
