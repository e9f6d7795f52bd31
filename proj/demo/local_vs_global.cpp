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

// Prints per-phase bounds of entangled probes next to mode-separable ones
// that use the same photon budget.

#include <cmath>
#include <cstdio>

#include "qmetro/qmetro.hpp"

int main() {
  using namespace qmetro;

  std::printf("parallel interferometers, equal mean photon number\n");
  std::printf("%3s %6s %12s %12s %12s\n", "d", "nu", "n_total", "gecs", "ucs");
  for (int d : {1, 2, 4}) {
    FamilySpec gecs{.family = Family::gecs, .d = d, .alpha = 4.0};
    const FamilyAnalytics g = family_analytics(gecs);
    for (double nu : {1.0, crossover_nu(d), 2.0 * crossover_nu(d)}) {
      FamilySpec ucs{.family = Family::ucs, .d = d, .alpha = 1.0, .nu = nu};
      ucs = match_mean_photon(ucs, g.n_total);
      const FamilyAnalytics u = family_analytics(ucs);
      std::printf("%3d %6.3f %12.6f %12.6g %12.6g\n", d, nu, g.n_total,
                  g.bound_exact, u.bound_exact);
    }
  }

  std::printf("\nimaging, N = 4 photons per state\n");
  std::printf("%3s %12s %12s\n", "d", "gns(auto)", "uno");
  for (int d : {1, 2, 4, 8}) {
    FamilySpec gns{.family = Family::gns, .d = d,
                   .gamma = GammaChoice::automatic(), .n_photons = 4};
    const double nu = std::sqrt(d + std::sqrt(static_cast<double>(d)) - 1.0);
    FamilySpec uno{.family = Family::uno, .d = d, .nu = nu, .n_photons = 4};
    std::printf("%3d %12.6g %12.6g\n", d, family_analytics(gns).bound_exact,
                family_analytics(uno).bound_exact);
  }
  return 0;
}
