// Copyright 2026 The dpmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dpmark/keyed_prng.hpp"
#include "dpmark/schema.hpp"

namespace dpmark {

// Parameters for the above-threshold search that picks each recipient's
// internal id: a copy is released only once its marking density clears a
// noisy threshold, so the count of rejected candidates leaks little.
struct SvtConfig {
  double gamma_threshold = 0.0;  // density threshold the noisy comparison uses
  double eps_insert = 0.5;       // budget spent by each candidate insertion
  double eps2 = 0.0;             // budget of the density-side noise mu
  double eps3 = 0.0;             // budget of the threshold-side noise rho
  int delta = 1;                 // entry sensitivity, scales both noise draws
  int max_recipients = 1;        // C, how many copies may be released
  double delta_prime = 1e-3;     // slack delta' of the composition bound
  std::uint64_t trial_cap = 10000;  // safety cap per recipient

  void validate() const;
};

// One candidate id evaluated by the noisy comparison.
struct TrialRecord {
  int trial_i = 0;               // 1-based candidate counter for this recipient
  std::string internal_id_hex;   // candidate id derived from (key, c, i)
  double density = 0.0;          // (1,1)-norm distance of the candidate copy
  double mu = 0.0;               // Laplace(delta/eps2) draw added to density
  double rho = 0.0;              // Laplace(delta/eps3) draw added to threshold
  bool passed = false;           // density + mu >= gamma + rho
};

// Outcome for one recipient: the full trial transcript and the copy released
// for the single passing trial.
struct RecipientShare {
  int sequence_c = 0;
  std::vector<TrialRecord> trials;
  std::string final_internal_id;
  RelationalDatabase released;
};

struct SharingLedger {
  std::vector<RecipientShare> recipients;

  std::size_t total_trials() const {
    std::size_t n = 0;
    for (const auto& r : recipients) n += r.trials.size();
    return n;
  }
};

// Default density threshold (1/2 + 1/sqrt(12)) * delta * p * N * K, i.e. the
// mean plus one standard deviation of a uniform model of per-entry change,
// scaled by row count and marked-bit count.
double default_gamma(int delta, double p, std::uint64_t n_rows, int K);

// Variant that scales by the attribute count T instead of the per-attribute
// bit count K, matching the all-marked-entries view of the density bound.
double default_gamma_nt(int delta, double p, std::uint64_t n_rows, int n_attrs);

// Runs the above-threshold loop for recipient c: derive candidate id i,
// insert a fingerprint with eps_insert, measure the density of the clamped
// copy against the original, and accept once density + mu >= gamma + rho.
// The caller threads one noise engine through all recipients so draws are
// sequential and reproducible; per trial the order is mu then rho.
RecipientShare determine_internal_id(const RelationalDatabase& db, int c,
                                     const SvtConfig& config,
                                     const SecretKey& key,
                                     std::mt19937_64& noise_rng);

// Releases max_recipients copies by running the loop for c = 1..C with a
// single seeded noise engine.
SharingLedger share_multi(const RelationalDatabase& db, const SvtConfig& config,
                          const SecretKey& key, std::uint64_t noise_seed);

// C-fold adaptive composition total:
//   ( sqrt(2 C ln(1/delta')) eps + C eps (e^eps - 1), C delta + delta' ).
std::pair<double, double> advanced_composition(double eps, double delta, int C,
                                               double delta_prime);

// Solves the per-release comparison budget x = eps2 + eps3 so the full run
// meets the target eps0:
//   (sqrt(2 C ln(1/delta')) - C) x + C x e^x = eps0 - insertion share.
// Throws budget_infeasible_error (with the largest feasible eps) when the
// insertion budget alone already exceeds eps0.
double solve_budget(double eps0, double delta_prime, int C, double eps);

// Total privacy cost of a completed run:
//   eps0 = sqrt(2 C ln(1/delta')) (eps + x) + C (eps (e^eps - 1) + x (e^x - 1))
//   delta0 = 2 delta'          with x = eps2 + eps3.
std::pair<double, double> release_privacy(int C, double eps, double eps2,
                                          double eps3, double delta_prime);

// Convenience overload reading C and the budgets from the config.
std::pair<double, double> release_privacy(const SharingLedger& ledger,
                                          const SvtConfig& config);

}  // namespace dpmark
