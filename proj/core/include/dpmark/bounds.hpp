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
#include <vector>

namespace dpmark {

// Closed interval [lower, upper].
struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x) const { return lower <= x && x <= upper; }
  double width() const { return upper - lower; }
};

// Ceiling on any adversary's confidence that a fingerprinted entry held a
// particular value, given prior odds psi between the two candidate values:
// psi*e^eps / (psi*e^eps + 1).
double infcap_bound(double psi, double epsilon);

// Range of the expected absolute perturbation of one processed entry.
Interval expected_error_bound(int delta, double p);

// Range of the expected (1,1)-norm between the original table and a marked
// copy with N rows and T attributes.
Interval density_bound(int delta, double p, std::uint64_t n_rows, int n_attrs);

// Post-marking joint probability P~(t=pi, z=omega) given the pre-marking
// joint value and the extreme joint probabilities of the same pair table:
//   lower = joint*(1-p)^(2K) + pr_min*(1-(1-p)^K)^2, upper uses pr_max.
Interval joint_bounds(double p, int K, double joint, double pr_min, double pr_max);

// Post-marking marginal probability; same algebraic shape as joint_bounds
// applied to the marginal value and the extreme marginals of the attribute.
Interval marginal_bounds(double p, int K, double marginal, double pr_min,
                         double pr_max);

// Probability that a subset attack (each row kept independently with
// probability gamma_sub) still leaves the owner with a usable leak: either
// some non-fingerprinted row was dropped, or every row carries a mark.
double p_rbst_sub(double p, int L, int K, int T, std::uint64_t n_rows,
                  double gamma_sub);

enum class PrbstMode {
  exact_tiny,   // full marginalization; requires N*K*T <= 20 and L <= 4
  monte_carlo,  // seeded simulation of mark -> corrupt -> recover
};

// Probability that at least D fingerprint bits are recovered correctly after
// a bit-flipping attack that corrupts each leaked mark with probability
// gamma_rnd. The exact mode sums over the mark count, the assignment of
// marks to fingerprint indices, and the per-index majority outcomes; the
// Monte Carlo mode replays the abstract mark/corrupt/recover process.
double p_rbst_rnd(double p, double gamma_rnd, std::uint64_t n_rows, int K,
                  int T, int L, int D, PrbstMode mode,
                  std::uint64_t mc_seed = 1, std::uint64_t mc_trials = 100000);

// Per-pair ingredients for the correlation-confidence model: the joint
// probabilities P(t=pi, z=omega) for every omega of one companion attribute
// z, plus the extreme values of the full (t, z) joint table.
struct PairJointStats {
  std::vector<double> joint_by_omega;
  double pr_min = 0.0;
  double pr_max = 0.0;
};

// Two printed forms of the perturbation magnitude A (B replaces pr_min with
// pr_max). They differ in one factor; both are kept and the caller picks.
enum class GainVariant {
  appendix,   // A = joint*((1-p)^(2K)+1)*(-(1-(1-p)^K)) + pr_min*(1-(1-p)^K)^2
  main_text,  // A = joint*((1-p)^(2K)-1)                + pr_min*(1-(1-p)^K)^2
};

// Expected confidence gain of a correlation attacker that flags the target
// value pi whenever some perturbed joint moved by more than tau:
//   G = [1 - prod_{z,omega} min(1, tau / max(|A|,|B|))] / [(1-(1-p)^K) * P(pi)]
// under the flat-density model for the perturbation magnitude.
double confidence_gain(double p, int K, double tau,
                       const std::vector<PairJointStats>& pairs,
                       double marginal_pi,
                       GainVariant variant = GainVariant::appendix);

}  // namespace dpmark
