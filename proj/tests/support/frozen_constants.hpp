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

#include <array>

// Values frozen from independent evaluations (closed forms worked by hand or
// re-derived in a separate environment) before the library code existed.
// Tests compare the implementation against these, never the other way round.
namespace dpmark::frozen {

// p = 1/(e^eps + 1) at K = 1, eps = 1..7.
inline constexpr std::array<double, 7> kFlipProbByEpsilon = {
    0.26894142, 0.11920292, 0.04742587, 0.01798621,
    0.00669285, 0.00247262, 0.00091105};

// Accusation thresholds D: smallest d with exact Binomial(L, 1/2) upper tail
// <= 1/C, floored at ceil(L/2) + 1.
struct ThresholdCase {
  unsigned long long C;
  int L;
  int D;
};
inline constexpr std::array<ThresholdCase, 7> kThresholdCases = {{
    {1ULL, 128, 65},
    {10ULL, 128, 72},
    {100ULL, 128, 78},
    {1000000ULL, 128, 92},
    {1ULL, 16, 9},
    {100ULL, 16, 14},
    {2ULL, 2, 2},
}};
// L = 1 admits no accusation: the floor pushes D to 2 > L.
inline constexpr int kThresholdL1 = 2;

// sqrt(2 * 100 * ln 1000).
inline constexpr double kRootTerm100 = 37.169221888498384;

// Comparison-budget equation at the printed parameter set
// (eps0=40, delta'=1e-3, C=100, eps=0.5): right-hand side and the largest
// per-release epsilon that would have been feasible.
inline constexpr double kBudgetRhsPrinted = -11.020674479255604;
inline constexpr double kMaxFeasibleEpsPrinted = 0.4357891804621663;

// Forward release-privacy total at (C=100, eps=0.5, eps2+eps3=0.002,
// delta'=1e-3) — what the printed parameter set actually costs.
inline constexpr double kForwardTotalPrinted = 51.0954133232994;

// Feasible solver cases: x = eps2+eps3 such that the run meets eps0.
inline constexpr double kSolvedX_40_100_03 = 0.26950453944733266;  // eps=0.3
inline constexpr double kSolvedX_20_10_05 = 0.5632073697542357;    // eps=0.5

// Advanced composition spot values (delta = 0):
// sqrt(2 C ln(1/d')) eps + C eps (e^eps - 1).
inline constexpr double kCompose_01_100 = 4.768631369606316;   // eps=.1 C=100 d'=1e-3
inline constexpr double kCompose_025_50 = 12.032993239115658;  // eps=.25 C=50 d'=1e-5

// Correlation-confidence hand check at p=0.25, K=1, joint 0.2, pr_min 0.1,
// pr_max 0.3, tau 0.02, marginal 0.4 (single pair, single omega).
inline constexpr double kGainAppendixA = -0.071875;
inline constexpr double kGainAppendixB = -0.059375;
inline constexpr double kGainAppendixValue = 166.0 / 23.0;  // 7.21739130...
inline constexpr double kGainMainA = -0.08125;
inline constexpr double kGainMainB = -0.06875;
inline constexpr double kGainMainValue = 98.0 / 13.0;  // 7.53846153...

// (1/2 + 1/sqrt(12)) * 1 * 0.25 * 1000 * 1.
inline constexpr double kDefaultGammaExample = 197.16878364870322;

// The mixed-width reference schema used across robustness and utility tests:
// eight categorical attributes, full factorial size 12960.
inline constexpr std::array<int, 8> kNurserySizes = {3, 5, 4, 4, 3, 2, 3, 3};

// Fraction of single-low-bit changes on the reference schema that survive
// domain clamping under uniform values: avg_t (1 - [s_t odd]/s_t) = 97/120.
inline constexpr double kNurseryClampSurvival = 97.0 / 120.0;

}  // namespace dpmark::frozen
