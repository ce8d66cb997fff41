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

#include "dpmark/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dpmark/errors.hpp"
#include "dpmark/keyed_prng.hpp"

namespace dpmark {

double infcap_bound(double psi, double epsilon) {
  if (!(psi > 0.0)) throw config_error("prior odds must be positive");
  if (epsilon < 0.0) throw config_error("epsilon must be non-negative");
  const double a = psi * std::exp(epsilon);
  return a / (a + 1.0);
}

Interval expected_error_bound(int delta, double p) {
  if (delta < 1) throw config_error("sensitivity must be at least 1");
  if (p < 0.0 || p >= 0.5) throw config_error("flip probability must lie in [0, 0.5)");
  return Interval{0.0, static_cast<double>(delta) * p};
}

Interval density_bound(int delta, double p, std::uint64_t n_rows, int n_attrs) {
  if (n_attrs < 0) throw config_error("attribute count must be non-negative");
  const Interval per_entry = expected_error_bound(delta, p);
  return Interval{0.0, per_entry.upper * static_cast<double>(n_rows) * n_attrs};
}

Interval joint_bounds(double p, int K, double joint, double pr_min, double pr_max) {
  if (p < 0.0 || p >= 0.5) throw config_error("flip probability must lie in [0, 0.5)");
  if (K < 1) throw config_error("bit count must be at least 1");
  if (!(0.0 <= pr_min && pr_min <= joint && joint <= pr_max && pr_max <= 1.0))
    throw config_error("need 0 <= pr_min <= joint <= pr_max <= 1");
  const double keep = std::pow(1.0 - p, 2 * K);
  const double move = 1.0 - std::pow(1.0 - p, K);
  const double base = joint * keep;
  return Interval{base + pr_min * move * move, base + pr_max * move * move};
}

Interval marginal_bounds(double p, int K, double marginal, double pr_min,
                         double pr_max) {
  return joint_bounds(p, K, marginal, pr_min, pr_max);
}

double p_rbst_sub(double p, int L, int K, int T, std::uint64_t n_rows,
                  double gamma_sub) {
  if (p < 0.0 || p >= 0.5) throw config_error("flip probability must lie in [0, 0.5)");
  if (L < 1 || K < 1 || T < 1) throw config_error("L, K, T must be positive");
  if (gamma_sub < 0.0 || gamma_sub > 1.0)
    throw config_error("keep probability must lie in [0, 1]");
  // Chance that a given row carries no mark at all, then its complement.
  const double untouched = std::pow(1.0 - p / L, static_cast<double>(K) * T);
  const double marked = 1.0 - untouched;
  const double n = static_cast<double>(n_rows);
  // 1 - survivors^n + marked^n, with the leading difference evaluated as
  // -expm1(n log survivors) so a tiny marked^n is not absorbed when the
  // survivor probability rounds to one (gamma_sub at or near 1).
  const double survivors = marked + gamma_sub * untouched;
  const double head =
      survivors > 0.0 ? -std::expm1(n * std::log(survivors)) : 1.0;
  return head + std::pow(marked, n);
}

namespace {

// Chance that an index holding w leaked votes, each independently corrupted
// with probability gamma, still resolves to the true bit. A tie falls back
// to a fixed guess, which is right half the time over a uniform true bit;
// an index with no votes stays unresolved and never counts as recovered.
double majority_survival(int w, double gamma) {
  if (w == 0) return 0.0;
  double result = 0.0;
  double binom = 1.0;  // C(w, q), updated incrementally
  for (int q = 0; 2 * q <= w; ++q) {
    const double pmf =
        binom * std::pow(gamma, q) * std::pow(1.0 - gamma, w - q);
    result += (2 * q < w) ? pmf : 0.5 * pmf;
    binom *= static_cast<double>(w - q) / (q + 1.0);
  }
  return result;
}

// P(#successes >= D) for independent per-index success probabilities.
double poisson_binomial_tail(const std::vector<double>& probs, int D) {
  std::vector<double> dist(probs.size() + 1, 0.0);
  dist[0] = 1.0;
  for (double r : probs) {
    for (std::size_t k = dist.size() - 1; k > 0; --k)
      dist[k] = dist[k] * (1.0 - r) + dist[k - 1] * r;
    dist[0] *= 1.0 - r;
  }
  double tail = 0.0;
  for (std::size_t k = std::max(D, 0); k < dist.size(); ++k) tail += dist[k];
  return std::min(1.0, tail);
}

struct ExactRndAccumulator {
  double gamma;
  int L;
  int D;
  std::vector<long double> log_fact;
  double total = 0.0;

  // Recursively split m votes across the remaining indices.
  void split(int remaining, int index, long double log_coeff,
             std::vector<int>& counts) {
    if (index == L - 1) {
      counts[index] = remaining;
      finish(log_coeff - log_fact[remaining]);
      return;
    }
    for (int w = 0; w <= remaining; ++w) {
      counts[index] = w;
      split(remaining - w, index + 1, log_coeff - log_fact[w], counts);
    }
  }

  std::vector<int>* current = nullptr;
  double m_pmf = 0.0;
  int m_total = 0;

  void finish(long double log_coeff) {
    // log_coeff currently holds log(m!) - sum log(w_l!); index assignment
    // probability is L^-m.
    const double assign =
        static_cast<double>(std::exp(log_coeff - m_total * std::log((long double)L)));
    std::vector<double> probs(L);
    for (int l = 0; l < L; ++l) probs[l] = majority_survival((*current)[l], gamma);
    total += m_pmf * assign * poisson_binomial_tail(probs, D);
  }
};

}  // namespace

double p_rbst_rnd(double p, double gamma_rnd, std::uint64_t n_rows, int K,
                  int T, int L, int D, PrbstMode mode, std::uint64_t mc_seed,
                  std::uint64_t mc_trials) {
  if (p < 0.0 || p >= 0.5) throw config_error("flip probability must lie in [0, 0.5)");
  if (gamma_rnd < 0.0 || gamma_rnd > 1.0)
    throw config_error("corruption probability must lie in [0, 1]");
  if (L < 1 || K < 1 || T < 1) throw config_error("L, K, T must be positive");
  if (D < 0 || D > L) throw config_error("required bit count must lie in [0, L]");
  const std::uint64_t positions = n_rows * static_cast<std::uint64_t>(K) * T;
  const double select = 2.0 * p;  // a position casts a vote with this probability

  if (mode == PrbstMode::exact_tiny) {
    if (positions > 20 || L > 4)
      throw config_error(
          "exact mode is limited to N*K*T <= 20 and L <= 4; use monte_carlo");
    const int M = static_cast<int>(positions);
    ExactRndAccumulator acc;
    acc.gamma = gamma_rnd;
    acc.L = L;
    acc.D = D;
    acc.log_fact.resize(M + 1);
    acc.log_fact[0] = 0.0L;
    for (int i = 1; i <= M; ++i)
      acc.log_fact[i] = acc.log_fact[i - 1] + std::log((long double)i);
    std::vector<int> counts(L, 0);
    acc.current = &counts;
    for (int m = 0; m <= M; ++m) {
      // Binomial(M, 2p) mass at m votes in total.
      const long double log_binom =
          acc.log_fact[M] - acc.log_fact[m] - acc.log_fact[M - m];
      double pmf;
      if (select == 0.0) pmf = (m == 0) ? 1.0 : 0.0;
      else if (select == 1.0) pmf = (m == M) ? 1.0 : 0.0;
      else
        pmf = static_cast<double>(std::exp(
            log_binom + m * std::log((long double)select) +
            (M - m) * std::log((long double)(1.0 - select))));
      acc.m_pmf = pmf;
      acc.m_total = m;
      if (pmf > 0.0) acc.split(m, 0, acc.log_fact[m], counts);
    }
    return std::min(1.0, acc.total);
  }

  std::mt19937_64 rng(mc_seed);
  std::uint64_t successes = 0;
  std::vector<int> right(L), wrong(L);
  for (std::uint64_t trial = 0; trial < mc_trials; ++trial) {
    std::fill(right.begin(), right.end(), 0);
    std::fill(wrong.begin(), wrong.end(), 0);
    for (std::uint64_t pos = 0; pos < positions; ++pos) {
      if (unit_uniform(rng) >= select) continue;
      const int l = static_cast<int>(rng() % static_cast<std::uint64_t>(L));
      if (unit_uniform(rng) < gamma_rnd) ++wrong[l];
      else ++right[l];
    }
    int matched = 0;
    for (int l = 0; l < L; ++l) {
      if (right[l] + wrong[l] == 0) continue;  // unresolved index
      if (right[l] > wrong[l]) ++matched;
      else if (right[l] == wrong[l] && (rng() & 1)) ++matched;  // tie-break guess
    }
    if (matched >= D) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(mc_trials);
}

double confidence_gain(double p, int K, double tau,
                       const std::vector<PairJointStats>& pairs,
                       double marginal_pi, GainVariant variant) {
  if (!(p > 0.0) || p >= 0.5)
    throw config_error("gain is undefined at p = 0; p must lie in (0, 0.5)");
  if (K < 1) throw config_error("bit count must be at least 1");
  if (tau < 0.0) throw config_error("trigger threshold must be non-negative");
  if (!(marginal_pi > 0.0))
    throw config_error("gain is undefined when the target value has zero mass");

  const double keep2 = std::pow(1.0 - p, 2 * K);
  const double move = 1.0 - std::pow(1.0 - p, K);

  double product = 1.0;
  for (const auto& pair : pairs) {
    for (double joint : pair.joint_by_omega) {
      double a, b;
      if (variant == GainVariant::appendix) {
        a = joint * (keep2 + 1.0) * (-move) + pair.pr_min * move * move;
        b = joint * (keep2 + 1.0) * (-move) + pair.pr_max * move * move;
      } else {
        a = joint * (keep2 - 1.0) + pair.pr_min * move * move;
        b = joint * (keep2 - 1.0) + pair.pr_max * move * move;
      }
      const double spread = std::max(std::fabs(a), std::fabs(b));
      const double inside = spread > 0.0 ? std::min(1.0, tau / spread) : 1.0;
      product *= inside;
    }
  }
  return (1.0 - product) / (move * marginal_pi);
}

}  // namespace dpmark
