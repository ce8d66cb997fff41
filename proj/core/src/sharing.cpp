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

#include "dpmark/sharing.hpp"

#include <cmath>

#include "dpmark/errors.hpp"
#include "dpmark/fingerprint.hpp"
#include "dpmark/utility.hpp"

namespace dpmark {

namespace {
constexpr double kHalfPlusInvSqrt12 = 0.5 + 0.28867513459481288;  // 1/2 + 1/sqrt(12)
}

void SvtConfig::validate() const {
  if (gamma_threshold < 0.0) throw config_error("density threshold must be non-negative");
  if (!(eps_insert > 0.0)) throw config_error("insertion budget must be positive");
  if (!(eps2 > 0.0) || !(eps3 > 0.0))
    throw config_error("comparison budgets eps2 and eps3 must be positive");
  if (delta < 1) throw config_error("sensitivity must be at least 1");
  if (max_recipients < 1) throw config_error("need at least one recipient");
  if (!(delta_prime > 0.0 && delta_prime < 1.0))
    throw config_error("delta' must lie in (0, 1)");
  if (trial_cap < 1) throw config_error("trial cap must be positive");
}

double default_gamma(int delta, double p, std::uint64_t n_rows, int K) {
  if (delta < 1 || K < 1) throw config_error("delta and K must be positive");
  if (p < 0.0 || p >= 0.5) throw config_error("flip probability must lie in [0, 0.5)");
  return kHalfPlusInvSqrt12 * delta * p * static_cast<double>(n_rows) * K;
}

double default_gamma_nt(int delta, double p, std::uint64_t n_rows, int n_attrs) {
  if (delta < 1 || n_attrs < 1) throw config_error("delta and T must be positive");
  if (p < 0.0 || p >= 0.5) throw config_error("flip probability must lie in [0, 0.5)");
  return kHalfPlusInvSqrt12 * delta * p * static_cast<double>(n_rows) * n_attrs;
}

RecipientShare determine_internal_id(const RelationalDatabase& db, int c,
                                     const SvtConfig& config,
                                     const SecretKey& key,
                                     std::mt19937_64& noise_rng) {
  config.validate();
  if (c < 1) throw config_error("recipient sequence numbers start at 1");
  db.validate();

  const auto params =
      FingerprintParams::from_epsilon(config.eps_insert, config.delta);
  const double mu_scale = static_cast<double>(config.delta) / config.eps2;
  const double rho_scale = static_cast<double>(config.delta) / config.eps3;

  RecipientShare share;
  share.sequence_c = c;
  for (std::uint64_t i = 1; i <= config.trial_cap; ++i) {
    TrialRecord trial;
    trial.trial_i = static_cast<int>(i);
    trial.internal_id_hex = internal_id(key, static_cast<std::uint32_t>(c),
                                        static_cast<std::uint32_t>(i));
    auto outcome = insert_fingerprint(db, params, key, trial.internal_id_hex);
    postprocess_domain(outcome.db);
    trial.density = fingerprint_density(db, outcome.db);
    trial.mu = LaplaceSampler::from_uniform(unit_uniform(noise_rng), mu_scale);
    trial.rho = LaplaceSampler::from_uniform(unit_uniform(noise_rng), rho_scale);
    trial.passed = trial.density + trial.mu >= config.gamma_threshold + trial.rho;
    share.trials.push_back(trial);
    if (trial.passed) {
      share.final_internal_id = trial.internal_id_hex;
      share.released = std::move(outcome.db);
      return share;
    }
  }
  throw config_error(
      "above-threshold search did not terminate within " +
      std::to_string(config.trial_cap) +
      " candidates; the density threshold is likely set above reach");
}

SharingLedger share_multi(const RelationalDatabase& db, const SvtConfig& config,
                          const SecretKey& key, std::uint64_t noise_seed) {
  config.validate();
  std::mt19937_64 noise_rng(noise_seed);
  SharingLedger ledger;
  ledger.recipients.reserve(config.max_recipients);
  for (int c = 1; c <= config.max_recipients; ++c)
    ledger.recipients.push_back(
        determine_internal_id(db, c, config, key, noise_rng));
  return ledger;
}

std::pair<double, double> advanced_composition(double eps, double delta, int C,
                                               double delta_prime) {
  if (eps < 0.0 || delta < 0.0 || C < 0)
    throw config_error("composition inputs must be non-negative");
  if (!(delta_prime > 0.0 && delta_prime < 1.0))
    throw config_error("delta' must lie in (0, 1)");
  const double c = static_cast<double>(C);
  const double eps_total = std::sqrt(2.0 * c * std::log(1.0 / delta_prime)) * eps +
                           c * eps * std::expm1(eps);
  return {eps_total, c * delta + delta_prime};
}

namespace {

// Left-hand side of the comparison-budget equation; strictly increasing in x
// for x > 0 because C x e^x dominates the (possibly negative) linear term.
double budget_lhs(double x, double root_term, double C) {
  return (root_term - C) * x + C * x * std::exp(x);
}

}  // namespace

double solve_budget(double eps0, double delta_prime, int C, double eps) {
  if (!(eps0 > 0.0)) throw config_error("target budget must be positive");
  if (!(delta_prime > 0.0 && delta_prime < 1.0))
    throw config_error("delta' must lie in (0, 1)");
  if (C < 1) throw config_error("need at least one release");
  if (eps < 0.0) throw config_error("insertion budget must be non-negative");

  const double c = static_cast<double>(C);
  const double root_term = std::sqrt(2.0 * c * std::log(1.0 / delta_prime));
  const double rhs = eps0 - root_term * eps - c * eps * std::expm1(eps);
  if (rhs <= 0.0) {
    // Find the largest insertion budget that leaves room for the comparison
    // noise, i.e. the root of root_term*e + C*e*(e^e - 1) = eps0.
    double lo = 0.0, hi = eps0;
    while (root_term * hi + c * hi * std::expm1(hi) < eps0) hi *= 2.0;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (root_term * mid + c * mid * std::expm1(mid) < eps0) lo = mid;
      else hi = mid;
    }
    throw budget_infeasible_error(
        "insertion budget consumes the entire target; largest feasible "
        "per-release epsilon is " + std::to_string(0.5 * (lo + hi)),
        0.5 * (lo + hi));
  }

  double lo = 0.0, hi = 1.0;
  while (budget_lhs(hi, root_term, c) < rhs) hi *= 2.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-12; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (budget_lhs(mid, root_term, c) < rhs) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> release_privacy(int C, double eps, double eps2,
                                          double eps3, double delta_prime) {
  if (C < 0 || eps < 0.0 || eps2 < 0.0 || eps3 < 0.0)
    throw config_error("privacy inputs must be non-negative");
  if (!(delta_prime > 0.0 && delta_prime < 1.0))
    throw config_error("delta' must lie in (0, 1)");
  const double c = static_cast<double>(C);
  const double x = eps2 + eps3;
  const double eps_total =
      std::sqrt(2.0 * c * std::log(1.0 / delta_prime)) * (eps + x) +
      c * (eps * std::expm1(eps) + x * std::expm1(x));
  return {eps_total, 2.0 * delta_prime};
}

std::pair<double, double> release_privacy(const SharingLedger& ledger,
                                          const SvtConfig& config) {
  return release_privacy(static_cast<int>(ledger.recipients.size()),
                         config.eps_insert, config.eps2, config.eps3,
                         config.delta_prime);
}

}  // namespace dpmark
