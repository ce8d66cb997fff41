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

#include "dpmark/attacks.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "dpmark/errors.hpp"
#include "dpmark/fingerprint.hpp"
#include "dpmark/keyed_prng.hpp"
#include "dpmark/utility.hpp"

namespace dpmark {

RelationalDatabase random_flipping(const RelationalDatabase& db, int K,
                                   double gamma, std::uint64_t rng_seed) {
  if (gamma < 0.0 || gamma > 1.0) throw config_error("gamma must lie in [0,1]");
  db.validate();
  RelationalDatabase out = db;
  std::mt19937_64 rng(rng_seed);
  for (auto& rec : out.records) {
    for (std::size_t t = 0; t < out.domains.size(); ++t) {
      const int kt = eligible_bits(out.domains[t], K);
      for (int k = 1; k <= kt; ++k) {
        if (unit_uniform(rng) >= gamma) continue;
        const int fresh = static_cast<int>(rng() & 1u);
        rec.entries[t] = (rec.entries[t] & ~(1 << (k - 1))) | (fresh << (k - 1));
      }
    }
  }
  postprocess_domain(out);
  return out;
}

RelationalDatabase subset_attack(const RelationalDatabase& db, double gamma_sub,
                                 std::uint64_t rng_seed) {
  if (gamma_sub < 0.0 || gamma_sub > 1.0)
    throw config_error("gamma_sub must lie in [0,1]");
  db.validate();
  RelationalDatabase out;
  out.domains = db.domains;
  out.label_column = db.label_column;
  std::mt19937_64 rng(rng_seed);
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    if (unit_uniform(rng) >= gamma_sub) continue;
    out.records.push_back(db.records[i]);
    if (db.label_column) out.labels.push_back(db.labels[i]);
  }
  return out;
}

namespace {

// (t, value) pairs whose discrepancy reaches tau simultaneously across all
// other attributes and all their values.
std::vector<std::vector<char>> qualified_values(const RelationalDatabase& db,
                                                const PairwiseJoints& reference,
                                                double tau) {
  const Distributions observed = empirical_distributions(db);
  const int T = static_cast<int>(db.domains.size());
  std::vector<std::vector<char>> qualified(T);
  for (int t = 0; t < T; ++t) {
    qualified[t].assign(db.domains[t].size(), 1);
    for (int pi = 0; pi < db.domains[t].size(); ++pi) {
      bool all = true;
      for (int z = 0; z < T && all; ++z) {
        if (z == t) continue;
        auto ref_it = reference.find({t, z});
        if (ref_it == reference.end())
          throw config_error("correlation attack: missing reference joint for attribute pair");
        for (int om = 0; om < db.domains[z].size(); ++om) {
          const double obs = observed.joint(t, z, pi, om);
          auto cell = ref_it->second.find({pi, om});
          const double ref = cell == ref_it->second.end() ? 0.0 : cell->second;
          if (std::fabs(obs - ref) < tau) {
            all = false;
            break;
          }
        }
      }
      qualified[t][pi] = all ? 1 : 0;
    }
  }
  return qualified;
}

}  // namespace

RelationalDatabase correlation_attack(const RelationalDatabase& db,
                                      const PairwiseJoints& reference,
                                      double tau, int K, std::uint64_t rng_seed) {
  if (tau < 0.0) throw config_error("tau must be non-negative");
  db.validate();
  const auto qualified = qualified_values(db, reference, tau);
  RelationalDatabase out = db;
  std::mt19937_64 rng(rng_seed);
  for (auto& rec : out.records) {
    for (std::size_t t = 0; t < out.domains.size(); ++t) {
      if (!qualified[t][rec.entries[t]]) continue;
      const int kt = eligible_bits(out.domains[t], K);
      for (int k = 1; k <= kt; ++k)
        if (rng() & 1u) rec.entries[t] ^= 1 << (k - 1);
    }
  }
  postprocess_domain(out);
  return out;
}

double correlation_qualified_fraction(const RelationalDatabase& db,
                                      const PairwiseJoints& reference,
                                      double tau) {
  db.validate();
  if (db.records.empty()) return 0.0;
  const auto qualified = qualified_values(db, reference, tau);
  std::size_t n = 0;
  for (const auto& rec : db.records)
    for (std::size_t t = 0; t < db.domains.size(); ++t)
      n += qualified[t][rec.entries[t]];
  return static_cast<double>(n) /
         (static_cast<double>(db.records.size()) * db.domains.size());
}

}  // namespace dpmark
