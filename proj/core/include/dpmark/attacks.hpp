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
#include <map>
#include <utility>
#include <vector>

#include "dpmark/schema.hpp"

namespace dpmark {

enum class AttackKind { random_flipping, subset, correlation };

struct AttackConfig {
  AttackKind kind = AttackKind::random_flipping;
  double gamma_rnd = 0.0;   // per-bit randomization rate
  double gamma_sub = 1.0;   // per-row keep probability
  double tau = 1.0;         // correlation discrepancy threshold
  std::uint64_t rng_seed = 0;
};

// Attacks each of the last min(K, K_t) bits of every entry: with probability
// gamma the bit is replaced by a fresh uniform bit (so a touched bit actually
// flips half the time, and the net per-bit flip rate is gamma/2). Entries are
// clamped back into their domains afterwards — a rational attacker releases a
// plausible database. Keys, labels and schema are untouched.
//
// Randomization rather than deterministic inversion is what keeps gamma = 1
// from being trivially invertible by the extractor's majority vote.
RelationalDatabase random_flipping(const RelationalDatabase& db, int K,
                                   double gamma, std::uint64_t rng_seed);

// Keeps each row independently with probability gamma_sub; kept rows are
// byte-identical to the input.
RelationalDatabase subset_attack(const RelationalDatabase& db, double gamma_sub,
                                 std::uint64_t rng_seed);

// Pairwise joint frequency tables, indexed by attribute pair (t, z), then by
// value pair (pi, omega). The utility module produces these from a database;
// the correlation attacker consumes them as side knowledge.
using PairwiseJoints =
    std::map<std::pair<int, int>, std::map<std::pair<int, int>, double>>;

// For every entry whose (attribute t, value pi) shows an empirical joint
// discrepancy of at least tau against the reference for *all* other
// attributes z and *all* their values omega, flips each of the entry's last
// min(K, K_t) bits with probability 1/2, then clamps. tau = 0 therefore
// randomizes every entry and a tau above the largest discrepancy is the
// identity.
RelationalDatabase correlation_attack(const RelationalDatabase& db,
                                      const PairwiseJoints& reference,
                                      double tau, int K, std::uint64_t rng_seed);

// The fraction of entries the correlation attack would modify at this tau;
// exposed separately so trend studies need not materialize attacked copies.
double correlation_qualified_fraction(const RelationalDatabase& db,
                                      const PairwiseJoints& reference,
                                      double tau);

}  // namespace dpmark
