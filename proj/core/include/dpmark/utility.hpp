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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpmark/keyed_prng.hpp"
#include "dpmark/schema.hpp"

namespace dpmark {

// Conjunctive equality query over category labels; the result set is the set
// of matching primary keys.
struct QuerySpec {
  std::vector<std::pair<std::string, std::string>> predicates;  // (attribute, label)
};

// Empirical marginals and pairwise joint frequency tables of one database.
struct Distributions {
  // marginals[t][v] = P(attribute t = v)
  std::vector<std::vector<double>> marginals;
  // joints[t][z] flattened by pi * |domain_z| + omega, for t != z
  std::vector<std::vector<std::vector<double>>> joint_tables;
  std::vector<int> domain_sizes;

  double joint(int t, int z, int pi, int omega) const {
    return joint_tables[t][z][static_cast<std::size_t>(pi) * domain_sizes[z] + omega];
  }
};

Distributions empirical_distributions(const RelationalDatabase& db);

// Population-variance delta per attribute: Var(shared_t) - Var(original_t)
// over integer codes. Both inputs must hold exactly the same key set.
std::vector<double> variance_change(const RelationalDatabase& original,
                                    const RelationalDatabase& shared);

// |result(shared) ∩ result(original)| / |result(original)|. Empty original
// result: 1.0 when the shared result is empty too, else 0.0.
double query_accuracy(const RelationalDatabase& original,
                      const RelationalDatabase& shared, const QuerySpec& query);

// (1,1)-norm of the entrywise difference, aligned by primary key.
double fingerprint_density(const RelationalDatabase& original,
                           const RelationalDatabase& shared);

// Local-DP perturbation followed by fingerprinting, the utility comparison
// target. Stage one applies per-attribute k-ary randomized response (keep a
// value with probability e^eps/(e^eps + k - 1), otherwise replace it with a
// uniform draw among the other k-1 values). Stage two reuses the insertion
// engine at a direct marking rate lambda; when lambda is not supplied it is
// matched to our mechanism's own changed-entry fraction on this database at
// the same epsilon, which is the pairing the comparison is defined by.
RelationalDatabase two_stage_baseline(const RelationalDatabase& db, double epsilon,
                                      const SecretKey& key,
                                      const std::string& recipient_internal_id,
                                      std::uint64_t rr_seed,
                                      std::optional<double> lambda = {});

// Changed-entry fraction of our mechanism at this epsilon (after domain
// post-processing); the two-stage lambda pairing above uses it.
double changed_entry_fraction(const RelationalDatabase& db, double epsilon,
                              int delta, const SecretKey& key,
                              const std::string& recipient_internal_id);

}  // namespace dpmark
