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
#include <optional>
#include <string_view>
#include <vector>

#include "dpmark/keyed_prng.hpp"
#include "dpmark/schema.hpp"

namespace dpmark {

// Parameter bundle tying the privacy condition to the insertion mechanism.
// The mechanism flips each of the K low-order bits of every entry with
// probability exactly p; epsilon-entry-level privacy holds iff
// p >= 1/(e^{eps/K}+1) with K = floor(log2 delta) + 1.
struct FingerprintParams {
  double epsilon = 1.0;
  int delta = 1;
  int K = 1;
  double p = 0.0;
  int L = 128;

  // K and the minimal p computed from (epsilon, delta). A larger p may be
  // supplied for robustness studies; smaller values are rejected because
  // they would weaken the stated guarantee.
  static FingerprintParams from_epsilon(double epsilon, int delta, int L = 128,
                                        std::optional<double> p_override = {});

  // Direct marking rate with no privacy claim attached (the comparison
  // baseline uses this). epsilon is recorded as 0.
  static FingerprintParams from_marking_rate(double p, int delta, int L = 128);
};

// The number of low bits of attribute t the mechanism may touch.
inline int eligible_bits(const AttributeDomain& domain, int K) {
  const int kt = domain.bit_width();
  return K < kt ? K : kt;
}

// One position the insertion pass decided to mark.
struct MarkDecision {
  std::uint32_t row;     // record index
  std::uint32_t attr;    // attribute index
  std::uint32_t bit_k;   // 1-based, 1 = least significant
  std::uint8_t mask_x;   // parity of U_2
  std::uint32_t index_l; // fingerprint index, U_3 mod L
  std::uint8_t mark_b;   // x xor f(index_l); entry bit is XORed with this
};

// |{(i,t,k)}| = N * sum_t min(K, K_t); the label column is not part of it.
std::size_t fingerprintable_count(const RelationalDatabase& db, int K);

struct InsertOutcome {
  RelationalDatabase db;             // marked, before domain post-processing
  std::vector<MarkDecision> marks;
};

// Embeds the fingerprint of `recipient_internal_id` into every selected
// position. Selection, mask and index are all pure functions of
// (key, primary key, t, k), so the pass is deterministic, order-independent
// and replayable by the extractor. Primary keys and labels are untouched.
//
// The output may contain codes one step outside their domain (a flipped high
// bit can exceed max_code); postprocess_domain projects them back.
InsertOutcome insert_fingerprint(const RelationalDatabase& db,
                                 const FingerprintParams& params,
                                 const SecretKey& key,
                                 std::string_view recipient_internal_id);

// Clamps every entry into [0, max_code] (nearest in-domain integer; domains
// are contiguous so there are no ties). Returns the number of entries that
// changed during clamping.
std::size_t postprocess_domain(RelationalDatabase& db);

// True iff U_1 of this position selects it at rate 2p (keyed threshold test).
bool position_selected(const KeyedPrs& prs, std::string_view primary_key,
                       std::uint32_t t, std::uint32_t k, double p);

}  // namespace dpmark
