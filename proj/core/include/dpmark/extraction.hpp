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

#include "dpmark/fingerprint.hpp"

namespace dpmark {

// Majority-vote reconstruction of the embedded fingerprint. Bit l is
// unresolved (-1) when no surviving position voted for index l; unresolved
// bits count as non-matches during accusation.
struct ExtractionResult {
  std::vector<std::uint64_t> c0;  // votes for 0, per index
  std::vector<std::uint64_t> c1;  // votes for 1, per index
  std::vector<std::int8_t> bits;  // 0, 1, or -1 for unresolved
  double resolved_fraction = 0.0;
  std::size_t skipped_unknown_keys = 0;  // leaked rows with no original match

  int length() const { return static_cast<int>(bits.size()); }
};

// Replays the insertion pass's selection over the rows present in the leak
// (matched to originals by primary key; missing rows simply contribute no
// votes) and tallies recovered fingerprint bits. Ties resolve to 0.
ExtractionResult extract_fingerprint(const RelationalDatabase& original,
                                     const RelationalDatabase& leaked,
                                     const FingerprintParams& params,
                                     const SecretKey& key);

// Number of positions where the extraction agrees with a candidate
// fingerprint; unresolved positions never match.
int count_matches(const ExtractionResult& extraction, const FingerprintBits& candidate);

// Smallest D in [ceil(L/2), L] whose innocent-by-chance probability
// (exact Binomial(L, 1/2) upper tail) is at most 1/C, floored at
// ceil(L/2) + 1 so an accusation always needs strictly more than half the
// bits. The result can exceed L, in which case no accusation is possible at
// this (L, C); callers see that as detect never accusing.
int match_threshold_D(std::uint64_t C, int L);

struct AccusationVerdict {
  std::map<std::string, int> matches;   // external id -> match count
  std::optional<std::string> accused;   // unique maximum above threshold
  int threshold_D = 0;
};

// Accuses the unique candidate with the maximal match count when that count
// reaches D; a tie at the top or nobody reaching D yields no accusation.
AccusationVerdict detect_traitor(
    const ExtractionResult& extraction,
    const std::vector<std::pair<std::string, FingerprintBits>>& candidates,
    int D);

}  // namespace dpmark
