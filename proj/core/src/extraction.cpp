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

#include "dpmark/extraction.hpp"

#include <unordered_map>

#include "dpmark/errors.hpp"

namespace dpmark {

ExtractionResult extract_fingerprint(const RelationalDatabase& original,
                                     const RelationalDatabase& leaked,
                                     const FingerprintParams& params,
                                     const SecretKey& key) {
  original.validate();
  if (leaked.domains.size() != original.domains.size())
    throw integrity_error("leaked database schema width differs from original");

  std::unordered_map<std::string_view, const Record*> originals;
  originals.reserve(original.records.size());
  for (const auto& rec : original.records) originals.emplace(rec.primary_key, &rec);

  ExtractionResult res;
  res.c0.assign(params.L, 0);
  res.c1.assign(params.L, 0);

  const KeyedPrs prs(key);
  const std::uint32_t T = static_cast<std::uint32_t>(original.domains.size());
  for (const auto& leak_rec : leaked.records) {
    auto it = originals.find(leak_rec.primary_key);
    if (it == originals.end()) {
      ++res.skipped_unknown_keys;
      continue;
    }
    const Record& orig_rec = *it->second;
    for (std::uint32_t t = 0; t < T; ++t) {
      const int kt = eligible_bits(original.domains[t], params.K);
      for (int k = 1; k <= kt; ++k) {
        if (!position_selected(prs, orig_rec.primary_key, t + 1, k, params.p))
          continue;
        const std::uint8_t x = static_cast<std::uint8_t>(
            prs.position_value(orig_rec.primary_key, t + 1, k, 2) & 1u);
        const std::uint32_t l = static_cast<std::uint32_t>(
            prs.position_value(orig_rec.primary_key, t + 1, k, 3) % params.L);
        const int leak_bit = (leak_rec.entries[t] >> (k - 1)) & 1;
        const int orig_bit = (orig_rec.entries[t] >> (k - 1)) & 1;
        const std::uint8_t recovered_mark =
            static_cast<std::uint8_t>(leak_bit ^ orig_bit);
        const std::uint8_t f_l = x ^ recovered_mark;
        if (f_l) ++res.c1[l]; else ++res.c0[l];
      }
    }
  }

  res.bits.assign(params.L, -1);
  std::size_t resolved = 0;
  for (int l = 0; l < params.L; ++l) {
    if (res.c0[l] + res.c1[l] == 0) continue;
    res.bits[l] = res.c1[l] > res.c0[l] ? 1 : 0;
    ++resolved;
  }
  res.resolved_fraction = params.L > 0
      ? static_cast<double>(resolved) / static_cast<double>(params.L) : 0.0;
  return res;
}

int count_matches(const ExtractionResult& extraction, const FingerprintBits& candidate) {
  if (candidate.length() != extraction.length())
    throw config_error("candidate fingerprint length differs from extraction");
  int matches = 0;
  for (int l = 0; l < extraction.length(); ++l)
    matches += extraction.bits[l] >= 0 && extraction.bits[l] == candidate.bits[l];
  return matches;
}

int match_threshold_D(std::uint64_t C, int L) {
  if (C < 1 || L < 1) throw config_error("need C >= 1 recipients and L >= 1 bits");
  const int floor_d = (L + 1) / 2 + 1;  // strictly more than half
  // Upper tail of Binomial(L, 1/2) via the term recurrence; long double keeps
  // ~18 significant digits, far below the 1/C decision margins.
  long double term = std::ldexp(1.0L, -L);  // C(L,L) / 2^L
  long double tail = term;
  int d = L;
  int smallest = L + 1;
  if (tail <= 1.0L / static_cast<long double>(C)) smallest = L;
  while (d > (L + 1) / 2) {
    term = term * static_cast<long double>(d) / static_cast<long double>(L - d + 1);
    --d;
    tail += term;
    if (tail <= 1.0L / static_cast<long double>(C)) smallest = d;
  }
  return smallest > floor_d ? smallest : floor_d;
}

AccusationVerdict detect_traitor(
    const ExtractionResult& extraction,
    const std::vector<std::pair<std::string, FingerprintBits>>& candidates,
    int D) {
  AccusationVerdict verdict;
  verdict.threshold_D = D;
  int best = -1;
  int best_count = 0;  // how many candidates share the maximum
  std::string best_id;
  for (const auto& [id, bits] : candidates) {
    const int m = count_matches(extraction, bits);
    verdict.matches[id] = m;
    if (m > best) {
      best = m;
      best_count = 1;
      best_id = id;
    } else if (m == best) {
      ++best_count;
    }
  }
  if (best >= D && best_count == 1) verdict.accused = best_id;
  return verdict;
}

}  // namespace dpmark
