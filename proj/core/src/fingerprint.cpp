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

#include "dpmark/fingerprint.hpp"

#include <cmath>

#include "dpmark/errors.hpp"

namespace dpmark {

namespace {

int bits_for_delta(int delta) {
  // K = floor(log2 delta) + 1, computed in integers.
  int k = 0;
  while (delta > 0) {
    ++k;
    delta >>= 1;
  }
  return k;
}

// Selection threshold: U_1 < floor(2p * 2^64) selects with probability 2p
// (to within one part in 2^53). p < 1/2 keeps the product below 2^64.
std::uint64_t selection_threshold(double p) {
  const long double scaled = std::ldexp(static_cast<long double>(2.0 * p), 64);
  return static_cast<std::uint64_t>(scaled);
}

}  // namespace

FingerprintParams FingerprintParams::from_epsilon(double epsilon, int delta,
                                                 int L,
                                                 std::optional<double> p_override) {
  if (!(epsilon > 0.0)) throw config_error("epsilon must be positive");
  if (delta < 1) throw config_error("delta must be a positive integer");
  if (L < 1 || L > 128) throw config_error("fingerprint length must be in [1,128]");

  FingerprintParams params;
  params.epsilon = epsilon;
  params.delta = delta;
  params.K = bits_for_delta(delta);
  params.L = L;
  const double p_min = 1.0 / (std::exp(epsilon / params.K) + 1.0);
  if (p_override) {
    if (*p_override < p_min)
      throw config_error("p below the privacy minimum for this epsilon");
    if (!(*p_override < 0.5)) throw config_error("p must be below 1/2");
    params.p = *p_override;
  } else {
    params.p = p_min;
  }
  return params;
}

FingerprintParams FingerprintParams::from_marking_rate(double p, int delta, int L) {
  if (!(p > 0.0) || !(p < 0.5))
    throw config_error("marking rate must lie in (0, 1/2)");
  if (delta < 1) throw config_error("delta must be a positive integer");
  if (L < 1 || L > 128) throw config_error("fingerprint length must be in [1,128]");
  FingerprintParams params;
  params.epsilon = 0.0;
  params.delta = delta;
  params.K = bits_for_delta(delta);
  params.p = p;
  params.L = L;
  return params;
}

std::size_t fingerprintable_count(const RelationalDatabase& db, int K) {
  std::size_t per_row = 0;
  for (const auto& d : db.domains) per_row += eligible_bits(d, K);
  return per_row * db.records.size();
}

bool position_selected(const KeyedPrs& prs, std::string_view primary_key,
                       std::uint32_t t, std::uint32_t k, double p) {
  return prs.position_value(primary_key, t, k, 1) < selection_threshold(p);
}

InsertOutcome insert_fingerprint(const RelationalDatabase& db,
                                 const FingerprintParams& params,
                                 const SecretKey& key,
                                 std::string_view recipient_internal_id) {
  db.validate();
  const FingerprintBits f = gen_fingerprint(key, recipient_internal_id, params.L);
  const KeyedPrs prs(key);
  const std::uint64_t threshold = selection_threshold(params.p);

  InsertOutcome out;
  out.db = db;
  const std::uint32_t T = static_cast<std::uint32_t>(db.domains.size());
  for (std::uint32_t i = 0; i < db.records.size(); ++i) {
    Record& rec = out.db.records[i];
    for (std::uint32_t t = 0; t < T; ++t) {
      const int kt = eligible_bits(db.domains[t], params.K);
      for (int k = 1; k <= kt; ++k) {
        if (prs.position_value(rec.primary_key, t + 1, k, 1) >= threshold)
          continue;
        const std::uint8_t x =
            static_cast<std::uint8_t>(prs.position_value(rec.primary_key, t + 1, k, 2) & 1u);
        const std::uint32_t l = static_cast<std::uint32_t>(
            prs.position_value(rec.primary_key, t + 1, k, 3) % params.L);
        const std::uint8_t b = x ^ f.bits[l];
        rec.entries[t] ^= static_cast<int>(b) << (k - 1);
        out.marks.push_back(MarkDecision{i, t, static_cast<std::uint32_t>(k),
                                         x, l, b});
      }
    }
  }
  return out;
}

std::size_t postprocess_domain(RelationalDatabase& db) {
  std::size_t clamped = 0;
  for (auto& rec : db.records) {
    for (std::size_t t = 0; t < db.domains.size(); ++t) {
      const int max_code = db.domains[t].max_code();
      int& v = rec.entries[t];
      if (v > max_code) {
        v = max_code;
        ++clamped;
      } else if (v < 0) {
        v = 0;  // cannot happen with XOR marking, kept for safety
        ++clamped;
      }
    }
  }
  return clamped;
}

}  // namespace dpmark
