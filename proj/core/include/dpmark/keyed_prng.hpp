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
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace dpmark {

// Owner secret. Never serialized into any artifact this toolkit produces;
// the io layer has no code path that writes it, and tests grep artifacts to
// prove it.
struct SecretKey {
  std::vector<std::uint8_t> bytes;

  static SecretKey from_bytes(std::vector<std::uint8_t> b);  // enforces >= 16
  static SecretKey from_file(const std::string& path);
  // Reads the named environment variable (value used verbatim as bytes).
  static SecretKey from_env(const char* var_name);
};

// Ordered byte-string components serialized with a 4-byte big-endian length
// prefix per component, so distinct tuples can never collide under plain
// concatenation (e.g. ("ab","c") vs ("a","bc")).
struct Seed {
  std::vector<std::vector<std::uint8_t>> components;

  std::vector<std::uint8_t> serialize() const;

  // The per-position seed {key | primary_key | t | k}. Attribute index t and
  // bit index k are 1-based, serialized as 4-byte big-endian; k = 1 is the
  // least significant bit.
  static Seed for_position(const SecretKey& key, std::string_view primary_key,
                           std::uint32_t t, std::uint32_t k);
};

// The keyed pseudorandom sequence U: U_j(s) is the first 8 bytes, read
// big-endian, of HMAC-SHA256(key, serialize(s) || byte(j)). The one-byte
// domain-separation tag keeps the j-streams independent.
std::uint64_t prs_value(const SecretKey& key, const Seed& seed, std::uint8_t j);

// Same function with a cached MAC context. Construction pays the HMAC key
// schedule once; value() then costs a single digest pass. The hot loops in
// insertion and extraction use this path; prs_value is the reference form
// and tests assert the two agree bit-for-bit.
//
// Not safe for concurrent use from multiple threads; create one per thread.
class KeyedPrs {
 public:
  explicit KeyedPrs(const SecretKey& key);
  ~KeyedPrs();
  KeyedPrs(KeyedPrs&&) noexcept;
  KeyedPrs& operator=(KeyedPrs&&) noexcept;
  KeyedPrs(const KeyedPrs&) = delete;
  KeyedPrs& operator=(const KeyedPrs&) = delete;

  std::uint64_t value(const Seed& seed, std::uint8_t j) const;

  // Allocation-free variant for the per-position seed layout.
  std::uint64_t position_value(std::string_view primary_key, std::uint32_t t,
                               std::uint32_t k, std::uint8_t j) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct FingerprintBits {
  std::vector<std::uint8_t> bits;  // each 0 or 1

  int length() const { return static_cast<int>(bits.size()); }
  int hamming_distance(const FingerprintBits& other) const;
};

// Recipient fingerprint f = MD5(key | internal_id), truncated to the first L
// bits (L <= 128; bit l is bit 7-l%8 of digest byte l/8, i.e. MSB first).
// Components are length-prefixed like Seed.
FingerprintBits gen_fingerprint(const SecretKey& key, std::string_view internal_id,
                                int L = 128);

// Owner-private recipient identifier for sequence number c, trial i:
// lowercase hex of MD5(key | c | i) with c and i as 4-byte big-endian.
// Returned as a printable string so it round-trips through JSON artifacts.
std::string internal_id(const SecretKey& key, std::uint32_t c, std::uint32_t i);

// Zero-mean Laplace noise via inverse CDF on one uniform draw per sample.
class LaplaceSampler {
 public:
  // Throws config_error when scale <= 0.
  LaplaceSampler(double scale, std::uint64_t rng_seed);

  double draw();
  std::vector<double> draw_n(std::size_t n);

  // Inverse-CDF transform used by draw(); exposed for reuse where the
  // caller owns the engine (the sharing loop threads one engine through
  // all trials).
  static double from_uniform(double unit_uniform, double scale);

  double scale() const { return scale_; }

 private:
  double scale_;
  std::mt19937_64 rng_;
};

// Uniform in [0,1) from the top 53 bits of one engine output; keeps noise
// streams identical across platforms (std::uniform_real_distribution is not
// pinned by the standard).
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dpmark
