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

#include "dpmark/keyed_prng.hpp"

// The hot path uses the non-EVP SHA-256 interface: its context is a plain
// struct whose copy is a memcpy, which makes caching the HMAC pad states
// practical. OpenSSL 3 marks that interface deprecated but keeps shipping it.
#define OPENSSL_SUPPRESS_DEPRECATED 1

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "dpmark/errors.hpp"

namespace dpmark {

namespace {

constexpr std::size_t kMinKeyBytes = 16;

void append_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void append_component(std::vector<std::uint8_t>& out, const std::uint8_t* data,
                      std::size_t len) {
  append_u32be(out, static_cast<std::uint32_t>(len));
  out.insert(out.end(), data, data + len);
}

std::uint64_t read_u64be(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

std::vector<std::uint8_t> md5_of(const std::vector<std::uint8_t>& message) {
  std::vector<std::uint8_t> digest(16);
  unsigned int len = 0;
  if (EVP_Digest(message.data(), message.size(), digest.data(), &len,
                 EVP_md5(), nullptr) != 1 ||
      len != 16)
    throw std::runtime_error("MD5 digest failed");
  return digest;
}

}  // namespace

SecretKey SecretKey::from_bytes(std::vector<std::uint8_t> b) {
  if (b.size() < kMinKeyBytes)
    throw config_error("secret key must be at least " +
                       std::to_string(kMinKeyBytes) + " bytes");
  return SecretKey{std::move(b)};
}

SecretKey SecretKey::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read key file: " + path);
  std::vector<std::uint8_t> b((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
  // A trailing newline from `echo > keyfile` would silently change every
  // derived value; strip one.
  while (!b.empty() && (b.back() == '\n' || b.back() == '\r')) b.pop_back();
  return from_bytes(std::move(b));
}

SecretKey SecretKey::from_env(const char* var_name) {
  const char* v = std::getenv(var_name);
  if (v == nullptr || *v == '\0')
    throw config_error(std::string("environment variable ") + var_name +
                       " is not set");
  return from_bytes(std::vector<std::uint8_t>(v, v + std::strlen(v)));
}

std::vector<std::uint8_t> Seed::serialize() const {
  std::vector<std::uint8_t> out;
  std::size_t total = 0;
  for (const auto& c : components) total += 4 + c.size();
  out.reserve(total);
  for (const auto& c : components) append_component(out, c.data(), c.size());
  return out;
}

Seed Seed::for_position(const SecretKey& key, std::string_view primary_key,
                        std::uint32_t t, std::uint32_t k) {
  Seed s;
  s.components.reserve(4);
  s.components.push_back(key.bytes);
  s.components.emplace_back(primary_key.begin(), primary_key.end());
  std::vector<std::uint8_t> tb, kb;
  append_u32be(tb, t);
  append_u32be(kb, k);
  s.components.push_back(std::move(tb));
  s.components.push_back(std::move(kb));
  return s;
}

struct KeyedPrs::Impl {
  // HMAC(k, m) = H(k ^ opad || H(k ^ ipad || m)). Hashing each pad block
  // once at construction and copying the saved states per call leaves one
  // message pass and one 32-byte pass per value; the key schedule is never
  // repeated. Plain-struct contexts make the copies trivial.
  SHA256_CTX inner0, outer0;
  std::vector<std::uint8_t> key_component;  // length-prefixed key, reused
  mutable std::vector<std::uint8_t> buf;    // message scratch

  explicit Impl(const SecretKey& key) {
    std::uint8_t block[SHA256_CBLOCK] = {0};
    if (key.bytes.size() <= sizeof(block)) {
      std::memcpy(block, key.bytes.data(), key.bytes.size());
    } else if (SHA256(key.bytes.data(), key.bytes.size(), block) == nullptr) {
      throw std::runtime_error("SHA256 of long key failed");
    }
    std::uint8_t ipad[SHA256_CBLOCK], opad[SHA256_CBLOCK];
    for (std::size_t i = 0; i < sizeof(block); ++i) {
      ipad[i] = block[i] ^ 0x36;
      opad[i] = block[i] ^ 0x5c;
    }
    if (SHA256_Init(&inner0) != 1 ||
        SHA256_Update(&inner0, ipad, sizeof(ipad)) != 1 ||
        SHA256_Init(&outer0) != 1 ||
        SHA256_Update(&outer0, opad, sizeof(opad)) != 1)
      throw std::runtime_error("HMAC pad state setup failed");
    append_component(key_component, key.bytes.data(), key.bytes.size());
  }

  std::uint64_t mac_first8(const std::uint8_t* msg, std::size_t len) const {
    SHA256_CTX c = inner0;
    std::uint8_t digest[SHA256_DIGEST_LENGTH];
    if (SHA256_Update(&c, msg, len) != 1 || SHA256_Final(digest, &c) != 1)
      throw std::runtime_error("HMAC inner pass failed");
    c = outer0;
    std::uint8_t out[SHA256_DIGEST_LENGTH];
    if (SHA256_Update(&c, digest, sizeof(digest)) != 1 ||
        SHA256_Final(out, &c) != 1)
      throw std::runtime_error("HMAC outer pass failed");
    return read_u64be(out);
  }
};

KeyedPrs::KeyedPrs(const SecretKey& key) : impl_(std::make_unique<Impl>(key)) {}
KeyedPrs::~KeyedPrs() = default;
KeyedPrs::KeyedPrs(KeyedPrs&&) noexcept = default;
KeyedPrs& KeyedPrs::operator=(KeyedPrs&&) noexcept = default;

std::uint64_t KeyedPrs::value(const Seed& seed, std::uint8_t j) const {
  auto msg = seed.serialize();
  msg.push_back(j);
  return impl_->mac_first8(msg.data(), msg.size());
}

std::uint64_t KeyedPrs::position_value(std::string_view primary_key,
                                       std::uint32_t t, std::uint32_t k,
                                       std::uint8_t j) const {
  auto& buf = impl_->buf;
  buf.clear();
  buf.insert(buf.end(), impl_->key_component.begin(), impl_->key_component.end());
  append_component(buf, reinterpret_cast<const std::uint8_t*>(primary_key.data()),
                   primary_key.size());
  append_u32be(buf, 4);
  append_u32be(buf, t);
  append_u32be(buf, 4);
  append_u32be(buf, k);
  buf.push_back(j);
  return impl_->mac_first8(buf.data(), buf.size());
}

std::uint64_t prs_value(const SecretKey& key, const Seed& seed, std::uint8_t j) {
  KeyedPrs prs(key);
  return prs.value(seed, j);
}

int FingerprintBits::hamming_distance(const FingerprintBits& other) const {
  if (bits.size() != other.bits.size())
    throw config_error("fingerprint length mismatch");
  int d = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) d += bits[i] != other.bits[i];
  return d;
}

FingerprintBits gen_fingerprint(const SecretKey& key, std::string_view internal_id,
                                int L) {
  if (L < 1 || L > 128)
    throw config_error("fingerprint length must be in [1,128]");
  std::vector<std::uint8_t> msg;
  append_component(msg, key.bytes.data(), key.bytes.size());
  append_component(msg, reinterpret_cast<const std::uint8_t*>(internal_id.data()),
                   internal_id.size());
  const auto digest = md5_of(msg);
  FingerprintBits f;
  f.bits.reserve(L);
  for (int l = 0; l < L; ++l)
    f.bits.push_back((digest[l / 8] >> (7 - l % 8)) & 1);
  return f;
}

std::string internal_id(const SecretKey& key, std::uint32_t c, std::uint32_t i) {
  if (c < 1 || i < 1)
    throw config_error("internal id indices are 1-based positive integers");
  std::vector<std::uint8_t> msg;
  append_component(msg, key.bytes.data(), key.bytes.size());
  std::vector<std::uint8_t> cb, ib;
  append_u32be(cb, c);
  append_u32be(ib, i);
  append_component(msg, cb.data(), cb.size());
  append_component(msg, ib.data(), ib.size());
  const auto digest = md5_of(msg);
  static const char* hexdigits = "0123456789abcdef";
  std::string hex;
  hex.reserve(32);
  for (std::uint8_t b : digest) {
    hex.push_back(hexdigits[b >> 4]);
    hex.push_back(hexdigits[b & 0xF]);
  }
  return hex;
}

LaplaceSampler::LaplaceSampler(double scale, std::uint64_t rng_seed)
    : scale_(scale), rng_(rng_seed) {
  if (!(scale > 0.0)) throw config_error("Laplace scale must be positive");
}

double LaplaceSampler::from_uniform(double u, double scale) {
  // Inverse CDF: x = -b * sgn(u - 1/2) * ln(1 - 2|u - 1/2|).
  const double c = u - 0.5;
  const double s = (c > 0.0) - (c < 0.0);
  return -scale * s * std::log(1.0 - 2.0 * std::fabs(c));
}

double LaplaceSampler::draw() { return from_uniform(unit_uniform(rng_), scale_); }

std::vector<double> LaplaceSampler::draw_n(std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw());
  return out;
}

}  // namespace dpmark
