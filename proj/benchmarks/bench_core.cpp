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

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dpmark/extraction.hpp"
#include "dpmark/fingerprint.hpp"
#include "dpmark/keyed_prng.hpp"
#include "dpmark/schema.hpp"

namespace {

using namespace dpmark;

SecretKey bench_key() {
  std::vector<std::uint8_t> bytes(32);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = static_cast<std::uint8_t>(0x40 + i);
  return SecretKey::from_bytes(std::move(bytes));
}

// Mixed-width synthetic table: eight attributes, domains of 2..5 codes.
RelationalDatabase uniform_db(std::size_t n) {
  const std::vector<int> sizes = {3, 5, 4, 4, 3, 2, 3, 3};
  RelationalDatabase db;
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    AttributeDomain dom;
    dom.name = "a" + std::to_string(t);
    for (int v = 0; v < sizes[t]; ++v)
      dom.values.push_back("v" + std::to_string(v));
    db.domains.push_back(std::move(dom));
  }
  std::mt19937_64 rng(2026);
  for (std::size_t i = 0; i < n; ++i) {
    Record rec;
    rec.primary_key = "r" + std::to_string(i + 1);
    for (int s : sizes)
      rec.entries.push_back(static_cast<int>(rng() % s));
    db.records.push_back(std::move(rec));
  }
  return db;
}

void BM_PrsValueReference(benchmark::State& state) {
  const SecretKey key = bench_key();
  const Seed seed = Seed::for_position(key, "r12345", 3, 2);
  std::uint8_t j = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(prs_value(key, seed, ++j));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PrsValueReference);

void BM_PositionValueCachedContext(benchmark::State& state) {
  const SecretKey key = bench_key();
  const KeyedPrs prs(key);
  std::uint32_t t = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        prs.position_value("r12345", 1 + (++t % 8), 2, 1));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PositionValueCachedContext);

void BM_GenFingerprint(benchmark::State& state) {
  const SecretKey key = bench_key();
  std::uint32_t i = 0;
  for (auto _ : state) {
    const auto f = gen_fingerprint(key, internal_id(key, 1, ++i));
    benchmark::DoNotOptimize(f.bits.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GenFingerprint);

void BM_InsertFingerprint(benchmark::State& state) {
  const SecretKey key = bench_key();
  const auto db = uniform_db(static_cast<std::size_t>(state.range(0)));
  const auto params = FingerprintParams::from_epsilon(1.0, 4);
  const std::string sp = internal_id(key, 1, 1);
  for (auto _ : state) {
    auto outcome = insert_fingerprint(db, params, key, sp);
    postprocess_domain(outcome.db);
    benchmark::DoNotOptimize(outcome.marks.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InsertFingerprint)->Arg(1000)->Arg(12960);

void BM_ExtractFingerprint(benchmark::State& state) {
  const SecretKey key = bench_key();
  const auto db = uniform_db(static_cast<std::size_t>(state.range(0)));
  const auto params = FingerprintParams::from_epsilon(1.0, 4);
  auto outcome = insert_fingerprint(db, params, key, internal_id(key, 1, 1));
  postprocess_domain(outcome.db);
  for (auto _ : state) {
    const auto result = extract_fingerprint(db, outcome.db, params, key);
    benchmark::DoNotOptimize(result.bits.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractFingerprint)->Arg(1000)->Arg(12960);

void BM_LaplaceDraw(benchmark::State& state) {
  LaplaceSampler sampler(2.0, 7);
  for (auto _ : state)
    benchmark::DoNotOptimize(sampler.draw());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LaplaceDraw);

}  // namespace

BENCHMARK_MAIN();
