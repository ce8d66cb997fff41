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

#include "synthetic.hpp"

#include <random>
#include <string>

namespace dpmark::testing {

SecretKey test_key(char tag) {
  std::vector<std::uint8_t> bytes(32);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = static_cast<std::uint8_t>(tag + 31 * i);
  return SecretKey::from_bytes(std::move(bytes));
}

std::vector<int> reference_sizes() { return {3, 5, 4, 4, 3, 2, 3, 3}; }

std::vector<AttributeDomain> make_domains(const std::vector<int>& sizes) {
  std::vector<AttributeDomain> domains;
  domains.reserve(sizes.size());
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    AttributeDomain dom;
    dom.name = "a" + std::to_string(t);
    for (int v = 0; v < sizes[t]; ++v)
      dom.values.push_back("v" + std::to_string(v));
    domains.push_back(std::move(dom));
  }
  return domains;
}

RelationalDatabase full_factorial_db(const std::vector<int>& sizes) {
  RelationalDatabase db;
  db.domains = make_domains(sizes);
  std::size_t n = 1;
  for (int s : sizes) n *= static_cast<std::size_t>(s);
  db.records.reserve(n);
  std::vector<int> current(sizes.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    Record rec;
    rec.primary_key = "r" + std::to_string(i + 1);
    rec.entries = current;
    db.records.push_back(std::move(rec));
    for (std::size_t t = sizes.size(); t-- > 0;) {
      if (++current[t] < sizes[t]) break;
      current[t] = 0;
    }
  }
  return db;
}

RelationalDatabase uniform_random_db(const std::vector<int>& sizes,
                                     std::size_t n, std::uint64_t seed) {
  RelationalDatabase db;
  db.domains = make_domains(sizes);
  std::mt19937_64 rng(seed);
  db.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Record rec;
    rec.primary_key = "r" + std::to_string(i + 1);
    rec.entries.reserve(sizes.size());
    for (int s : sizes)
      rec.entries.push_back(
          static_cast<int>(rng() % static_cast<std::uint64_t>(s)));
    db.records.push_back(std::move(rec));
  }
  return db;
}

RelationalDatabase geometric_db(const std::vector<int>& sizes, std::size_t n,
                                double ratio, std::uint64_t seed) {
  RelationalDatabase db;
  db.domains = make_domains(sizes);
  std::mt19937_64 rng(seed);

  // Per-attribute cumulative weights of ratio^v.
  std::vector<std::vector<double>> cumulative(sizes.size());
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    double weight = 1.0, total = 0.0;
    for (int v = 0; v < sizes[t]; ++v) {
      total += weight;
      cumulative[t].push_back(total);
      weight *= ratio;
    }
    for (double& c : cumulative[t]) c /= total;
  }

  db.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Record rec;
    rec.primary_key = "r" + std::to_string(i + 1);
    rec.entries.reserve(sizes.size());
    for (std::size_t t = 0; t < sizes.size(); ++t) {
      const double u = unit_uniform(rng);
      int v = 0;
      while (v + 1 < sizes[t] && u >= cumulative[t][v]) ++v;
      rec.entries.push_back(v);
    }
    db.records.push_back(std::move(rec));
  }
  return db;
}

Schema schema_for(const RelationalDatabase& db) {
  Schema schema;
  schema.attributes = db.domains;
  schema.primary_key = "id";
  if (db.label_column) schema.label = db.label_column;
  return schema;
}

}  // namespace dpmark::testing
