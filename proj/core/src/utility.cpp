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

#include "dpmark/utility.hpp"

#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "dpmark/errors.hpp"
#include "dpmark/fingerprint.hpp"

namespace dpmark {

namespace {

// Index shared rows by key and require the exact same key set.
std::vector<std::size_t> align_by_key(const RelationalDatabase& original,
                                      const RelationalDatabase& shared) {
  if (original.records.size() != shared.records.size())
    throw integrity_error("databases hold different record counts");
  std::unordered_map<std::string_view, std::size_t> pos;
  pos.reserve(shared.records.size());
  for (std::size_t j = 0; j < shared.records.size(); ++j)
    pos.emplace(shared.records[j].primary_key, j);
  std::vector<std::size_t> map;
  map.reserve(original.records.size());
  for (const auto& rec : original.records) {
    auto it = pos.find(rec.primary_key);
    if (it == pos.end())
      throw integrity_error("key '" + rec.primary_key + "' missing from shared copy");
    map.push_back(it->second);
  }
  return map;
}

}  // namespace

Distributions empirical_distributions(const RelationalDatabase& db) {
  db.validate();
  if (db.records.empty()) throw config_error("empirical distributions need a non-empty database");
  const int T = static_cast<int>(db.domains.size());
  const double n = static_cast<double>(db.records.size());

  Distributions d;
  d.domain_sizes.reserve(T);
  for (const auto& dom : db.domains) d.domain_sizes.push_back(dom.size());

  d.marginals.assign(T, {});
  for (int t = 0; t < T; ++t) d.marginals[t].assign(d.domain_sizes[t], 0.0);
  d.joint_tables.assign(T, std::vector<std::vector<double>>(T));
  for (int t = 0; t < T; ++t)
    for (int z = 0; z < T; ++z)
      if (z != t)
        d.joint_tables[t][z].assign(
            static_cast<std::size_t>(d.domain_sizes[t]) * d.domain_sizes[z], 0.0);

  for (const auto& rec : db.records) {
    for (int t = 0; t < T; ++t) {
      d.marginals[t][rec.entries[t]] += 1.0;
      for (int z = 0; z < T; ++z) {
        if (z == t) continue;
        d.joint_tables[t][z][static_cast<std::size_t>(rec.entries[t]) *
                                 d.domain_sizes[z] + rec.entries[z]] += 1.0;
      }
    }
  }
  for (int t = 0; t < T; ++t) {
    for (auto& v : d.marginals[t]) v /= n;
    for (int z = 0; z < T; ++z)
      if (z != t)
        for (auto& v : d.joint_tables[t][z]) v /= n;
  }
  return d;
}

std::vector<double> variance_change(const RelationalDatabase& original,
                                    const RelationalDatabase& shared) {
  original.validate();
  shared.validate();
  const auto map = align_by_key(original, shared);
  const int T = static_cast<int>(original.domains.size());
  const double n = static_cast<double>(original.records.size());
  if (n == 0) throw config_error("variance change needs records");

  std::vector<double> deltas(T, 0.0);
  for (int t = 0; t < T; ++t) {
    double so = 0, so2 = 0, ss = 0, ss2 = 0;
    for (std::size_t i = 0; i < original.records.size(); ++i) {
      const double vo = original.records[i].entries[t];
      const double vs = shared.records[map[i]].entries[t];
      so += vo; so2 += vo * vo;
      ss += vs; ss2 += vs * vs;
    }
    const double var_o = so2 / n - (so / n) * (so / n);
    const double var_s = ss2 / n - (ss / n) * (ss / n);
    deltas[t] = var_s - var_o;
  }
  return deltas;
}

namespace {

std::unordered_set<std::string> query_result(const RelationalDatabase& db,
                                             const QuerySpec& query) {
  std::vector<std::pair<std::size_t, int>> preds;
  preds.reserve(query.predicates.size());
  for (const auto& [attr, label] : query.predicates) {
    std::size_t t = db.domains.size();
    for (std::size_t j = 0; j < db.domains.size(); ++j)
      if (db.domains[j].name == attr) { t = j; break; }
    if (t == db.domains.size())
      throw schema_error("query references unknown attribute '" + attr + "'");
    int code = -1;
    for (int c = 0; c < db.domains[t].size(); ++c)
      if (db.domains[t].values[c] == label) { code = c; break; }
    if (code < 0)
      throw schema_error("query references unknown label '" + label + "'");
    preds.emplace_back(t, code);
  }
  std::unordered_set<std::string> keys;
  for (const auto& rec : db.records) {
    bool all = true;
    for (const auto& [t, code] : preds)
      if (rec.entries[t] != code) { all = false; break; }
    if (all) keys.insert(rec.primary_key);
  }
  return keys;
}

}  // namespace

double query_accuracy(const RelationalDatabase& original,
                      const RelationalDatabase& shared, const QuerySpec& query) {
  const auto orig_keys = query_result(original, query);
  const auto shared_keys = query_result(shared, query);
  if (orig_keys.empty()) return shared_keys.empty() ? 1.0 : 0.0;
  std::size_t hit = 0;
  for (const auto& k : shared_keys) hit += orig_keys.count(k);
  return static_cast<double>(hit) / static_cast<double>(orig_keys.size());
}

double fingerprint_density(const RelationalDatabase& original,
                           const RelationalDatabase& shared) {
  original.validate();
  shared.validate();
  const auto map = align_by_key(original, shared);
  double density = 0.0;
  for (std::size_t i = 0; i < original.records.size(); ++i) {
    const auto& a = original.records[i].entries;
    const auto& b = shared.records[map[i]].entries;
    for (std::size_t t = 0; t < a.size(); ++t)
      density += std::fabs(static_cast<double>(a[t]) - static_cast<double>(b[t]));
  }
  return density;
}

double changed_entry_fraction(const RelationalDatabase& db, double epsilon,
                              int delta, const SecretKey& key,
                              const std::string& recipient_internal_id) {
  const auto params = FingerprintParams::from_epsilon(epsilon, delta);
  auto outcome = insert_fingerprint(db, params, key, recipient_internal_id);
  postprocess_domain(outcome.db);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < db.records.size(); ++i)
    for (std::size_t t = 0; t < db.domains.size(); ++t)
      changed += db.records[i].entries[t] != outcome.db.records[i].entries[t];
  const std::size_t total = db.records.size() * db.domains.size();
  return total == 0 ? 0.0 : static_cast<double>(changed) / static_cast<double>(total);
}

RelationalDatabase two_stage_baseline(const RelationalDatabase& db, double epsilon,
                                      const SecretKey& key,
                                      const std::string& recipient_internal_id,
                                      std::uint64_t rr_seed,
                                      std::optional<double> lambda) {
  if (!(epsilon > 0.0)) throw config_error("epsilon must be positive");
  db.validate();

  // Stage 1: per-attribute k-ary randomized response.
  RelationalDatabase perturbed = db;
  std::mt19937_64 rng(rr_seed);
  const double e_eps = std::exp(epsilon);
  for (auto& rec : perturbed.records) {
    for (std::size_t t = 0; t < perturbed.domains.size(); ++t) {
      const int size = perturbed.domains[t].size();
      if (size < 2) continue;
      const double keep = e_eps / (e_eps + size - 1);
      if (unit_uniform(rng) < keep) continue;
      // Uniform among the other size-1 values.
      int draw = static_cast<int>(rng() % static_cast<std::uint64_t>(size - 1));
      if (draw >= rec.entries[t]) ++draw;
      rec.entries[t] = draw;
    }
  }

  // Stage 2: conventional marking at the matched rate.
  const double rate = lambda ? *lambda
                             : changed_entry_fraction(db, epsilon, 1, key,
                                                      recipient_internal_id);
  if (!(rate > 0.0))
    return perturbed;  // degenerate pairing: nothing to mark
  const auto params = FingerprintParams::from_marking_rate(rate, 1);
  auto outcome = insert_fingerprint(perturbed, params, key, recipient_internal_id);
  postprocess_domain(outcome.db);
  return outcome.db;
}

}  // namespace dpmark
