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

#include "dpmark/schema.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

#include "dpmark/errors.hpp"

namespace dpmark {

int AttributeDomain::bit_width() const {
  int m = max_code();
  if (m <= 0) return 1;
  int w = 0;
  while (m > 0) {
    ++w;
    m >>= 1;
  }
  return w;
}

void RelationalDatabase::validate() const {
  if (domains.empty()) throw schema_error("database has no attributes");
  for (const auto& d : domains) {
    if (d.values.empty())
      throw schema_error("attribute '" + d.name + "' has an empty domain");
    std::unordered_set<std::string> seen(d.values.begin(), d.values.end());
    if (seen.size() != d.values.size())
      throw schema_error("attribute '" + d.name + "' has duplicate labels");
  }
  std::unordered_set<std::string> keys;
  keys.reserve(records.size());
  for (const auto& r : records) {
    if (!keys.insert(r.primary_key).second)
      throw integrity_error("duplicate primary key '" + r.primary_key + "'");
    if (r.entries.size() != domains.size())
      throw integrity_error("record '" + r.primary_key + "' has " +
                            std::to_string(r.entries.size()) +
                            " entries, expected " +
                            std::to_string(domains.size()));
    for (std::size_t t = 0; t < r.entries.size(); ++t) {
      if (r.entries[t] < 0 || r.entries[t] > domains[t].max_code())
        throw schema_error("record '" + r.primary_key + "' attribute '" +
                           domains[t].name + "' code out of domain");
    }
  }
  if (label_column && labels.size() != records.size())
    throw integrity_error("label column present but label count differs from record count");
}

namespace {

std::size_t find_column(const RawTable& raw, const std::string& name) {
  for (std::size_t i = 0; i < raw.header.size(); ++i)
    if (raw.header[i] == name) return i;
  throw schema_error("column '" + name + "' not found in CSV header");
}

}  // namespace

RelationalDatabase encode_database(const RawTable& raw, const Schema& schema) {
  RelationalDatabase db;
  db.domains = schema.attributes;
  db.label_column = schema.label;

  const std::size_t key_col = find_column(raw, schema.primary_key);
  std::vector<std::size_t> attr_cols;
  attr_cols.reserve(schema.attributes.size());
  std::vector<std::unordered_map<std::string, int>> codebooks;
  codebooks.reserve(schema.attributes.size());
  for (const auto& a : schema.attributes) {
    attr_cols.push_back(find_column(raw, a.name));
    std::unordered_map<std::string, int> book;
    for (int c = 0; c < static_cast<int>(a.values.size()); ++c)
      book.emplace(a.values[c], c);
    codebooks.push_back(std::move(book));
  }
  std::optional<std::size_t> label_col;
  if (schema.label) label_col = find_column(raw, *schema.label);

  db.records.reserve(raw.rows.size());
  if (label_col) db.labels.reserve(raw.rows.size());
  std::unordered_set<std::string> keys;
  keys.reserve(raw.rows.size());

  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    const auto& cells = raw.rows[i];
    if (cells.size() != raw.header.size())
      throw schema_error("row " + std::to_string(i + 1) + " has " +
                         std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(raw.header.size()));
    Record rec;
    rec.primary_key = cells[key_col];
    if (!keys.insert(rec.primary_key).second)
      throw integrity_error("duplicate key '" + rec.primary_key + "' at row " +
                            std::to_string(i + 1));
    rec.entries.reserve(schema.attributes.size());
    for (std::size_t t = 0; t < schema.attributes.size(); ++t) {
      const std::string& cell = cells[attr_cols[t]];
      auto it = codebooks[t].find(cell);
      if (it == codebooks[t].end())
        throw schema_error("unknown label '" + cell + "' for attribute '" +
                           schema.attributes[t].name + "' at row " +
                           std::to_string(i + 1));
      rec.entries.push_back(it->second);
    }
    db.records.push_back(std::move(rec));
    if (label_col) db.labels.push_back(cells[*label_col]);
  }
  db.validate();
  return db;
}

RawTable decode_database(const RelationalDatabase& db, const Schema& schema) {
  db.validate();
  RawTable raw;
  raw.header.push_back(schema.primary_key);
  for (const auto& a : db.domains) raw.header.push_back(a.name);
  if (schema.label) raw.header.push_back(*schema.label);

  raw.rows.reserve(db.records.size());
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    const auto& rec = db.records[i];
    std::vector<std::string> cells;
    cells.reserve(raw.header.size());
    cells.push_back(rec.primary_key);
    for (std::size_t t = 0; t < db.domains.size(); ++t)
      cells.push_back(db.domains[t].values.at(rec.entries[t]));
    if (schema.label) cells.push_back(db.labels.at(i));
    raw.rows.push_back(std::move(cells));
  }
  return raw;
}

SensitivitySpec compute_sensitivity(const RelationalDatabase& db,
                                    SensitivityMode mode,
                                    std::optional<int> override_delta) {
  int global = 1;
  for (const auto& d : db.domains) global = std::max(global, std::max(1, d.max_code()));

  SensitivitySpec spec;
  spec.mode = mode;
  if (mode == SensitivityMode::global) {
    spec.delta = global;
    return spec;
  }
  if (!override_delta)
    throw config_error("restricted sensitivity requires an explicit delta");
  if (*override_delta < 1)
    throw config_error("sensitivity delta must be a positive integer");
  if (*override_delta > global)
    throw config_error("sensitivity override " + std::to_string(*override_delta) +
                       " exceeds the schema-wide maximum " + std::to_string(global) +
                       "; refusing to weaken the guarantee silently");
  spec.delta = *override_delta;
  return spec;
}

RelationalDatabase make_neighbor(const RelationalDatabase& db, std::size_t row,
                                 std::size_t attr, int new_value, int delta) {
  if (row >= db.records.size() || attr >= db.domains.size())
    throw config_error("neighbor position out of range");
  const int old_value = db.records[row].entries[attr];
  if (new_value < 0 || new_value > db.domains[attr].max_code())
    throw config_error("neighbor value out of domain");
  if (std::abs(new_value - old_value) > delta)
    throw config_error("neighbor change " + std::to_string(old_value) + "->" +
                       std::to_string(new_value) + " exceeds sensitivity " +
                       std::to_string(delta));
  RelationalDatabase out = db;
  out.records[row].entries[attr] = new_value;
  return out;
}

std::map<std::string, std::map<int, double>> pairwise_diff_fractions(
    const RelationalDatabase& db) {
  db.validate();
  // Bucket record indices per class.
  std::map<std::string, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    const std::string& cls = db.label_column ? db.labels[i] : std::string();
    classes[cls].push_back(i);
  }

  std::map<std::string, std::map<int, double>> out;
  for (const auto& [cls, idx] : classes) {
    std::map<int, double>& hist = out[cls];
    if (idx.size() < 2) {
      hist[0] = 1.0;  // degenerate class: no pairs to compare
      continue;
    }
    std::uint64_t total = 0;
    std::map<int, std::uint64_t> counts;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const auto& ra = db.records[idx[a]].entries;
        const auto& rb = db.records[idx[b]].entries;
        for (std::size_t t = 0; t < db.domains.size(); ++t) {
          ++counts[std::abs(ra[t] - rb[t])];
          ++total;
        }
      }
    }
    for (const auto& [diff, n] : counts)
      hist[diff] = static_cast<double>(n) / static_cast<double>(total);
  }
  return out;
}

}  // namespace dpmark
