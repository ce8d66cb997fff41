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
#include <vector>

namespace dpmark {

// One categorical attribute. Category labels are encoded as consecutive
// integers 0..n-1 in declaration order; the order is part of the schema
// contract because all distances (sensitivity, pairwise diffs) depend on it.
struct AttributeDomain {
  std::string name;
  std::vector<std::string> values;

  int max_code() const { return static_cast<int>(values.size()) - 1; }
  int size() const { return static_cast<int>(values.size()); }

  // Minimal number of bits needed to represent max_code(); at least 1 even
  // for single-value domains.
  int bit_width() const;
};

struct Record {
  std::string primary_key;  // opaque; never modified by any operation
  std::vector<int> entries;
};

struct RelationalDatabase {
  std::vector<AttributeDomain> domains;
  std::vector<Record> records;
  // Optional class label column, carried through but never fingerprinted.
  std::optional<std::string> label_column;
  std::vector<std::string> labels;  // parallel to records when label_column set

  std::size_t attribute_count() const { return domains.size(); }
  std::size_t record_count() const { return records.size(); }

  // Throws schema_error / integrity_error on any violated invariant.
  void validate() const;
};

enum class SensitivityMode { global, restricted };

struct SensitivitySpec {
  int delta = 1;
  SensitivityMode mode = SensitivityMode::global;
};

// Sidecar schema description, loaded from JSON by the io layer.
struct Schema {
  std::vector<AttributeDomain> attributes;
  std::string primary_key;            // column name
  std::optional<std::string> label;   // column name
  SensitivityMode sensitivity_mode = SensitivityMode::global;
  std::optional<int> sensitivity_delta;
};

// Plain text table as read from CSV: header row plus string cells.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Maps category labels to integer codes per the schema. Throws schema_error
// for unknown labels or missing columns, integrity_error for duplicate keys.
RelationalDatabase encode_database(const RawTable& raw, const Schema& schema);

// Inverse of encode_database for in-domain databases; column order is
// primary key, attributes in schema order, then the label column if any.
RawTable decode_database(const RelationalDatabase& db, const Schema& schema);

// Global mode: delta = max over attributes of (domain size - 1).
// Restricted mode: delta = user override, validated against the global value.
SensitivitySpec compute_sensitivity(const RelationalDatabase& db,
                                    SensitivityMode mode,
                                    std::optional<int> override_delta = {});

// Returns a copy of db with entry (row, attr) set to new_value. Intended for
// privacy tests; enforces |new - old| <= delta and domain membership.
RelationalDatabase make_neighbor(const RelationalDatabase& db, std::size_t row,
                                 std::size_t attr, int new_value, int delta);

// Per label class, the distribution of |r_i[t] - r_j[t]| over all unordered
// record pairs within the class and all attributes. Classes with fewer than
// two records report {0: 1.0} by convention. Without a label column the whole
// database forms one class keyed "".
std::map<std::string, std::map<int, double>> pairwise_diff_fractions(
    const RelationalDatabase& db);

}  // namespace dpmark
