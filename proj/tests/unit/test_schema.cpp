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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "dpmark/errors.hpp"
#include "dpmark/schema.hpp"
#include "synthetic.hpp"

using namespace dpmark;

namespace {

RawTable small_table() {
  RawTable raw;
  raw.header = {"id", "color", "size", "cls"};
  raw.rows = {
      {"r1", "red", "small", "yes"},
      {"r2", "green", "large", "no"},
      {"r3", "blue", "medium", "yes"},
  };
  return raw;
}

Schema small_schema() {
  Schema s;
  s.primary_key = "id";
  s.attributes = {
      {"color", {"red", "green", "blue"}},
      {"size", {"small", "medium", "large"}},
  };
  s.label = "cls";
  return s;
}

}  // namespace

TEST_CASE("bit width covers the largest code") {
  CHECK(AttributeDomain{"a", {"x"}}.bit_width() == 1);
  CHECK(AttributeDomain{"a", {"x", "y"}}.bit_width() == 1);
  CHECK(AttributeDomain{"a", {"a", "b", "c"}}.bit_width() == 2);
  CHECK(AttributeDomain{"a", {"a", "b", "c", "d"}}.bit_width() == 2);
  // Five labels mean max code 4, which needs three bits.
  CHECK(AttributeDomain{"a", {"a", "b", "c", "d", "e"}}.bit_width() == 3);
  CHECK(AttributeDomain{"a", std::vector<std::string>(256, "")}.bit_width() == 8);
}

TEST_CASE("encode then decode reproduces the raw table") {
  const RawTable raw = small_table();
  const Schema schema = small_schema();
  const RelationalDatabase db = encode_database(raw, schema);

  REQUIRE(db.record_count() == 3);
  REQUIRE(db.attribute_count() == 2);
  CHECK(db.records[0].entries == std::vector<int>{0, 0});
  CHECK(db.records[1].entries == std::vector<int>{1, 2});
  CHECK(db.records[2].entries == std::vector<int>{2, 1});
  REQUIRE(db.label_column.has_value());
  CHECK(db.labels == std::vector<std::string>{"yes", "no", "yes"});

  const RawTable back = decode_database(db, schema);
  CHECK(back.header == raw.header);
  CHECK(back.rows == raw.rows);
}

TEST_CASE("encoding rejects malformed input") {
  const Schema schema = small_schema();

  SUBCASE("duplicate primary key") {
    RawTable raw = small_table();
    raw.rows[2][0] = "r1";
    CHECK_THROWS_AS(encode_database(raw, schema), integrity_error);
  }
  SUBCASE("label outside the declared domain") {
    RawTable raw = small_table();
    raw.rows[1][1] = "purple";
    CHECK_THROWS_AS(encode_database(raw, schema), schema_error);
  }
  SUBCASE("missing column") {
    RawTable raw = small_table();
    raw.header[1] = "colour";
    CHECK_THROWS_AS(encode_database(raw, schema), schema_error);
  }
  SUBCASE("ragged row") {
    RawTable raw = small_table();
    raw.rows[0].pop_back();
    CHECK_THROWS_AS(encode_database(raw, schema), schema_error);
  }
}

TEST_CASE("database validation catches structural damage") {
  RelationalDatabase db = encode_database(small_table(), small_schema());

  SUBCASE("clean database passes") { CHECK_NOTHROW(db.validate()); }
  SUBCASE("no attributes") {
    db.domains.clear();
    CHECK_THROWS_AS(db.validate(), schema_error);
  }
  SUBCASE("entry code out of domain") {
    db.records[1].entries[0] = 7;
    CHECK_THROWS_AS(db.validate(), schema_error);
  }
  SUBCASE("negative entry code") {
    db.records[1].entries[0] = -1;
    CHECK_THROWS_AS(db.validate(), schema_error);
  }
  SUBCASE("label count mismatch") {
    db.labels.pop_back();
    CHECK_THROWS_AS(db.validate(), integrity_error);
  }
  SUBCASE("wrong entry count") {
    db.records[0].entries.push_back(0);
    CHECK_THROWS_AS(db.validate(), integrity_error);
  }
}

TEST_CASE("global sensitivity is the widest domain minus one") {
  const auto db = testing::full_factorial_db({2, 2});
  CHECK(compute_sensitivity(db, SensitivityMode::global).delta == 1);

  // Mixed widths {3,5,4,4,3,2,3,3}: the five-value attribute dominates.
  const auto wide = testing::full_factorial_db(testing::reference_sizes());
  const auto spec = compute_sensitivity(wide, SensitivityMode::global);
  CHECK(spec.delta == 4);
  CHECK(spec.mode == SensitivityMode::global);
}

TEST_CASE("restricted sensitivity checks the override") {
  const auto db = testing::full_factorial_db({3, 5});

  const auto spec = compute_sensitivity(db, SensitivityMode::restricted, 2);
  CHECK(spec.delta == 2);
  CHECK(spec.mode == SensitivityMode::restricted);

  // No silent weakening: an override above the schema-wide maximum would
  // declare neighbors the data can never realize.
  CHECK_THROWS_AS(compute_sensitivity(db, SensitivityMode::restricted, 5),
                  config_error);
  CHECK_THROWS_AS(compute_sensitivity(db, SensitivityMode::restricted, 0),
                  config_error);
  CHECK_THROWS_AS(compute_sensitivity(db, SensitivityMode::restricted),
                  config_error);
}

TEST_CASE("neighbor construction enforces the sensitivity budget") {
  const auto db = testing::full_factorial_db({4, 4});
  const int row = 5;
  const int old_value = db.records[row].entries[1];

  auto nb = make_neighbor(db, row, 1, (old_value + 1) % 4, 3);
  CHECK(nb.records[row].entries[1] != old_value);
  // Everything else is untouched.
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    CHECK(nb.records[i].primary_key == db.records[i].primary_key);
    if (i != static_cast<std::size_t>(row))
      CHECK(nb.records[i].entries == db.records[i].entries);
  }

  // A jump of at least two codes against a budget of one must be refused.
  CHECK_THROWS_AS(make_neighbor(db, row, 1, old_value < 2 ? 3 : 0, 1),
                  config_error);
  CHECK_THROWS_AS(make_neighbor(db, row, 1, 4, 4), config_error);
  CHECK_THROWS_AS(make_neighbor(db, db.records.size(), 0, 0, 4), config_error);
}

TEST_CASE("pairwise difference fractions form a distribution per class") {
  auto db = testing::full_factorial_db({3, 4});
  db.label_column = "cls";
  db.labels.assign(db.records.size(), "even");
  for (std::size_t i = 1; i < db.labels.size(); i += 2) db.labels[i] = "odd";

  const auto hist = pairwise_diff_fractions(db);
  REQUIRE(hist.size() == 2);
  for (const auto& [cls, dist] : hist) {
    double total = 0.0;
    for (const auto& [diff, frac] : dist) {
      CHECK(diff >= 0);
      CHECK(frac > 0.0);
      total += frac;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pairwise differences match a hand enumeration") {
  // Two single-attribute records with codes 0 and 2: the only pair differs
  // by exactly 2, so the histogram is {2: 1.0}.
  RelationalDatabase db;
  db.domains = {{"a", {"x", "y", "z"}}};
  db.records = {{"r1", {0}}, {"r2", {2}}};

  const auto hist = pairwise_diff_fractions(db);
  REQUIRE(hist.count(""));
  const auto& dist = hist.at("");
  REQUIRE(dist.size() == 1);
  CHECK(dist.at(2) == doctest::Approx(1.0));
}

TEST_CASE("degenerate classes report a point mass at zero") {
  RelationalDatabase db;
  db.domains = {{"a", {"x", "y"}}};
  db.records = {{"r1", {0}}};

  const auto hist = pairwise_diff_fractions(db);
  REQUIRE(hist.count(""));
  CHECK(hist.at("").at(0) == doctest::Approx(1.0));
}
