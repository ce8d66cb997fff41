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
#include <string>
#include <utility>
#include <vector>

#include "dpmark/schema.hpp"

namespace dpmark {

// Reads a UTF-8 CSV file with a header row. Fields may be double-quoted;
// a doubled quote inside a quoted field is an escaped quote. Throws
// integrity_error when the file cannot be read or rows are ragged.
RawTable read_csv(const std::string& path);

// Writes a CSV file atomically (temp file in the same directory + rename).
// Fields containing commas, quotes, or newlines are quoted on the way out.
void write_csv_atomic(const std::string& path, const RawTable& table);

// Writes arbitrary text atomically; used for JSON artifacts.
void write_text_atomic(const std::string& path, const std::string& content);

// Loads the JSON schema sidecar:
//   {"attributes": [{"name": ..., "values": [...]}, ...],
//    "primary_key": ..., "label": ... | null,
//    "sensitivity": {"mode": "global"|"restricted", "delta": ...}}
Schema load_schema(const std::string& path);

// Serializes a schema back to its sidecar JSON form.
std::string schema_to_json(const Schema& schema);

// read_csv + encode_database in one step.
RelationalDatabase load_database(const std::string& csv_path,
                                 const Schema& schema);

// decode_database + write_csv_atomic in one step.
void save_database_atomic(const std::string& csv_path,
                          const RelationalDatabase& db, const Schema& schema);

// Lowercase hex SHA-256 of a file's bytes, for manifest input digests.
std::string sha256_file(const std::string& path);

// Reproducibility sidecar written next to every artifact. The secret key is
// identified only by where it came from; neither its bytes nor its path ever
// appear in any output.
struct RunManifest {
  std::string command;  // subcommand that produced the artifact
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::vector<std::pair<std::string, std::string>> input_digests;
  std::string key_source = "none";  // "file", "env", or "none"
};

// Deterministic JSON rendering of a manifest (sorted keys, fixed layout), so
// identical runs produce byte-identical manifests.
std::string manifest_to_json(const RunManifest& manifest);

void write_manifest_atomic(const std::string& path, const RunManifest& manifest);

}  // namespace dpmark
