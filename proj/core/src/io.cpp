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

#include "dpmark/io.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dpmark/errors.hpp"
#include "dpmark/version.hpp"

namespace dpmark {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw integrity_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw integrity_error("read failure on file: " + path);
  return buf.str();
}

// Splits CSV content into rows of fields, honoring double-quoted fields with
// doubled-quote escapes. Accepts both \n and \r\n line endings.
std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;

  const auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_started) quoted = true;
        else field.push_back(c);
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;  // swallowed; the \n that follows ends the row
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
        break;
    }
  }
  if (quoted) throw integrity_error("unterminated quoted field in " + path);
  if (field_started || !row.empty()) end_row();
  return rows;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

RawTable read_csv(const std::string& path) {
  auto rows = parse_csv(read_file(path), path);
  if (rows.empty()) throw integrity_error("empty CSV file: " + path);
  RawTable table;
  table.header = std::move(rows.front());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != table.header.size())
      throw integrity_error("row " + std::to_string(i + 1) + " of " + path +
                            " has " + std::to_string(rows[i].size()) +
                            " fields, header has " +
                            std::to_string(table.header.size()));
    table.rows.push_back(std::move(rows[i]));
  }
  return table;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.parent_path().empty() ? fs::path(".")
                                                    : target.parent_path();
  const fs::path tmp = dir / (target.filename().string() + ".tmp." +
                              std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw integrity_error("cannot create file: " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw integrity_error("write failure on file: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw integrity_error("cannot move " + tmp.string() + " into place: " +
                          ec.message());
  }
}

void write_csv_atomic(const std::string& path, const RawTable& table) {
  std::string out;
  const auto append_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out.push_back(',');
      out += csv_escape(row[i]);
    }
    out.push_back('\n');
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  write_text_atomic(path, out);
}

Schema load_schema(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw schema_error("schema file " + path + " is not valid JSON: " +
                       e.what());
  }
  try {
    Schema schema;
    for (const auto& attr : doc.at("attributes")) {
      AttributeDomain dom;
      dom.name = attr.at("name").get<std::string>();
      for (const auto& v : attr.at("values"))
        dom.values.push_back(v.get<std::string>());
      schema.attributes.push_back(std::move(dom));
    }
    schema.primary_key = doc.at("primary_key").get<std::string>();
    if (doc.contains("label") && !doc["label"].is_null())
      schema.label = doc["label"].get<std::string>();
    if (doc.contains("sensitivity")) {
      const auto& s = doc["sensitivity"];
      const auto mode = s.at("mode").get<std::string>();
      if (mode == "global") schema.sensitivity_mode = SensitivityMode::global;
      else if (mode == "restricted")
        schema.sensitivity_mode = SensitivityMode::restricted;
      else
        throw schema_error("unknown sensitivity mode '" + mode + "' in " + path);
      if (s.contains("delta") && !s["delta"].is_null())
        schema.sensitivity_delta = s["delta"].get<int>();
    }
    return schema;
  } catch (const json::exception& e) {
    throw schema_error("schema file " + path + " is malformed: " + e.what());
  }
}

std::string schema_to_json(const Schema& schema) {
  json doc;
  doc["attributes"] = json::array();
  for (const auto& attr : schema.attributes)
    doc["attributes"].push_back({{"name", attr.name}, {"values", attr.values}});
  doc["primary_key"] = schema.primary_key;
  doc["label"] = schema.label ? json(*schema.label) : json(nullptr);
  doc["sensitivity"] = {
      {"mode", schema.sensitivity_mode == SensitivityMode::global
                   ? "global"
                   : "restricted"}};
  if (schema.sensitivity_delta)
    doc["sensitivity"]["delta"] = *schema.sensitivity_delta;
  return doc.dump(2) + "\n";
}

RelationalDatabase load_database(const std::string& csv_path,
                                 const Schema& schema) {
  return encode_database(read_csv(csv_path), schema);
}

void save_database_atomic(const std::string& csv_path,
                          const RelationalDatabase& db, const Schema& schema) {
  write_csv_atomic(csv_path, decode_database(db, schema));
}

std::string sha256_file(const std::string& path) {
  const std::string data = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1)
    throw integrity_error("SHA-256 digest failed for " + path);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string manifest_to_json(const RunManifest& manifest) {
  json doc;
  doc["tool"] = "dpmark";
  doc["version"] = kVersionString;
  doc["command"] = manifest.command;
  doc["parameters"] = json::object();
  for (const auto& [name, value] : manifest.parameters)
    doc["parameters"][name] = value;
  doc["seeds"] = json::object();
  for (const auto& [name, value] : manifest.seeds) doc["seeds"][name] = value;
  doc["inputs"] = json::object();
  for (const auto& [path, digest] : manifest.input_digests)
    doc["inputs"][path] = {{"sha256", digest}};
  doc["key_source"] = manifest.key_source;
  return doc.dump(2) + "\n";
}

void write_manifest_atomic(const std::string& path,
                           const RunManifest& manifest) {
  write_text_atomic(path, manifest_to_json(manifest));
}

}  // namespace dpmark
