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
//
// dpmark — fingerprint relational databases under an entry-level
// differential privacy guarantee, extract and attribute leaked copies,
// simulate attacks, and evaluate the robustness/utility bounds.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 data or schema
// error, 4 infeasible privacy budget.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dpmark/attacks.hpp"
#include "dpmark/bounds.hpp"
#include "dpmark/errors.hpp"
#include "dpmark/extraction.hpp"
#include "dpmark/fingerprint.hpp"
#include "dpmark/io.hpp"
#include "dpmark/keyed_prng.hpp"
#include "dpmark/schema.hpp"
#include "dpmark/sharing.hpp"
#include "dpmark/utility.hpp"
#include "dpmark/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitBudget = 4;

// ---------------------------------------------------------------------------
// Shared option plumbing

struct KeyOpts {
  std::string file;
  std::string env;
};

void add_key_options(CLI::App* cmd, KeyOpts& opts) {
  auto* f = cmd->add_option("--key-file", opts.file,
                            "File holding the secret key (>= 16 bytes)");
  auto* e = cmd->add_option(
      "--key-env", opts.env,
      "Name of an environment variable holding the secret key");
  f->excludes(e);
  e->excludes(f);
}

// Returns the key plus the manifest's key_source tag. The key itself is never
// echoed anywhere; only the kind of source is recorded.
std::pair<dpmark::SecretKey, std::string> load_key(const KeyOpts& opts) {
  if (!opts.file.empty())
    return {dpmark::SecretKey::from_file(opts.file), "file"};
  if (!opts.env.empty())
    return {dpmark::SecretKey::from_env(opts.env.c_str()), "env"};
  throw dpmark::config_error(
      "a secret key is required: pass --key-file or --key-env");
}

dpmark::SensitivitySpec resolve_sensitivity(const dpmark::RelationalDatabase& db,
                                            const dpmark::Schema& schema,
                                            std::optional<int> cli_delta) {
  if (cli_delta)
    return dpmark::compute_sensitivity(db, dpmark::SensitivityMode::restricted,
                                       cli_delta);
  return dpmark::compute_sensitivity(db, schema.sensitivity_mode,
                                     schema.sensitivity_delta);
}

std::string num(double v) { return json(v).dump(); }

// floor(log2(delta)) + 1: how many low bits the mechanism may touch.
int bits_for_delta(int delta) {
  int k = 1;
  while ((delta >> k) != 0) ++k;
  return k;
}

dpmark::PairwiseJoints to_pairwise(const dpmark::Distributions& dist) {
  dpmark::PairwiseJoints out;
  const int T = static_cast<int>(dist.domain_sizes.size());
  for (int t = 0; t < T; ++t)
    for (int z = 0; z < T; ++z) {
      if (z == t) continue;
      auto& table = out[{t, z}];
      for (int pi = 0; pi < dist.domain_sizes[t]; ++pi)
        for (int om = 0; om < dist.domain_sizes[z]; ++om)
          table[{pi, om}] = dist.joint(t, z, pi, om);
    }
  return out;
}

json joints_to_json(const dpmark::PairwiseJoints& joints) {
  json pairs = json::array();
  for (const auto& [tz, table] : joints) {
    json cells = json::array();
    for (const auto& [pio, prob] : table)
      cells.push_back({{"pi", pio.first}, {"omega", pio.second}, {"p", prob}});
    pairs.push_back({{"t", tz.first}, {"z", tz.second}, {"cells", cells}});
  }
  return json{{"pairs", pairs}};
}

dpmark::PairwiseJoints joints_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dpmark::integrity_error("cannot open file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw dpmark::integrity_error(path + " is not valid JSON: " + e.what());
  }
  dpmark::PairwiseJoints out;
  try {
    for (const auto& pair : doc.at("pairs")) {
      auto& table = out[{pair.at("t").get<int>(), pair.at("z").get<int>()}];
      for (const auto& cell : pair.at("cells"))
        table[{cell.at("pi").get<int>(), cell.at("omega").get<int>()}] =
            cell.at("p").get<double>();
    }
  } catch (const json::exception& e) {
    throw dpmark::integrity_error(path + " is malformed: " + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// fingerprint

struct FingerprintOpts {
  std::string db, schema, out, marks, sp_id;
  KeyOpts key;
  double epsilon = 1.0;
  std::optional<int> delta;
  int length = 128;
};

int run_fingerprint(const FingerprintOpts& o) {
  const auto schema = dpmark::load_schema(o.schema);
  const auto db = dpmark::load_database(o.db, schema);
  const auto sens = resolve_sensitivity(db, schema, o.delta);
  const auto [key, key_source] = load_key(o.key);

  const auto params =
      dpmark::FingerprintParams::from_epsilon(o.epsilon, sens.delta, o.length);
  auto outcome = dpmark::insert_fingerprint(db, params, key, o.sp_id);
  const std::size_t clamped = dpmark::postprocess_domain(outcome.db);
  const double density = dpmark::fingerprint_density(db, outcome.db);
  dpmark::save_database_atomic(o.out, outcome.db, schema);

  if (!o.marks.empty()) {
    json marks = json::array();
    for (const auto& m : outcome.marks)
      marks.push_back({{"row", m.row},
                       {"attr", m.attr},
                       {"bit_k", m.bit_k},
                       {"mask_x", m.mask_x},
                       {"index_l", m.index_l},
                       {"mark_b", m.mark_b}});
    dpmark::write_text_atomic(
        o.marks,
        json{{"note", "key-holder debug artifact"}, {"marks", marks}}.dump(2) +
            "\n");
  }

  dpmark::RunManifest manifest;
  manifest.command = "fingerprint";
  manifest.parameters = {{"epsilon", num(params.epsilon)},
                         {"delta", num(sens.delta)},
                         {"K", num(params.K)},
                         {"p", num(params.p)},
                         {"L", num(params.L)},
                         {"sp_id", o.sp_id}};
  manifest.input_digests = {{o.db, dpmark::sha256_file(o.db)},
                            {o.schema, dpmark::sha256_file(o.schema)}};
  manifest.key_source = key_source;
  dpmark::write_manifest_atomic(o.out + ".manifest.json", manifest);

  std::cout << json{{"rows", db.records.size()},
                    {"marks", outcome.marks.size()},
                    {"density", density},
                    {"clamped_entries", clamped},
                    {"out", o.out}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// extract

struct ExtractOpts {
  std::string original, leak, schema, out;
  KeyOpts key;
  double epsilon = 1.0;
  std::optional<int> delta;
  int length = 128;
};

int run_extract(const ExtractOpts& o) {
  const auto schema = dpmark::load_schema(o.schema);
  const auto original = dpmark::load_database(o.original, schema);
  const auto leaked = dpmark::load_database(o.leak, schema);
  const auto sens = resolve_sensitivity(original, schema, o.delta);
  const auto [key, key_source] = load_key(o.key);

  const auto params =
      dpmark::FingerprintParams::from_epsilon(o.epsilon, sens.delta, o.length);
  const auto result =
      dpmark::extract_fingerprint(original, leaked, params, key);

  json doc{{"length", result.length()},
           {"bits", result.bits},
           {"votes_for_zero", result.c0},
           {"votes_for_one", result.c1},
           {"resolved_fraction", result.resolved_fraction},
           {"skipped_unknown_keys", result.skipped_unknown_keys},
           {"parameters",
            {{"epsilon", params.epsilon},
             {"delta", sens.delta},
             {"K", params.K},
             {"p", params.p},
             {"L", params.L}}}};
  if (!o.out.empty()) {
    dpmark::write_text_atomic(o.out, doc.dump(2) + "\n");
    dpmark::RunManifest manifest;
    manifest.command = "extract";
    manifest.parameters = {{"epsilon", num(params.epsilon)},
                           {"delta", num(sens.delta)},
                           {"L", num(params.L)}};
    manifest.input_digests = {{o.original, dpmark::sha256_file(o.original)},
                              {o.leak, dpmark::sha256_file(o.leak)},
                              {o.schema, dpmark::sha256_file(o.schema)}};
    manifest.key_source = key_source;
    dpmark::write_manifest_atomic(o.out + ".manifest.json", manifest);
  }
  std::cout << json{{"resolved_fraction", result.resolved_fraction},
                    {"skipped_unknown_keys", result.skipped_unknown_keys},
                    {"out", o.out.empty() ? json(nullptr) : json(o.out)}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// detect

struct DetectOpts {
  std::string extraction, registry, out;
  KeyOpts key;
  std::optional<std::uint64_t> recipients;
  std::optional<int> threshold;
};

int run_detect(const DetectOpts& o) {
  std::ifstream in(o.extraction);
  if (!in) throw dpmark::integrity_error("cannot open file: " + o.extraction);
  json edoc;
  try {
    in >> edoc;
  } catch (const json::parse_error& e) {
    throw dpmark::integrity_error(o.extraction + " is not valid JSON: " +
                                  e.what());
  }

  dpmark::ExtractionResult extraction;
  try {
    extraction.bits = edoc.at("bits").get<std::vector<std::int8_t>>();
    extraction.c0 = edoc.at("votes_for_zero").get<std::vector<std::uint64_t>>();
    extraction.c1 = edoc.at("votes_for_one").get<std::vector<std::uint64_t>>();
    extraction.resolved_fraction = edoc.at("resolved_fraction").get<double>();
  } catch (const json::exception& e) {
    throw dpmark::integrity_error(o.extraction + " is malformed: " + e.what());
  }
  const int L = extraction.length();

  std::ifstream rin(o.registry);
  if (!rin) throw dpmark::integrity_error("cannot open file: " + o.registry);
  json rdoc;
  try {
    rin >> rdoc;
  } catch (const json::parse_error& e) {
    throw dpmark::integrity_error(o.registry + " is not valid JSON: " +
                                  e.what());
  }
  if (!rdoc.is_object() || rdoc.empty())
    throw dpmark::integrity_error(o.registry +
                                  " must map external ids to internal ids");

  const auto [key, key_source] = load_key(o.key);
  std::vector<std::pair<std::string, dpmark::FingerprintBits>> candidates;
  for (const auto& [external, internal] : rdoc.items())
    candidates.emplace_back(
        external, dpmark::gen_fingerprint(key, internal.get<std::string>(), L));

  const int D = o.threshold
                    ? *o.threshold
                    : dpmark::match_threshold_D(
                          o.recipients ? *o.recipients : candidates.size(), L);
  const auto verdict = dpmark::detect_traitor(extraction, candidates, D);

  json doc{{"threshold_D", verdict.threshold_D},
           {"matches", verdict.matches},
           {"accused", verdict.accused ? json(*verdict.accused) : json(nullptr)}};
  if (!o.out.empty()) dpmark::write_text_atomic(o.out, doc.dump(2) + "\n");
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// attack

struct AttackOpts {
  std::string kind, db, schema, out, ref_joint;
  double gamma = 0.5;
  double tau = 0.05;
  std::optional<int> delta;
  std::uint64_t seed = 0;
};

int run_attack(const AttackOpts& o) {
  const auto schema = dpmark::load_schema(o.schema);
  const auto db = dpmark::load_database(o.db, schema);
  const auto sens = resolve_sensitivity(db, schema, o.delta);
  const int K = bits_for_delta(sens.delta);

  dpmark::RelationalDatabase attacked;
  std::vector<std::pair<std::string, std::string>> params;
  if (o.kind == "flip") {
    attacked = dpmark::random_flipping(db, K, o.gamma, o.seed);
    params = {{"gamma_rnd", num(o.gamma)}, {"K", num(K)}};
  } else if (o.kind == "subset") {
    attacked = dpmark::subset_attack(db, o.gamma, o.seed);
    params = {{"gamma_sub", num(o.gamma)}};
  } else if (o.kind == "corr") {
    if (o.ref_joint.empty())
      throw dpmark::config_error(
          "correlation attack needs --ref-joint (the attacker's side "
          "knowledge of the joint distributions)");
    const auto reference = joints_from_file(o.ref_joint);
    attacked = dpmark::correlation_attack(db, reference, o.tau, K, o.seed);
    params = {{"tau", num(o.tau)}, {"K", num(K)}};
  } else {
    throw dpmark::config_error("unknown attack kind '" + o.kind +
                               "' (expected flip, subset, or corr)");
  }
  dpmark::save_database_atomic(o.out, attacked, schema);

  dpmark::RunManifest manifest;
  manifest.command = "attack";
  params.emplace_back("kind", o.kind);
  manifest.parameters = std::move(params);
  manifest.seeds = {{"attack", o.seed}};
  manifest.input_digests = {{o.db, dpmark::sha256_file(o.db)},
                            {o.schema, dpmark::sha256_file(o.schema)}};
  if (!o.ref_joint.empty())
    manifest.input_digests.emplace_back(o.ref_joint,
                                        dpmark::sha256_file(o.ref_joint));
  dpmark::write_manifest_atomic(o.out + ".manifest.json", manifest);

  std::cout << json{{"kind", o.kind},
                    {"rows_out", attacked.records.size()},
                    {"out", o.out}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze bound

struct BoundOpts {
  std::string name, stats, out, mode = "mc", variant = "appendix";
  double psi = 1.0, epsilon = 1.0, p = 0.25, gamma = 0.5, tau = 0.01;
  double joint = 0.0, marginal = 0.0, pr_min = 0.0, pr_max = 0.0;
  int delta = 1, k = 1, t = 1, l = 128, d = 0;
  std::uint64_t n = 0, seed = 1, trials = 100000;
};

int run_bound(const BoundOpts& o) {
  json inputs, result;
  if (o.name == "infcap") {
    inputs = {{"psi", o.psi}, {"epsilon", o.epsilon}};
    result["value"] = dpmark::infcap_bound(o.psi, o.epsilon);
  } else if (o.name == "error") {
    inputs = {{"delta", o.delta}, {"p", o.p}};
    const auto iv = dpmark::expected_error_bound(o.delta, o.p);
    result["interval"] = {{"lower", iv.lower}, {"upper", iv.upper}};
  } else if (o.name == "density") {
    inputs = {{"delta", o.delta}, {"p", o.p}, {"n", o.n}, {"t", o.t}};
    const auto iv = dpmark::density_bound(o.delta, o.p, o.n, o.t);
    result["interval"] = {{"lower", iv.lower}, {"upper", iv.upper}};
  } else if (o.name == "joint" || o.name == "marginal") {
    const double center = o.name == "joint" ? o.joint : o.marginal;
    inputs = {{"p", o.p},
              {"k", o.k},
              {o.name, center},
              {"pr_min", o.pr_min},
              {"pr_max", o.pr_max}};
    const auto iv = o.name == "joint"
                        ? dpmark::joint_bounds(o.p, o.k, center, o.pr_min, o.pr_max)
                        : dpmark::marginal_bounds(o.p, o.k, center, o.pr_min,
                                                  o.pr_max);
    result["interval"] = {{"lower", iv.lower}, {"upper", iv.upper}};
  } else if (o.name == "psub") {
    inputs = {{"p", o.p}, {"l", o.l}, {"k", o.k},
              {"t", o.t}, {"n", o.n}, {"gamma_sub", o.gamma}};
    result["value"] = dpmark::p_rbst_sub(o.p, o.l, o.k, o.t, o.n, o.gamma);
  } else if (o.name == "prnd") {
    inputs = {{"p", o.p},     {"gamma_rnd", o.gamma}, {"n", o.n},
              {"k", o.k},     {"t", o.t},             {"l", o.l},
              {"d", o.d},     {"mode", o.mode},       {"seed", o.seed},
              {"trials", o.trials}};
    const auto mode = o.mode == "exact" ? dpmark::PrbstMode::exact_tiny
                                        : dpmark::PrbstMode::monte_carlo;
    result["value"] = dpmark::p_rbst_rnd(o.p, o.gamma, o.n, o.k, o.t, o.l, o.d,
                                         mode, o.seed, o.trials);
  } else if (o.name == "gain") {
    if (o.stats.empty())
      throw dpmark::config_error(
          "gain needs --stats, a JSON file with per-pair joint statistics");
    std::ifstream in(o.stats);
    if (!in) throw dpmark::integrity_error("cannot open file: " + o.stats);
    json sdoc;
    try {
      in >> sdoc;
    } catch (const json::parse_error& e) {
      throw dpmark::integrity_error(o.stats + " is not valid JSON: " + e.what());
    }
    std::vector<dpmark::PairJointStats> pairs;
    try {
      for (const auto& pj : sdoc.at("pairs")) {
        dpmark::PairJointStats s;
        s.joint_by_omega = pj.at("joint_by_omega").get<std::vector<double>>();
        s.pr_min = pj.at("pr_min").get<double>();
        s.pr_max = pj.at("pr_max").get<double>();
        pairs.push_back(std::move(s));
      }
    } catch (const json::exception& e) {
      throw dpmark::integrity_error(o.stats + " is malformed: " + e.what());
    }
    const auto variant = o.variant == "main" ? dpmark::GainVariant::main_text
                                             : dpmark::GainVariant::appendix;
    inputs = {{"p", o.p},           {"k", o.k},
              {"tau", o.tau},       {"marginal", o.marginal},
              {"stats", o.stats},   {"variant", o.variant}};
    result["value"] =
        dpmark::confidence_gain(o.p, o.k, o.tau, pairs, o.marginal, variant);
  } else {
    throw dpmark::config_error(
        "unknown bound '" + o.name +
        "' (expected infcap, error, density, joint, marginal, psub, prnd, "
        "or gain)");
  }

  json doc{{"name", o.name}, {"inputs", inputs}};
  doc.update(result);
  if (!o.out.empty()) dpmark::write_text_atomic(o.out, doc.dump(2) + "\n");
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// share

struct ShareOpts {
  std::string db, schema, out_dir, split = "1:1", gamma_basis = "nk";
  KeyOpts key;
  int recipients = 1;
  double epsilon0 = 40.0;
  double delta_prime = 1e-3;
  double epsilon = 0.5;
  std::optional<double> gamma;
  std::optional<int> delta;
  std::uint64_t noise_seed = 1;
  std::uint64_t trial_cap = 10000;
};

int run_share(const ShareOpts& o) {
  const auto schema = dpmark::load_schema(o.schema);
  const auto db = dpmark::load_database(o.db, schema);
  const auto sens = resolve_sensitivity(db, schema, o.delta);
  const auto [key, key_source] = load_key(o.key);

  const double x =
      dpmark::solve_budget(o.epsilon0, o.delta_prime, o.recipients, o.epsilon);
  double r2 = 1.0, r3 = 1.0;
  if (std::sscanf(o.split.c_str(), "%lf:%lf", &r2, &r3) != 2 || r2 <= 0.0 ||
      r3 <= 0.0)
    throw dpmark::config_error("--split must look like 9:1 with positive parts");

  dpmark::SvtConfig config;
  config.eps_insert = o.epsilon;
  config.eps2 = x * r2 / (r2 + r3);
  config.eps3 = x * r3 / (r2 + r3);
  config.delta = sens.delta;
  config.max_recipients = o.recipients;
  config.delta_prime = o.delta_prime;
  config.trial_cap = o.trial_cap;

  const auto params =
      dpmark::FingerprintParams::from_epsilon(o.epsilon, sens.delta);
  if (o.gamma) {
    config.gamma_threshold = *o.gamma;
  } else if (o.gamma_basis == "nk") {
    config.gamma_threshold = dpmark::default_gamma(
        sens.delta, params.p, db.records.size(), params.K);
  } else if (o.gamma_basis == "nt") {
    config.gamma_threshold = dpmark::default_gamma_nt(
        sens.delta, params.p, db.records.size(),
        static_cast<int>(db.domains.size()));
  } else {
    throw dpmark::config_error("--gamma-basis must be nk or nt");
  }

  const auto ledger = dpmark::share_multi(db, config, key, o.noise_seed);
  const auto [eps_total, delta_total] = dpmark::release_privacy(ledger, config);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec)
    throw dpmark::integrity_error("cannot create directory " + o.out_dir +
                                  ": " + ec.message());

  json registry = json::object();
  json recipients = json::array();
  for (const auto& share : ledger.recipients) {
    const std::string external = "sp" + std::to_string(share.sequence_c);
    const std::string csv_path =
        (fs::path(o.out_dir) / (external + ".csv")).string();
    dpmark::save_database_atomic(csv_path, share.released, schema);
    registry[external] = share.final_internal_id;

    json trials = json::array();
    for (const auto& t : share.trials)
      trials.push_back({{"trial", t.trial_i},
                        {"internal_id", t.internal_id_hex},
                        {"density", t.density},
                        {"mu", t.mu},
                        {"rho", t.rho},
                        {"passed", t.passed}});
    recipients.push_back({{"sequence", share.sequence_c},
                          {"external_id", external},
                          {"final_internal_id", share.final_internal_id},
                          {"trials", trials}});
  }

  // sps.json and ledger.json are key-holder artifacts: they expose internal
  // ids and noise draws, never the key. Only the sp<c>.csv files are meant
  // for recipients.
  dpmark::write_text_atomic((fs::path(o.out_dir) / "sps.json").string(),
                            registry.dump(2) + "\n");
  json ledger_doc{{"recipients", recipients},
                  {"total_trials", ledger.total_trials()},
                  {"config",
                   {{"gamma", config.gamma_threshold},
                    {"epsilon", config.eps_insert},
                    {"eps2", config.eps2},
                    {"eps3", config.eps3},
                    {"delta", config.delta},
                    {"delta_prime", config.delta_prime},
                    {"recipients", config.max_recipients}}},
                  {"privacy", {{"epsilon0", eps_total}, {"delta0", delta_total}}}};
  dpmark::write_text_atomic((fs::path(o.out_dir) / "ledger.json").string(),
                            ledger_doc.dump(2) + "\n");

  dpmark::RunManifest manifest;
  manifest.command = "share";
  manifest.parameters = {{"recipients", num(o.recipients)},
                         {"epsilon0", num(o.epsilon0)},
                         {"delta_prime", num(o.delta_prime)},
                         {"epsilon", num(o.epsilon)},
                         {"eps2", num(config.eps2)},
                         {"eps3", num(config.eps3)},
                         {"gamma", num(config.gamma_threshold)},
                         {"delta", num(sens.delta)},
                         {"split", o.split}};
  manifest.seeds = {{"noise", o.noise_seed}};
  manifest.input_digests = {{o.db, dpmark::sha256_file(o.db)},
                            {o.schema, dpmark::sha256_file(o.schema)}};
  manifest.key_source = key_source;
  dpmark::write_manifest_atomic(
      (fs::path(o.out_dir) / "manifest.json").string(), manifest);

  std::cout << json{{"recipients", ledger.recipients.size()},
                    {"total_trials", ledger.total_trials()},
                    {"epsilon0", eps_total},
                    {"delta0", delta_total},
                    {"out_dir", o.out_dir}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// utility

struct UtilityOpts {
  std::string original, shared, schema, query, out, dump_joints;
};

int run_utility(const UtilityOpts& o) {
  const auto schema = dpmark::load_schema(o.schema);
  const auto original = dpmark::load_database(o.original, schema);
  const auto shared = dpmark::load_database(o.shared, schema);

  const auto deltas = dpmark::variance_change(original, shared);
  json variance = json::object();
  for (std::size_t t = 0; t < deltas.size(); ++t)
    variance[original.domains[t].name] = deltas[t];

  std::size_t changed = 0;
  std::map<std::string, const dpmark::Record*> by_key;
  for (const auto& rec : shared.records) by_key[rec.primary_key] = &rec;
  for (const auto& rec : original.records) {
    auto it = by_key.find(rec.primary_key);
    if (it == by_key.end()) continue;
    for (std::size_t t = 0; t < rec.entries.size(); ++t)
      changed += rec.entries[t] != it->second->entries[t];
  }

  json doc{{"variance_change", variance},
           {"fingerprint_density", dpmark::fingerprint_density(original, shared)},
           {"changed_entries", changed},
           {"changed_entry_fraction",
            original.records.empty()
                ? 0.0
                : static_cast<double>(changed) /
                      (static_cast<double>(original.records.size()) *
                       original.domains.size())}};

  if (!o.query.empty()) {
    std::ifstream in(o.query);
    if (!in) throw dpmark::integrity_error("cannot open file: " + o.query);
    json qdoc;
    try {
      in >> qdoc;
    } catch (const json::parse_error& e) {
      throw dpmark::integrity_error(o.query + " is not valid JSON: " + e.what());
    }
    dpmark::QuerySpec spec;
    try {
      for (const auto& pred : qdoc.at("predicates"))
        spec.predicates.emplace_back(pred.at("attribute").get<std::string>(),
                                     pred.at("value").get<std::string>());
    } catch (const json::exception& e) {
      throw dpmark::integrity_error(o.query + " is malformed: " + e.what());
    }
    doc["query_accuracy"] = dpmark::query_accuracy(original, shared, spec);
  }

  if (!o.dump_joints.empty()) {
    const auto dist = dpmark::empirical_distributions(original);
    dpmark::write_text_atomic(o.dump_joints,
                              joints_to_json(to_pairwise(dist)).dump(2) + "\n");
    doc["joints_written"] = o.dump_joints;
  }

  if (!o.out.empty()) dpmark::write_text_atomic(o.out, doc.dump(2) + "\n");
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// baseline

struct BaselineOpts {
  std::string db, schema, out, sp_id;
  KeyOpts key;
  double epsilon = 1.0;
  std::optional<double> lambda;
  std::uint64_t rr_seed = 1;
};

int run_baseline(const BaselineOpts& o) {
  const auto schema = dpmark::load_schema(o.schema);
  const auto db = dpmark::load_database(o.db, schema);
  const auto [key, key_source] = load_key(o.key);

  const auto shared = dpmark::two_stage_baseline(db, o.epsilon, key, o.sp_id,
                                                 o.rr_seed, o.lambda);
  dpmark::save_database_atomic(o.out, shared, schema);

  dpmark::RunManifest manifest;
  manifest.command = "baseline";
  manifest.parameters = {{"epsilon", num(o.epsilon)}, {"sp_id", o.sp_id}};
  if (o.lambda) manifest.parameters.emplace_back("lambda", num(*o.lambda));
  manifest.seeds = {{"rr", o.rr_seed}};
  manifest.input_digests = {{o.db, dpmark::sha256_file(o.db)},
                            {o.schema, dpmark::sha256_file(o.schema)}};
  manifest.key_source = key_source;
  dpmark::write_manifest_atomic(o.out + ".manifest.json", manifest);

  std::cout << json{{"rows", shared.records.size()}, {"out", o.out}}.dump(2)
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpmark " + std::string(dpmark::kVersionString) +
               " — differentially private database fingerprinting"};
  app.require_subcommand(1);

  FingerprintOpts fp;
  auto* cmd_fp = app.add_subcommand(
      "fingerprint", "Embed a recipient fingerprint under an epsilon budget");
  cmd_fp->add_option("--db", fp.db, "Input CSV")->required();
  cmd_fp->add_option("--schema", fp.schema, "Schema JSON sidecar")->required();
  cmd_fp->add_option("--epsilon", fp.epsilon, "Privacy budget epsilon")
      ->required();
  cmd_fp->add_option("--delta", fp.delta,
                     "Sensitivity override (restricted mode)");
  cmd_fp->add_option("--sp-id", fp.sp_id, "Recipient internal id string")
      ->required();
  cmd_fp->add_option("--length", fp.length, "Fingerprint length L (<= 128)");
  cmd_fp->add_option("--out", fp.out, "Output CSV")->required();
  cmd_fp->add_option("--marks", fp.marks,
                     "Optional key-holder debug dump of mark decisions");
  add_key_options(cmd_fp, fp.key);

  ExtractOpts ex;
  auto* cmd_ex = app.add_subcommand(
      "extract", "Recover the fingerprint carried by a leaked copy");
  cmd_ex->add_option("--original", ex.original, "Original CSV")->required();
  cmd_ex->add_option("--leak", ex.leak, "Leaked CSV")->required();
  cmd_ex->add_option("--schema", ex.schema, "Schema JSON sidecar")->required();
  cmd_ex->add_option("--epsilon", ex.epsilon, "Epsilon used at insertion")
      ->required();
  cmd_ex->add_option("--delta", ex.delta,
                     "Sensitivity override (restricted mode)");
  cmd_ex->add_option("--length", ex.length, "Fingerprint length L (<= 128)");
  cmd_ex->add_option("--out", ex.out, "Extraction JSON output");
  add_key_options(cmd_ex, ex.key);

  DetectOpts de;
  auto* cmd_de = app.add_subcommand(
      "detect", "Attribute an extracted fingerprint to a recipient");
  cmd_de->add_option("--extraction", de.extraction, "Extraction JSON")
      ->required();
  cmd_de
      ->add_option("--registry", de.registry,
                   "sps.json mapping external ids to internal ids")
      ->required();
  auto* opt_c = cmd_de->add_option("--recipients", de.recipients,
                                   "Number of released copies C");
  auto* opt_d = cmd_de->add_option("--threshold", de.threshold,
                                   "Explicit match threshold D");
  opt_c->excludes(opt_d);
  opt_d->excludes(opt_c);
  cmd_de->add_option("--out", de.out, "Verdict JSON output");
  add_key_options(cmd_de, de.key);

  AttackOpts at;
  auto* cmd_at =
      app.add_subcommand("attack", "Simulate an attack on a marked copy");
  cmd_at->add_option("--kind", at.kind, "flip, subset, or corr")->required();
  cmd_at->add_option("--db", at.db, "Fingerprinted CSV")->required();
  cmd_at->add_option("--schema", at.schema, "Schema JSON sidecar")->required();
  cmd_at->add_option("--gamma", at.gamma,
                     "Flip rate (flip) or keep probability (subset)");
  cmd_at->add_option("--tau", at.tau, "Discrepancy threshold (corr)");
  cmd_at->add_option("--delta", at.delta,
                     "Sensitivity override (restricted mode)");
  cmd_at->add_option("--ref-joint", at.ref_joint,
                     "Reference joint distribution JSON (corr)");
  cmd_at->add_option("--seed", at.seed, "Attack RNG seed")->required();
  cmd_at->add_option("--out", at.out, "Attacked CSV output")->required();

  BoundOpts bo;
  auto* cmd_an = app.add_subcommand("analyze", "Closed-form evaluators");
  auto* cmd_bo = cmd_an->add_subcommand("bound", "Evaluate a bound or formula");
  cmd_bo
      ->add_option("--name", bo.name,
                   "infcap, error, density, joint, marginal, psub, prnd, gain")
      ->required();
  cmd_bo->add_option("--psi", bo.psi, "Prior odds (infcap)");
  cmd_bo->add_option("--epsilon", bo.epsilon, "Privacy budget (infcap)");
  cmd_bo->add_option("--p", bo.p, "Bit flip probability");
  cmd_bo->add_option("--delta", bo.delta, "Sensitivity");
  cmd_bo->add_option("--k", bo.k, "Bits per entry K");
  cmd_bo->add_option("--t", bo.t, "Attribute count T");
  cmd_bo->add_option("--n", bo.n, "Row count N");
  cmd_bo->add_option("--l", bo.l, "Fingerprint length L");
  cmd_bo->add_option("--d", bo.d, "Required matching bits D");
  cmd_bo->add_option("--gamma", bo.gamma, "Attack rate (psub keep / prnd flip)");
  cmd_bo->add_option("--tau", bo.tau, "Trigger threshold (gain)");
  cmd_bo->add_option("--joint", bo.joint, "Joint probability (joint)");
  cmd_bo->add_option("--marginal", bo.marginal, "Marginal probability");
  cmd_bo->add_option("--pr-min", bo.pr_min, "Minimum table probability");
  cmd_bo->add_option("--pr-max", bo.pr_max, "Maximum table probability");
  cmd_bo->add_option("--mode", bo.mode, "prnd mode: exact or mc");
  cmd_bo->add_option("--variant", bo.variant, "gain variant: appendix or main");
  cmd_bo->add_option("--stats", bo.stats, "Per-pair joint stats JSON (gain)");
  cmd_bo->add_option("--seed", bo.seed, "Monte Carlo seed");
  cmd_bo->add_option("--trials", bo.trials, "Monte Carlo trials");
  cmd_bo->add_option("--out", bo.out, "Result JSON output");

  ShareOpts sh;
  auto* cmd_sh = app.add_subcommand(
      "share", "Release fingerprinted copies to C recipients under a budget");
  cmd_sh->add_option("--db", sh.db, "Input CSV")->required();
  cmd_sh->add_option("--schema", sh.schema, "Schema JSON sidecar")->required();
  cmd_sh->add_option("--recipients", sh.recipients, "Recipient count C")
      ->required();
  cmd_sh->add_option("--epsilon0", sh.epsilon0, "Total budget epsilon_0")
      ->required();
  cmd_sh->add_option("--delta-prime", sh.delta_prime, "Composition slack")
      ->required();
  cmd_sh->add_option("--epsilon", sh.epsilon, "Per-copy insertion budget")
      ->required();
  cmd_sh->add_option("--gamma", sh.gamma, "Density threshold override");
  cmd_sh->add_option("--gamma-basis", sh.gamma_basis,
                     "Default threshold basis: nk (printed formula) or nt");
  cmd_sh->add_option("--split", sh.split, "eps2:eps3 ratio, default 1:1");
  cmd_sh->add_option("--delta", sh.delta,
                     "Sensitivity override (restricted mode)");
  cmd_sh->add_option("--noise-seed", sh.noise_seed, "Laplace noise seed");
  cmd_sh->add_option("--trial-cap", sh.trial_cap, "Safety cap per recipient");
  cmd_sh->add_option("--out-dir", sh.out_dir, "Output directory")->required();
  add_key_options(cmd_sh, sh.key);

  UtilityOpts ut;
  auto* cmd_ut = app.add_subcommand(
      "utility", "Compare a shared copy against the original");
  cmd_ut->add_option("--original", ut.original, "Original CSV")->required();
  cmd_ut->add_option("--shared", ut.shared, "Shared CSV")->required();
  cmd_ut->add_option("--schema", ut.schema, "Schema JSON sidecar")->required();
  cmd_ut->add_option("--query", ut.query, "Conjunctive query JSON");
  cmd_ut->add_option("--dump-joints", ut.dump_joints,
                     "Write the original's pairwise joints to this JSON file");
  cmd_ut->add_option("--out", ut.out, "Metrics JSON output");

  BaselineOpts ba;
  auto* cmd_ba = app.add_subcommand(
      "baseline", "Two-stage local-DP + marking comparison baseline");
  cmd_ba->add_option("--db", ba.db, "Input CSV")->required();
  cmd_ba->add_option("--schema", ba.schema, "Schema JSON sidecar")->required();
  cmd_ba->add_option("--epsilon", ba.epsilon, "Privacy budget epsilon")
      ->required();
  cmd_ba->add_option("--sp-id", ba.sp_id, "Recipient internal id string")
      ->required();
  cmd_ba->add_option("--lambda", ba.lambda,
                     "Stage-two marking rate (default: matched to ours)");
  cmd_ba->add_option("--rr-seed", ba.rr_seed, "Randomized response seed")
      ->required();
  cmd_ba->add_option("--out", ba.out, "Output CSV")->required();
  add_key_options(cmd_ba, ba.key);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(cmd_fp)) return run_fingerprint(fp);
    if (app.got_subcommand(cmd_ex)) return run_extract(ex);
    if (app.got_subcommand(cmd_de)) return run_detect(de);
    if (app.got_subcommand(cmd_at)) return run_attack(at);
    if (app.got_subcommand(cmd_an)) {
      if (cmd_an->got_subcommand(cmd_bo)) return run_bound(bo);
      throw dpmark::config_error("analyze requires the bound subcommand");
    }
    if (app.got_subcommand(cmd_sh)) return run_share(sh);
    if (app.got_subcommand(cmd_ut)) return run_utility(ut);
    if (app.got_subcommand(cmd_ba)) return run_baseline(ba);
    throw dpmark::config_error("no subcommand selected");
  } catch (const dpmark::budget_infeasible_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const dpmark::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dpmark::schema_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const dpmark::integrity_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
