#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wiretap/bounds.hpp"
#include "wiretap/channel.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/oracle.hpp"
#include "wiretap/optimizer.hpp"
#include "wiretap/scheme.hpp"
#include "wiretap/session.hpp"

namespace wiretap {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Reports use key-order-preserving JSON so byte-identical reruns are a
// property of the values alone.
using Json = nlohmann::ordered_json;

// Channel/policy/scheme files must be normalized within this tolerance;
// slices are then renormalized exactly before the strict constructors run.
inline constexpr double kLoadTol = 1e-9;

namespace io_detail {

inline Json parse(const std::string& text, const std::string& origin) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded())
    throw validation_error("failed to parse JSON from " + origin);
  return j;
}

inline Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

template <class T>
T field(const Json& j, const std::string& key, const std::string& origin) {
  if (!j.contains(key))
    throw validation_error(origin + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw validation_error(origin + ": field '" + key + "' has the wrong type");
  }
}

inline void normalize_slice(std::vector<double>& slice, const std::string& what) {
  double sum = 0.0;
  for (double p : slice) {
    if (p < 0.0) throw validation_error(what + " has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kLoadTol)
    throw validation_error(what + " not normalized within 1e-9 (sum = " +
                           std::to_string(sum) + ")");
  for (double& p : slice) p /= sum;
}

}  // namespace io_detail

// Channel file:
// { "alphabets": {"x":2,"s":2,"y":2,"z":2},
//   "p_s": [..|S|..],
//   "p_yz_given_xs": [s][x][y*|Z|+z] }
inline ChannelWithState channel_from_json(const Json& j, const std::string& origin) {
  using namespace io_detail;
  const Json alph = field<Json>(j, "alphabets", origin);
  ChannelWithState ch;
  ch.x = {"X", field<int>(alph, "x", origin + ".alphabets")};
  ch.s = {"S", field<int>(alph, "s", origin + ".alphabets")};
  ch.y = {"Y", field<int>(alph, "y", origin + ".alphabets")};
  ch.z = {"Z", field<int>(alph, "z", origin + ".alphabets")};
  ch.p_s = field<std::vector<double>>(j, "p_s", origin);
  if (ch.p_s.size() != static_cast<std::size_t>(ch.s.size))
    throw validation_error(origin + ": p_s length does not match |S|");
  normalize_slice(ch.p_s, origin + ".p_s");
  const auto rows = field<std::vector<std::vector<std::vector<double>>>>(
      j, "p_yz_given_xs", origin);
  if (rows.size() != static_cast<std::size_t>(ch.s.size))
    throw validation_error(origin + ": p_yz_given_xs must have |S| rows");
  for (int s = 0; s < ch.s.size; ++s) {
    if (rows[s].size() != static_cast<std::size_t>(ch.x.size))
      throw validation_error(origin + ": p_yz_given_xs rows must have |X| slices");
    for (int x = 0; x < ch.x.size; ++x) {
      std::vector<double> slice = rows[s][x];
      if (slice.size() != static_cast<std::size_t>(ch.y.size) * ch.z.size)
        throw validation_error(origin + ": p_yz_given_xs slice must have |Y||Z| entries");
      normalize_slice(slice, origin + ".p_yz_given_xs[" + std::to_string(s) + "][" +
                                 std::to_string(x) + "]");
      ch.p_yz_given_xs.insert(ch.p_yz_given_xs.end(), slice.begin(), slice.end());
    }
  }
  ch.validate();
  return ch;
}

inline ChannelWithState load_channel(const std::string& path) {
  return channel_from_json(io_detail::load_file(path), path);
}

inline Json channel_to_json(const ChannelWithState& ch) {
  Json j;
  j["alphabets"] = {{"x", ch.x.size}, {"s", ch.s.size}, {"y", ch.y.size}, {"z", ch.z.size}};
  j["p_s"] = ch.p_s;
  Json rows = Json::array();
  for (int s = 0; s < ch.s.size; ++s) {
    Json per_x = Json::array();
    for (int x = 0; x < ch.x.size; ++x) {
      const auto slice = ch.yz_slice(s, x);
      per_x.push_back(std::vector<double>(slice.begin(), slice.end()));
    }
    rows.push_back(per_x);
  }
  j["p_yz_given_xs"] = rows;
  return j;
}

// Policy files hold either a causal policy
// { "card_v":2, "independent_v":true, "p_v_given_s":[s][v], "p_x_given_vs":[v][s][x] }
// or a Shannon strategy (detected by the "p_u" field)
// { "p_u":[u], "v_of_us":[u][s], "p_x_given_vs":[v][s][x] }.
using PolicyFile = std::variant<CausalPolicy, ShannonStrategy>;

inline PolicyFile policy_from_json(const Json& j, const std::string& origin) {
  using namespace io_detail;
  auto x_rule = field<std::vector<std::vector<std::vector<double>>>>(j, "p_x_given_vs", origin);
  for (auto& per_v : x_rule)
    for (auto& row : per_v)
      normalize_slice(row, origin + ".p_x_given_vs");
  if (x_rule.empty()) throw validation_error(origin + ": p_x_given_vs is empty");
  const int s_size = static_cast<int>(x_rule[0].size());
  const int x_size = static_cast<int>(x_rule[0][0].size());
  if (j.contains("p_u")) {
    auto p_u = field<std::vector<double>>(j, "p_u", origin);
    normalize_slice(p_u, origin + ".p_u");
    auto v_map = field<std::vector<std::vector<int>>>(j, "v_of_us", origin);
    if (v_map.size() != p_u.size())
      throw validation_error(origin + ": v_of_us must have |U| rows");
    std::vector<int> flat;
    for (const auto& row : v_map) {
      if (row.size() != static_cast<std::size_t>(s_size))
        throw validation_error(origin + ": v_of_us rows must have |S| entries");
      flat.insert(flat.end(), row.begin(), row.end());
    }
    return make_strategy(s_size, static_cast<int>(x_rule.size()), x_size, std::move(p_u),
                         std::move(flat), x_rule);
  }
  auto v_rows = field<std::vector<std::vector<double>>>(j, "p_v_given_s", origin);
  for (auto& row : v_rows) normalize_slice(row, origin + ".p_v_given_s");
  const bool independent = j.value("independent_v", false);
  return make_policy(x_size, v_rows, x_rule, independent);
}

inline PolicyFile load_policy(const std::string& path) {
  return policy_from_json(io_detail::load_file(path), path);
}

// Scheme file:
// { "case":1|2|3, "n":4, "b":2,
//   "log2_sizes": {"total":1,"bins":0,"subbins":0,"key":1,"keyd":0},
//   "epsilon":0.25, "seed":7, "trials":500 }
inline SchemeConfig scheme_from_json(const Json& j, const std::string& origin) {
  using namespace io_detail;
  SchemeConfig cfg;
  const int c = field<int>(j, "case", origin);
  if (c < 1 || c > 3) throw validation_error(origin + ": case must be 1, 2 or 3");
  cfg.scheme_case = static_cast<SchemeCase>(c);
  cfg.n = field<int>(j, "n", origin);
  cfg.b = field<int>(j, "b", origin);
  const Json sizes = field<Json>(j, "log2_sizes", origin);
  cfg.log2_total = field<int>(sizes, "total", origin + ".log2_sizes");
  cfg.log2_bins = sizes.value("bins", 0);
  cfg.log2_subbins = sizes.value("subbins", 0);
  cfg.log2_key = field<int>(sizes, "key", origin + ".log2_sizes");
  cfg.log2_keyd = sizes.value("keyd", 0);
  cfg.epsilon = field<double>(j, "epsilon", origin);
  cfg.master_seed = field<std::uint64_t>(j, "seed", origin);
  cfg.trials = j.value("trials", std::uint64_t{0});
  cfg.validate();
  return cfg;
}

inline SchemeConfig load_scheme(const std::string& path) {
  return scheme_from_json(io_detail::load_file(path), path);
}

inline Json scheme_to_json(const SchemeConfig& cfg) {
  Json j;
  j["case"] = static_cast<int>(cfg.scheme_case);
  j["n"] = cfg.n;
  j["b"] = cfg.b;
  j["log2_sizes"] = {{"total", cfg.log2_total},
                     {"bins", cfg.log2_bins},
                     {"subbins", cfg.log2_subbins},
                     {"key", cfg.log2_key},
                     {"keyd", cfg.log2_keyd}};
  j["epsilon"] = cfg.epsilon;
  j["seed"] = cfg.master_seed;
  j["trials"] = cfg.trials;
  return j;
}

inline Json policy_to_json(const CausalPolicy& pol) {
  Json j;
  j["card_v"] = pol.v.size;
  j["independent_v"] = pol.independent_v;
  Json v_rows = Json::array();
  for (int s = 0; s < pol.s_size; ++s) {
    const auto slice = pol.v_slice(s);
    v_rows.push_back(std::vector<double>(slice.begin(), slice.end()));
  }
  j["p_v_given_s"] = v_rows;
  Json x_rows = Json::array();
  for (int v = 0; v < pol.v.size; ++v) {
    Json per_s = Json::array();
    for (int s = 0; s < pol.s_size; ++s) {
      const auto slice = pol.x_slice(v, s);
      per_s.push_back(std::vector<double>(slice.begin(), slice.end()));
    }
    x_rows.push_back(per_s);
  }
  j["p_x_given_vs"] = x_rows;
  return j;
}

inline Json bound_report_to_json(const BoundReport& rep) {
  Json j;
  j["r_csi_1"] = rep.r_csi_1;
  j["r_csi_2"] = rep.r_csi_2;
  j["lower_bound"] = rep.lower_bound;
  j["lower_bound_reported"] = std::max(0.0, rep.lower_bound);
  if (rep.liu_chen) j["liu_chen"] = *rep.liu_chen;
  j["witness_csi_1"] = policy_to_json(rep.witness_csi_1);
  j["witness_csi_2"] = policy_to_json(rep.witness_csi_2);
  return j;
}

inline Json simulation_report_to_json(const SimulationReport& rep) {
  Json j;
  j["trials"] = rep.trials;
  j["message_blocks"] = rep.message_blocks;
  j["error_blocks"] = rep.error_blocks;
  j["empirical_pe"] = rep.empirical_pe;
  j["block_errors"] = rep.block_errors;
  j["key_histogram"] = rep.key_histogram;
  return j;
}

inline Json trace_to_json(const SessionTrace& trace) {
  Json blocks = Json::array();
  for (const auto& b : trace.blocks) {
    Json jb;
    jb["s_seq"] = b.s_seq;
    jb["x_seq"] = b.x_seq;
    jb["y_seq"] = b.y_seq;
    jb["z_seq"] = b.z_seq;
    jb["codeword"] = b.codeword;
    jb["key_declared"] = b.key_declared;
    if (b.message_sent) {
      jb["message_sent"] = *b.message_sent;
      jb["message_decoded"] = b.message_decoded ? Json(*b.message_decoded) : Json(nullptr);
      jb["error"] = b.error;
    }
    blocks.push_back(jb);
  }
  return Json{{"blocks", blocks}};
}

inline Json oracle_report_to_json(const OracleReport& rep) {
  Json j;
  j["exact_pe"] = rep.exact_pe;
  j["leakage_bits_per_symbol"] = rep.leakage_bits_per_symbol;
  Json stats = Json::array();
  for (std::size_t i = 0; i < rep.key_stats.size(); ++i) {
    const auto& ks = rep.key_stats[i];
    stats.push_back(Json{{"j", i + 1},
                         {"key_entropy_bits", ks.key_entropy_bits},
                         {"key_block_leakage_bits", ks.key_block_leakage_bits},
                         {"key_chain_leakage_bits", ks.key_chain_leakage_bits}});
  }
  j["key_stats"] = stats;
  j["crosscheck"] = rep.crosscheck_ok ? "pass" : "fail";
  return j;
}

// Every emitted document embeds its manifest: command, resolved
// configuration, seed, artifact version and wall-clock duration. The report
// body is a pure function of the manifest minus the duration.
struct RunManifest {
  std::string command;
  Json config = Json::object();
  std::uint64_t seed = 0;
  double duration_ms = 0.0;
};

inline Json document(const RunManifest& manifest, const Json& report) {
  Json j;
  j["manifest"] = {{"command", manifest.command},
                   {"version", kArtifactVersion},
                   {"seed", manifest.seed},
                   {"config", manifest.config},
                   {"duration_ms", manifest.duration_ms}};
  j["report"] = report;
  return j;
}

// CSV rendering of the report body: one `path,value` row per scalar leaf,
// arrays indexed in brackets. Values reuse the JSON formatting so the two
// formats agree byte-for-byte on numbers.
inline void flatten_csv(const Json& node, const std::string& prefix, std::string& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it)
      flatten_csv(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i)
      flatten_csv(node[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out += prefix;
    out += ',';
    out += node.dump();
    out += '\n';
  }
}

inline std::string to_csv(const Json& report) {
  std::string out = "key,value\n";
  flatten_csv(report, "", out);
  return out;
}

}  // namespace wiretap
