// Command-line workbench: load channels, evaluate and optimize secrecy-rate
// bounds, simulate the block-Markov key-recycling schemes, and run the exact
// enumeration oracle.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "wiretap/bounds.hpp"
#include "wiretap/io.hpp"
#include "wiretap/optimizer.hpp"
#include "wiretap/oracle.hpp"
#include "wiretap/scheme.hpp"
#include "wiretap/session.hpp"

namespace {

using wiretap::Json;

struct Options {
  std::string channel_file;
  std::string policy_file;
  std::string scheme_file;
  bool builtin_example_channel = false;
  std::optional<std::uint64_t> seed;
  int resolution = 4;
  int card_v = 0;  // 0 -> |X||S| + 1
  int refine_rounds = 2;
  int restarts = 1;
  std::optional<std::uint64_t> trials;
  int workers = 1;
  std::string format = "json";
  std::optional<std::uint64_t> budget;
  bool trace = false;
};

wiretap::ChannelWithState resolve_channel(const Options& opt) {
  if (opt.builtin_example_channel) return wiretap::example_channel();
  if (opt.channel_file.empty())
    throw wiretap::validation_error("a channel file is required (--channel)");
  return wiretap::load_channel(opt.channel_file);
}

std::optional<wiretap::PolicyFile> resolve_policy(const Options& opt) {
  if (opt.policy_file.empty()) return std::nullopt;
  return wiretap::load_policy(opt.policy_file);
}

wiretap::ShannonStrategy resolve_strategy(const wiretap::ChannelWithState& ch,
                                          const std::optional<wiretap::PolicyFile>& pf) {
  if (!pf) {
    std::vector<double> uniform(static_cast<std::size_t>(ch.x.size),
                                1.0 / ch.x.size);
    return wiretap::make_identity_strategy(ch.s.size, uniform);
  }
  if (std::holds_alternative<wiretap::ShannonStrategy>(*pf))
    return std::get<wiretap::ShannonStrategy>(*pf);
  const auto& pol = std::get<wiretap::CausalPolicy>(*pf);
  if (!pol.independent_v)
    throw wiretap::validation_error(
        "simulation needs a Shannon strategy or an independent-V policy");
  wiretap::ShannonStrategy st;
  st.u = wiretap::Alphabet{"U", pol.v.size};
  st.s_size = pol.s_size;
  st.v_size = pol.v.size;
  st.x_size = pol.x_size;
  st.p_u.assign(pol.v_slice(0).begin(), pol.v_slice(0).end());
  st.v_of_us.resize(static_cast<std::size_t>(pol.v.size) * pol.s_size);
  for (int u = 0; u < pol.v.size; ++u)
    for (int s = 0; s < pol.s_size; ++s)
      st.v_of_us[static_cast<std::size_t>(u) * pol.s_size + s] = u;
  st.p_x_given_vs = pol.p_x_given_vs;
  st.validate();
  return st;
}

wiretap::SearchConfig search_config(const Options& opt) {
  wiretap::SearchConfig cfg;
  cfg.card_v = opt.card_v;
  cfg.grid_resolution = opt.resolution;
  cfg.refine_rounds = opt.refine_rounds;
  cfg.restarts = opt.restarts;
  cfg.seed = opt.seed.value_or(0);
  if (opt.budget) cfg.eval_cap = *opt.budget;
  return cfg;
}

Json manifest_config(const Options& opt, const std::string& command) {
  Json c;
  if (!opt.channel_file.empty()) c["channel"] = opt.channel_file;
  if (opt.builtin_example_channel) c["channel"] = "builtin:example";
  if (!opt.policy_file.empty()) c["policy"] = opt.policy_file;
  if (!opt.scheme_file.empty()) c["scheme"] = opt.scheme_file;
  if (command == "bounds" || command == "optimize" || command == "example") {
    c["resolution"] = opt.resolution;
    c["card_v"] = opt.card_v;
    c["refine_rounds"] = opt.refine_rounds;
    c["restarts"] = opt.restarts;
  }
  if (opt.trials) c["trials"] = *opt.trials;
  if (opt.budget) c["budget"] = *opt.budget;
  c["workers"] = opt.workers;
  c["format"] = opt.format;
  return c;
}

Json cmd_bounds(const Options& opt) {
  const auto ch = resolve_channel(opt);
  const auto pf = resolve_policy(opt);
  Json report;
  if (pf) {
    Json at;
    if (std::holds_alternative<wiretap::CausalPolicy>(*pf)) {
      const auto& pol = std::get<wiretap::CausalPolicy>(*pf);
      at["r_csi_1"] = wiretap::rate_csi_1_value(ch, pol);
      if (pol.independent_v)
        at["r_csi_2"] = wiretap::rate_csi_2_value(ch, pol);
      else
        at["r_csi_2"] = nullptr;
      const auto embedded = wiretap::embed_policy(pol);
      at["liu_chen_at_embedding"] = wiretap::liu_chen_value(ch, embedded);
      const auto joint = wiretap::induce_noncausal_joint(ch, embedded);
      at["h_s_given_zu_at_embedding"] =
          joint.conditional_entropy({ch.s.name}, {ch.z.name, embedded.u.name});
    } else {
      const auto& st = std::get<wiretap::ShannonStrategy>(*pf);
      at["shannon_strategy_value"] = wiretap::shannon_strategy_value(ch, st);
      const auto collapsed = wiretap::collapse_strategy(st);
      at["collapsed_r_csi_1"] = wiretap::rate_csi_1_value(ch, collapsed);
    }
    report["at_policy"] = at;
  } else {
    const auto res =
        wiretap::maximize_lower_bound(ch, search_config(opt), opt.workers);
    report["optimized"] = wiretap::bound_report_to_json(res.report);
    report["evaluations"] = {{"csi1", res.csi1.evaluations},
                             {"csi2", res.csi2.evaluations}};
  }
  return report;
}

Json cmd_example(const Options& opt) {
  const auto ch = wiretap::example_channel();
  const double target = 1.0 - wiretap::binary_entropy(0.1);
  const double csi1_target = 1.0 - 2.0 * wiretap::binary_entropy(0.1);
  const auto uniform = wiretap::make_independent_policy(
      2, 2, {0.5, 0.5}, {{{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}});
  Json rows = Json::array();
  auto row = [&rows](const std::string& name, double value, double expected,
                     double tol) {
    const bool pass = std::abs(value - expected) <= tol;
    rows.push_back(Json{{"name", name},
                        {"value", value},
                        {"expected", expected},
                        {"tolerance", tol},
                        {"pass", pass}});
    return pass;
  };
  bool all = true;
  all &= row("h_s", wiretap::entropy_of_table(ch.p_s), target, 1e-9);
  all &= row("r_csi_2_at_uniform_x", wiretap::rate_csi_2_value(ch, uniform), target, 1e-9);
  all &= row("r_csi_1_at_uniform_x", wiretap::rate_csi_1_value(ch, uniform),
             csi1_target, 1e-9);
  wiretap::SearchConfig cfg;
  cfg.card_v = 2;
  cfg.grid_resolution = 8;
  cfg.refine_rounds = 1;
  cfg.restarts = 1;
  cfg.seed = opt.seed.value_or(0);
  const auto search =
      wiretap::detail::BranchSearch(ch, cfg, wiretap::Objective::Csi1, false, opt.workers)
          .run();
  const bool separated = search.value <= target - 1e-3;
  rows.push_back(Json{{"name", "csi1_grid_max_below_csi2"},
                      {"value", search.value},
                      {"expected", Json("< " + std::to_string(target - 1e-3))},
                      {"pass", separated}});
  all &= separated;
  Json report;
  report["rows"] = rows;
  report["pass"] = all;
  return report;
}

Json cmd_simulate(const Options& opt) {
  const auto ch = resolve_channel(opt);
  if (opt.scheme_file.empty())
    throw wiretap::validation_error("a scheme file is required (--scheme)");
  auto cfg = wiretap::load_scheme(opt.scheme_file);
  if (opt.seed) cfg.master_seed = *opt.seed;
  const auto st = resolve_strategy(ch, resolve_policy(opt));
  const std::uint64_t trials = opt.trials.value_or(cfg.trials);
  if (trials == 0)
    throw wiretap::validation_error("trials must be positive (--trials or scheme file)");
  wiretap::SessionTrace trace;
  const auto rep = wiretap::run_session(ch, cfg, st, trials, opt.workers,
                                        opt.trace ? &trace : nullptr);
  Json report;
  report["scheme"] = wiretap::scheme_to_json(cfg);
  report["simulation"] = wiretap::simulation_report_to_json(rep);
  if (opt.trace) report["trace"] = wiretap::trace_to_json(trace);
  return report;
}

Json cmd_oracle(const Options& opt) {
  const auto ch = resolve_channel(opt);
  if (opt.scheme_file.empty())
    throw wiretap::validation_error("a scheme file is required (--scheme)");
  auto cfg = wiretap::load_scheme(opt.scheme_file);
  if (opt.seed) cfg.master_seed = *opt.seed;
  const auto st = resolve_strategy(ch, resolve_policy(opt));
  wiretap::EnumerationBudget budget;
  if (opt.budget) budget.max_terms = *opt.budget;
  const auto rep = wiretap::oracle_report(ch, cfg, st, budget);
  Json report;
  report["scheme"] = wiretap::scheme_to_json(cfg);
  report["oracle"] = wiretap::oracle_report_to_json(rep);
  return report;
}

const char* tightness_name(wiretap::Tightness t) {
  switch (t) {
    case wiretap::Tightness::CaseI: return "case_i";
    case wiretap::Tightness::CaseII: return "case_ii";
    case wiretap::Tightness::Unknown: return "unknown";
  }
  return "unknown";
}

Json cmd_optimize(const Options& opt) {
  const auto ch = resolve_channel(opt);
  const auto cfg = search_config(opt);
  const auto res = wiretap::maximize_lower_bound(ch, cfg, opt.workers);
  Json report;
  report["card_v"] = res.csi1.witness.v.size;
  report["bounds"] = wiretap::bound_report_to_json(res.report);
  report["evaluations"] = {{"csi1", res.csi1.evaluations},
                           {"csi2", res.csi2.evaluations}};

  Json special;
  const bool state_indep = ch.state_independent();
  special["state_independent"] = state_indep;
  if (state_indep) {
    const auto mc = wiretap::state_independent_slice(ch);
    const int cert_res = std::min(opt.resolution * 8, 64);
    const auto y_cert = wiretap::check_less_noisy(mc, cert_res);
    wiretap::MarginalChannel swapped = mc;
    std::swap(swapped.y_size, swapped.z_size);
    swapped.p_yz_given_x.assign(mc.p_yz_given_x.size(), 0.0);
    for (int x = 0; x < mc.x_size; ++x)
      for (int y = 0; y < mc.y_size; ++y)
        for (int z = 0; z < mc.z_size; ++z)
          swapped.p_yz_given_x[(static_cast<std::size_t>(x) * mc.z_size + z) * mc.y_size + y] =
              mc.slice(x)[y * mc.z_size + z];
    const auto z_cert = wiretap::check_less_noisy(swapped, cert_res);
    special["y_less_noisy_certificate"] = y_cert.concave_on_grid;
    special["z_less_noisy_certificate"] = z_cert.concave_on_grid;
    if (y_cert.concave_on_grid) {
      const auto thm3 = wiretap::less_noisy_capacity(ch, opt.resolution, opt.workers);
      special["thm3"] = {{"value", thm3.value}, {"evaluations", thm3.evaluations}};
      const auto yam = wiretap::maximize_special_case(ch, wiretap::SpecialCase::Yamamoto,
                                                      opt.resolution, opt.workers);
      special["yamamoto"] = {{"value", yam.value}, {"evaluations", yam.evaluations}};
    }
    if (z_cert.concave_on_grid) {
      const auto zln = wiretap::z_less_noisy_capacity(ch, opt.resolution, opt.workers);
      special["z_less_noisy"] = {{"value", zln.value}, {"evaluations", zln.evaluations}};
    }
  }
  report["special_cases"] = special;

  const auto verdict =
      wiretap::tightness_classify(ch, res.report, opt.resolution, opt.workers);
  report["tightness"] = tightness_name(verdict);
  if (verdict != wiretap::Tightness::Unknown)
    report["lower_bound_flag"] = "capacity (grid-certified)";
  return report;
}

void add_common(CLI::App* cmd, Options& opt, bool wants_channel, bool wants_scheme,
                bool wants_search) {
  if (wants_channel) {
    cmd->add_option("--channel", opt.channel_file, "channel file (JSON)");
    cmd->add_flag("--example-channel", opt.builtin_example_channel,
                  "use the built-in two-state binary example channel");
    cmd->add_option("--policy", opt.policy_file, "policy/strategy file (JSON)");
  }
  if (wants_scheme) {
    cmd->add_option("--scheme", opt.scheme_file, "scheme configuration file (JSON)");
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials (overrides scheme file)");
    cmd->add_flag("--trace", opt.trace, "embed the first trial's full trace");
  }
  if (wants_search) {
    cmd->add_option("--resolution", opt.resolution, "simplex grid resolution")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--card-v", opt.card_v, "auxiliary cardinality (0 = |X||S|+1)");
    cmd->add_option("--refine", opt.refine_rounds, "refinement rounds");
    cmd->add_option("--restarts", opt.restarts, "stochastic ascent restarts per grid point");
  }
  cmd->add_option("--seed", opt.seed, "master seed (overrides file seeds)");
  cmd->add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--format", opt.format, "output format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--budget", opt.budget, "evaluation/enumeration budget override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wiretap: secrecy-rate bounds, block-Markov key-recycling "
               "simulation and exact oracles for channels with causal state"};
  app.require_subcommand(1);
  Options opt;
  auto* bounds = app.add_subcommand("bounds", "evaluate bound expressions");
  add_common(bounds, opt, true, false, true);
  auto* example = app.add_subcommand("example", "reproduce the built-in example");
  add_common(example, opt, false, false, true);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo scheme simulation");
  add_common(simulate, opt, true, true, false);
  auto* oracle = app.add_subcommand("oracle", "exact enumeration oracle");
  add_common(oracle, opt, true, true, false);
  auto* optimize = app.add_subcommand("optimize", "maximize the lower bound");
  add_common(optimize, opt, true, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    Json report;
    std::string command;
    if (bounds->parsed()) {
      command = "bounds";
      report = cmd_bounds(opt);
    } else if (example->parsed()) {
      command = "example";
      report = cmd_example(opt);
    } else if (simulate->parsed()) {
      command = "simulate";
      report = cmd_simulate(opt);
    } else if (oracle->parsed()) {
      command = "oracle";
      report = cmd_oracle(opt);
    } else {
      command = "optimize";
      report = cmd_optimize(opt);
    }
    wiretap::RunManifest manifest;
    manifest.command = command;
    manifest.config = manifest_config(opt, command);
    manifest.seed = opt.seed.value_or(0);
    manifest.duration_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  started)
            .count();
    if (opt.format == "csv") {
      std::cout << wiretap::to_csv(report);
    } else {
      std::cout << wiretap::document(manifest, report).dump(2) << "\n";
    }
    return 0;
  } catch (const wiretap::resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const wiretap::consistency_error& e) {
    std::cerr << "internal consistency fault: " << e.what() << "\n";
    return 4;
  } catch (const wiretap::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const wiretap::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  }
}
