// Copyright 2026 The Trustware Authors
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
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "trustware/node.hpp"
#include "trustware/sim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAssertion = 2;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

int manufacturer_serve(const std::string& config_path, const std::vector<std::string>& sets) {
  const auto cfg = trustware::load_manufacturer_config(config_path, sets);
  trustware::SystemClock clock;
  auto node = trustware::make_manufacturer_node(cfg, clock, entropy_seed());
  trustware::HttpHost host(*node->service, cfg.host, cfg.port);
  std::cerr << "manufacturer " << cfg.name << " (" << cfg.url << ") listening on " << cfg.host << ":"
            << host.port() << "\n";
  wait_for_signal();
  host.stop();
  std::cerr << "manufacturer " << cfg.name << " stopped\n";
  return kExitOk;
}

int manufacturer_provision(const std::string& config_path, const std::vector<std::string>& sets, int count,
                           const std::string& scope) {
  const auto cfg = trustware::load_manufacturer_config(config_path, sets);
  if (cfg.journal.empty()) {
    throw trustware::Error(trustware::Errc::ConfigInvalid,
                           "manufacturer.journal: required to provision devices offline");
  }
  trustware::SystemClock clock;
  auto node = trustware::make_manufacturer_node(cfg, clock, entropy_seed());
  trustware::Rng rng(entropy_seed());
  std::vector<trustware::sim::EmulatedDevice> roster;
  for (int i = 0; i < count; ++i) {
    const auto rec = node->server->provision_device(rng, clock.now());
    roster.push_back({rec.device_id, rec.secret, cfg.url, 0, trustware::sim::DeviceBehavior::Honest, scope});
  }
  std::cout << trustware::sim::format_roster(roster);
  return kExitOk;
}

int manufacturer_info(const std::string& config_path, const std::vector<std::string>& sets) {
  const auto cfg = trustware::load_manufacturer_config(config_path, sets);
  const auto key = trustware::load_signing_key(cfg.key_file);
  trustware::ManufacturerRegistry registry;
  registry.add(trustware::ManufacturerName::parse(cfg.name), key.public_key());
  std::cout << registry.to_text();
  return kExitOk;
}

int manufacturer_keygen(const std::string& config_path, const std::vector<std::string>& sets) {
  const auto cfg = trustware::load_manufacturer_config(config_path, sets);
  trustware::Rng rng(entropy_seed());
  trustware::write_signing_key(cfg.key_file, rng);
  std::cerr << "wrote " << cfg.key_file.string() << "\n";
  return manufacturer_info(config_path, sets);
}

int rp_serve(const std::string& config_path, const std::vector<std::string>& sets) {
  const auto cfg = trustware::load_relying_party_config(config_path, sets);
  trustware::SystemClock clock;
  auto node = trustware::make_relying_party_node(cfg, clock, entropy_seed());
  trustware::HttpHost host(*node->service, cfg.host, cfg.port);
  std::cerr << "relying party " << cfg.url << " listening on " << cfg.host << ":" << host.port() << " ("
            << node->rp->registry().size() << " trusted manufacturers)\n";
  wait_for_signal();
  host.stop();
  std::cerr << "relying party stopped\n";
  return kExitOk;
}

struct SimRunArgs {
  std::string scenario;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "jsonlines";
  std::string mode;
  std::string transport;
  std::vector<std::string> sets;
};

int sim_run(const SimRunArgs& args) {
  std::string text;
  if (!args.scenario.empty()) {
    auto builtin = trustware::sim::builtin_scenario(args.scenario);
    if (!builtin) {
      throw trustware::Error(trustware::Errc::ConfigInvalid, "unknown scenario '" + args.scenario + "'");
    }
    text = *builtin;
  } else {
    std::ifstream in(args.config);
    if (!in) throw trustware::Error(trustware::Errc::ConfigInvalid, "cannot read " + args.config);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }

  std::vector<std::string> overrides = args.sets;
  if (args.seed) overrides.push_back("scenario.seed=" + std::to_string(*args.seed));
  if (!args.mode.empty()) overrides.push_back("scenario.delivery_mode=" + args.mode);
  if (!args.transport.empty()) overrides.push_back("scenario.transport=" + args.transport);
  const auto cfg = trustware::sim::parse_scenario(text, overrides);

  const auto format = trustware::sim::parse_report_format(args.format);
  if (!format) throw trustware::Error(trustware::Errc::ConfigInvalid, "unknown format '" + args.format + "'");

  const auto report = trustware::sim::run_scenario(cfg);
  const auto bytes = trustware::sim::report_emit(report, *format);
  if (args.out.empty() || args.out == "-") {
    std::cout << bytes;
  } else {
    std::ofstream out(args.out, std::ios::binary);
    out << bytes;
    if (!out) throw trustware::Error(trustware::Errc::StorageFailure, "cannot write " + args.out);
    std::cerr << trustware::sim::report_emit(report, trustware::sim::ReportFormat::SummaryText);
  }
  return report.passed() ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trustware device-vouched client legitimacy: services and scenario simulator", "trustware"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> sets;
  int count = 1;
  std::string scope = "default";

  auto* mfr = app.add_subcommand("manufacturer", "Manufacturer authentication server");
  mfr->require_subcommand(1);
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "Manufacturer or relying-party config file")->required();
    cmd->add_option("--set", sets, "Override a config value: section.key=value");
  };
  auto* mfr_serve = mfr->add_subcommand("serve", "Serve POST /verify and POST /provision");
  add_config(mfr_serve);
  auto* mfr_provision = mfr->add_subcommand("provision", "Mint devices into the journal; prints roster lines");
  add_config(mfr_provision);
  mfr_provision->add_option("--count", count, "Number of devices")->check(CLI::Range(1, 10000));
  mfr_provision->add_option("--scope", scope, "Scope written to the roster lines");
  auto* mfr_info = mfr->add_subcommand("info", "Print the relying-party registry line for this manufacturer");
  add_config(mfr_info);
  auto* mfr_keygen = mfr->add_subcommand("keygen", "Create the signing key file");
  add_config(mfr_keygen);

  auto* rp = app.add_subcommand("rp", "Relying party");
  rp->require_subcommand(1);
  auto* rp_serve_cmd = rp->add_subcommand("serve", "Serve POST /session, POST /voucher, GET /decision");
  add_config(rp_serve_cmd);

  auto* sim = app.add_subcommand("sim", "Scenario simulator");
  sim->require_subcommand(1);
  SimRunArgs run_args;
  std::uint64_t seed = 0;
  auto* sim_run_cmd = sim->add_subcommand("run", "Run a scenario under the virtual clock");
  auto* scenario_opt = sim_run_cmd->add_option("--scenario", run_args.scenario, "Built-in scenario name");
  auto* config_opt = sim_run_cmd->add_option("--config", run_args.config, "Scenario file");
  scenario_opt->excludes(config_opt);
  auto* seed_opt = sim_run_cmd->add_option("--seed", seed, "Seed for the run");
  sim_run_cmd->add_option("--out", run_args.out, "Report destination (default stdout)");
  sim_run_cmd->add_option("--format", run_args.format, "jsonlines or summary-text")
      ->check(CLI::IsMember({"jsonlines", "summary-text"}));
  sim_run_cmd->add_option("--mode", run_args.mode, "Delivery mode: relayed or direct")
      ->check(CLI::IsMember({"relayed", "direct"}));
  sim_run_cmd->add_option("--transport", run_args.transport, "http or inprocess")
      ->check(CLI::IsMember({"http", "inprocess"}));
  sim_run_cmd->add_option("--set", run_args.sets, "Override a scenario value: section.key=value");
  auto* sim_list = sim->add_subcommand("list", "List built-in scenarios");
  std::string show_name;
  auto* sim_show = sim->add_subcommand("show", "Print a built-in scenario file");
  sim_show->add_option("name", show_name, "Scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (mfr_serve->parsed()) return manufacturer_serve(config, sets);
    if (mfr_provision->parsed()) return manufacturer_provision(config, sets, count, scope);
    if (mfr_info->parsed()) return manufacturer_info(config, sets);
    if (mfr_keygen->parsed()) return manufacturer_keygen(config, sets);
    if (rp_serve_cmd->parsed()) return rp_serve(config, sets);
    if (sim_list->parsed()) {
      for (const auto& name : trustware::sim::builtin_scenario_names()) std::cout << name << "\n";
      return kExitOk;
    }
    if (sim_show->parsed()) {
      auto text = trustware::sim::builtin_scenario(show_name);
      if (!text) {
        std::cerr << "unknown scenario '" << show_name << "'\n";
        return kExitConfig;
      }
      std::cout << text->substr(text->find_first_not_of('\n'));
      return kExitOk;
    }
    if (sim_run_cmd->parsed()) {
      if (run_args.scenario.empty() && run_args.config.empty()) {
        std::cerr << "sim run: one of --scenario or --config is required\n";
        return kExitConfig;
      }
      if (seed_opt->count() > 0) run_args.seed = seed;
      return sim_run(run_args);
    }
  } catch (const trustware::Error& e) {
    std::cerr << "trustware: " << e.what() << "\n";
    return e.code() == trustware::Errc::ScenarioDeadlock ? kExitAssertion : kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "trustware: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
