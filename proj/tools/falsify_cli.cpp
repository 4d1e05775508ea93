#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "falsify/errors.hpp"
#include "falsify/experiment.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::string config_path;
  std::optional<std::string> scenario;
  std::optional<std::size_t> m;
  std::optional<std::size_t> n;
  std::optional<std::string> theory;
  std::optional<std::size_t> max_theory_size;
  std::optional<std::string> distribution;
  std::optional<std::size_t> trials;
  std::optional<std::string> delta;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_length;
  std::optional<std::string> corpus;
  std::optional<std::size_t> threads;
  std::vector<std::string> ceiling_overrides;
  bool unsafe = false;
  std::string out;
  std::string csv;
};

void add_common(CLI::App* cmd, Options& o, bool with_scenario) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  if (with_scenario) cmd->add_option("--scenario", o.scenario, "slt | seq | uni | sweep");
  cmd->add_option("--m", o.m, "domain size");
  cmd->add_option("--n", o.n, "sample size, sequence length or tree depth");
  cmd->add_option("--theory", o.theory,
                  "comma-separated label strings (e.g. 01,10) or full|constants|singleton|indicators|all");
  cmd->add_option("--max-theory-size", o.max_theory_size, "largest theory in a sweep");
  cmd->add_option("--distribution", o.distribution, "uniform_events, labels:<bits> or masses:<p/q,...>");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials");
  cmd->add_option("--delta", o.delta, "confidence parameter, decimal or p/q");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--max-length", o.max_length, "uni corpus: all strings up to this length");
  cmd->add_option("--corpus", o.corpus, "uni corpus: comma-separated binary strings");
  cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
  cmd->add_option("--ceiling-override", o.ceiling_overrides, "KEY=VALUE raising a run budget (needs --unsafe)");
  cmd->add_flag("--unsafe", o.unsafe, "allow --ceiling-override");
  cmd->add_option("--out", o.out, "write the report here instead of stdout");
  cmd->add_option("--csv", o.csv, "also write a CSV table here");
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

json build_config(const Options& o, const std::string& default_scenario) {
  json j = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw falsify::input_error("cannot read config file " + o.config_path);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw falsify::input_error(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (o.scenario) j["scenario"] = *o.scenario;
  if (!j.contains("scenario")) j["scenario"] = default_scenario;
  if (o.m) j["domain_size"] = *o.m;
  if (o.n) j["n"] = *o.n;
  if (o.theory) {
    const auto parts = split(*o.theory);
    if (parts.size() == 1 && parts[0].find_first_not_of("01") != std::string::npos) {
      j["theory"] = parts[0];
    } else {
      j["theory"] = parts;
    }
  }
  if (o.max_theory_size) j["max_theory_size"] = *o.max_theory_size;
  if (o.distribution) {
    const std::string& d = *o.distribution;
    if (d.rfind("labels:", 0) == 0) {
      j["distribution"] = {{"labels", d.substr(7)}};
    } else if (d.rfind("masses:", 0) == 0) {
      j["distribution"] = {{"masses", split(d.substr(7))}};
    } else {
      j["distribution"] = d;
    }
  }
  if (o.trials) j["trials"] = *o.trials;
  if (o.delta) j["delta"] = *o.delta;
  if (o.seed) j["seed"] = *o.seed;
  if (o.max_length) j["max_length"] = *o.max_length;
  if (o.corpus) j["corpus"] = split(*o.corpus);
  if (o.threads) j["threads"] = *o.threads;
  if (!o.ceiling_overrides.empty()) {
    if (!o.unsafe) throw falsify::input_error("--ceiling-override refused without --unsafe");
    for (const auto& kv : o.ceiling_overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw falsify::input_error("--ceiling-override expects KEY=VALUE");
      std::size_t value = 0;
      try {
        value = std::stoull(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw falsify::input_error("--ceiling-override value must be an integer");
      }
      j["budget"][kv.substr(0, eq)] = value;
    }
  }
  return j;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.out);
  if (!out) throw falsify::input_error("cannot write " + o.out);
  out << text;
}

int finish(const Options& o, const falsify::Report& report) {
  emit(o, report.to_json().dump(2) + "\n");
  if (!o.csv.empty()) {
    std::ofstream out(o.csv);
    if (!out) throw falsify::input_error("cannot write " + o.csv);
    out << report.csv();
  }
  std::cerr << report.rows.size() << " instances, " << report.assertion_count() << " assertions, "
            << report.failure_count() << " failed\n";
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact falsifiability and capacity measures with theorem checks"};
  app.require_subcommand(1);
  Options o;
  auto* measure = app.add_subcommand("measure", "measures and checks for a single instance");
  auto* verify = app.add_subcommand("verify", "theorem verification run (any scenario)");
  auto* game = app.add_subcommand("game", "exact sequential minimax value");
  auto* sol = app.add_subcommand("sol", "Solomonoff checks over a string corpus");
  auto* desc = app.add_subcommand("describe", "dry-run plan for a config");
  add_common(measure, o, true);
  add_common(verify, o, true);
  add_common(game, o, false);
  add_common(sol, o, false);
  add_common(desc, o, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (measure->parsed()) {
      auto config = falsify::ExperimentConfig::from_json(build_config(o, "slt"));
      if (config.scenario == "sweep" || config.theory_name == "all") {
        throw falsify::input_error("measure takes a single instance; use verify for sweeps");
      }
      return finish(o, falsify::run(config));
    }
    if (verify->parsed()) return finish(o, falsify::run(falsify::ExperimentConfig::from_json(build_config(o, "sweep"))));
    if (game->parsed()) {
      json j = build_config(o, "seq");
      j["scenario"] = "seq";
      return finish(o, falsify::run_game(falsify::ExperimentConfig::from_json(j)));
    }
    if (sol->parsed()) {
      json j = build_config(o, "uni");
      j["scenario"] = "uni";
      return finish(o, falsify::run(falsify::ExperimentConfig::from_json(j)));
    }
    if (desc->parsed()) {
      emit(o, falsify::describe(falsify::ExperimentConfig::from_json(build_config(o, "sweep"))));
      return 0;
    }
  } catch (const falsify::input_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const falsify::capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
