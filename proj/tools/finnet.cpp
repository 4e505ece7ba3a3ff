// Command-line front end: run, sweep and maxm over a JSON scenario.
// Exit codes: 0 success, 2 bad input, 3 numerical failure, 1 anything else.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "finnet/scenario_io.hpp"

namespace {

void write_rows(const std::vector<finnet::CsvRow>& rows, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << finnet::format_csv(rows);
  } else {
    finnet::emit_csv(rows, out);
  }
}

std::vector<std::string> split_methods(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string m; std::getline(ss, m, ',');) {
    if (!m.empty()) out.push_back(m);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Outage probability of a reference link inside a finite wireless network"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out;
  std::string method;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  unsigned threads = 0;
  std::string var;
  std::string grid;
  double target = 0.05;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario, "scenario JSON file")->required();
    sub->add_option("--out", out, "CSV output path (stdout if omitted)");
    sub->add_option("--method", method, "auto, mgf, rlpg, mc or ppp (sweep: comma-separated list)");
    sub->add_option("--seed", seed, "Monte Carlo seed (overrides the scenario)");
    sub->add_option("--trials", trials, "Monte Carlo trials (overrides the scenario)");
    sub->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
  };

  auto* run = app.add_subcommand("run", "evaluate one scenario");
  common(run);
  auto* sw = app.add_subcommand("sweep", "evaluate the scenario over a grid of one variable");
  common(sw);
  sw->add_option("--var", var, "d, snr_db, alpha, L, M or beta_db")->required();
  sw->add_option("--grid", grid, "start:stop:step or v1,v2,...")->required();
  auto* mx = app.add_subcommand("maxm", "largest M meeting an outage target");
  common(mx);
  mx->add_option("--target", target, "outage target (default 0.05)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const finnet::ScenarioFile file = finnet::load_scenario(scenario);
    finnet::EvalOptions eo;
    if (!method.empty() && !sw->parsed()) eo.method = method;
    if (seed != 0 || run->count("--seed") || sw->count("--seed") || mx->count("--seed")) eo.seed = seed;
    if (trials != 0) eo.trials = trials;
    eo.threads = threads;
    if (run->parsed()) {
      write_rows(finnet::run_scenario(file, eo), out);
    } else if (sw->parsed()) {
      std::vector<std::string> methods = split_methods(method.empty() ? file.method : method);
      if (methods.empty()) methods.push_back(file.method);
      const auto rows = finnet::sweep(file, var, finnet::parse_grid(grid), methods, eo, threads == 0 ? 1 : threads);
      write_rows(rows, out);
    } else {
      write_rows(finnet::maxm_rows(file, target, eo), out);
    }
  } catch (const finnet::NumericFailure& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {  // ParseError, InvalidParameter
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const finnet::Unsupported& e) {
    std::fprintf(stderr, "unsupported: %s\n", e.what());
    return 2;
  } catch (const finnet::ModelInconsistency& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
