// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qmetro/error.hpp"
#include "qmetro/harness/config.hpp"
#include "qmetro/harness/runner.hpp"

namespace {

using qmetro::ErrorKind;
using namespace qmetro::harness;

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return kExitConfig;
    case ErrorKind::resource: return kExitResource;
    default: return kExitTolerance;
  }
}

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<double> tol;
  std::optional<double> epsilon;
};

void add_options(CLI::App* sub, Options& opts) {
  sub->add_option("--config", opts.config, "INI run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", opts.out, "CSV output path (default: stdout)");
  sub->add_option("--tol", opts.tol, "tolerance override");
  sub->add_option("--epsilon", opts.epsilon, "Fock truncation tail-mass override");
}

int run(Command command, const Options& opts) {
  RunConfig cfg = load_config(opts.config, command);
  apply_overrides(cfg, opts.tol, opts.epsilon);

  std::vector<ResultRow> rows;
  std::string header;
  switch (command) {
    case Command::bound: rows.push_back(run_bound(cfg)); break;
    case Command::validate: rows.push_back(run_validate(cfg)); break;
    case Command::sweep: rows = run_sweep(cfg); break;
    case Command::compare:
      rows = run_compare(cfg);
      header = compare_header(cfg);
      break;
  }

  const std::optional<std::string> path = opts.out ? opts.out : cfg.output;
  const bool verdicts = command == Command::compare;
  if (path) {
    std::ofstream file(*path, std::ios::binary);
    if (!file) {
      std::cerr << "qmetro: cannot write '" << *path << "'\n";
      return kExitConfig;
    }
    write_csv(file, rows, verdicts, header);
  } else {
    write_csv(std::cout, rows, verdicts, header);
  }
  for (const auto& r : rows) {
    if (!r.message.empty()) {
      std::cerr << "qmetro: point " << r.point << ": " << r.status << ": "
                << r.message << '\n';
    }
  }
  return exit_code(rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Fisher information and Cramer-Rao bounds for "
               "multi-mode optical probes"};
  app.require_subcommand(1);

  Options opts;
  struct Entry {
    Command command;
    const char* help;
  };
  const Entry entries[] = {
      {Command::bound, "closed-form per-phase bound for one family"},
      {Command::validate, "closed form checked against the Fock-space oracle"},
      {Command::sweep, "bounds along a parameter axis"},
      {Command::compare, "two families at equal mean photon number"},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(to_string(e.command), e.help);
    add_options(sub, opts);
    subs.emplace_back(sub, e.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    for (const auto& [sub, command] : subs) {
      if (sub->parsed()) return run(command, opts);
    }
  } catch (const qmetro::Error& e) {
    std::cerr << "qmetro: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_for(e.kind());
  }
  return kExitConfig;
}
