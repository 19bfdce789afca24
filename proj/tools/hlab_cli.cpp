#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "hlab/errors.hpp"
#include "hlab/scenario.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int workers = 1;
  bool negative_control = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Scenario JSON file")->required();
  sub->add_option("--out", f.out, "Report directory")->capture_default_str();
  sub->add_option("--seed", f.seed, "Overrides the scenario seed");
  sub->add_option("--workers", f.workers, "Parallel sweep workers")->check(CLI::PositiveNumber);
  sub->add_flag("--negative-control", f.negative_control, "Scale every right-hand side by 0.5");
}

int run(const std::string& command, const Flags& f) {
  hlab::Scenario s;
  try {
    s = hlab::load_config(f.config);
  } catch (const hlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return hlab::kExitConfig;
  } catch (const hlab::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return hlab::kExitIo;
  } catch (const hlab::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return hlab::kExitConfig;
  }
  if (f.seed) s.seed = *f.seed;

  if (command == "sweep") {
    hlab::SweepOptions so;
    so.out_dir = f.out;
    so.workers = f.workers;
    so.negative_control = f.negative_control;
    try {
      const hlab::SweepResult r = hlab::sweep(s, so);
      std::cout << "sweep: " << r.rows << " rows written to " << f.out << "/sweep.csv\n";
      return r.exit_code;
    } catch (const hlab::ConfigError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return hlab::kExitConfig;
    } catch (const hlab::IoError& e) {
      std::cerr << "I/O error: " << e.what() << "\n";
      return hlab::kExitIo;
    }
  }

  hlab::RunOptions ro;
  ro.out_dir = f.out;
  ro.negative_control = f.negative_control;
  const hlab::RunResult r = hlab::run_scenario(s, hlab::parse_command(command), ro);
  std::cout << r.summary;
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted porous medium solver and Harnack estimate verifier"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  for (const char* name :
       {"solve", "check-identities", "check-estimate", "check-harnack", "sweep", "report"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_flags(sub, flags);
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hlab::kExitConfig;
  }
  return run(chosen, flags);
}
