#include <iostream>
#include <malloc.h>
#include <string>

#include "CLI11.hpp"
#include "regcrit/cli.hpp"
#include "regcrit/fft.hpp"

int main(int argc, char** argv) {
  // Field buffers are ~0.5 MB each and churn every step; keep them on the
  // heap instead of paying an mmap and page faults per allocation.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
  CLI::App app{"Pseudo-spectral Navier-Stokes runs with regularity-criterion monitors"};
  app.require_subcommand(1);

  std::string config;
  std::string run_dir;
  auto* simulate = app.add_subcommand("simulate", "integrate a config and write a run directory");
  simulate->add_option("config", config, "config file")->required();
  auto* calibrate = app.add_subcommand("calibrate", "estimate C_GN and C(p, mu) on a corpus");
  calibrate->add_option("config", config, "config file")->required();
  auto* verify = app.add_subcommand("verify", "re-check a run directory");
  verify->add_option("rundir", run_dir, "run directory")->required();
  auto* report = app.add_subcommand("report", "write plot-ready series for a run directory");
  report->add_option("rundir", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? regcrit::exit_success : regcrit::exit_usage;
  }

  try {
    regcrit::fft::configure_threads_from_env();
  } catch (const std::exception& e) {
    std::cerr << "REGCRIT_THREADS: " << e.what() << "\n";
    return regcrit::exit_usage;
  }

  if (*simulate) return regcrit::cmd_simulate(config, std::cout, std::cerr);
  if (*calibrate) return regcrit::cmd_calibrate(config, std::cout, std::cerr);
  if (*verify) return regcrit::cmd_verify(run_dir, std::cout, std::cerr);
  return regcrit::cmd_report(run_dir, std::cout, std::cerr);
}
