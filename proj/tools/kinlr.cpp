#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "kinlr/config.hpp"
#include "kinlr/driver.hpp"
#include "kinlr/errors.hpp"
#include "kinlr/snapshot.hpp"

namespace {

void apply_thread_cap() {
  const char* env = std::getenv("KINLR_THREADS");
  if (!env || !*env) return;
  const int n = std::atoi(env);
  if (n < 1) throw kinlr::ConfigError("KINLR_THREADS must be a positive integer");
  Eigen::setNbThreads(n);
}

const std::map<std::string, kinlr::RankNorm> kNorms{{"max", kinlr::RankNorm::max},
                                                    {"fro", kinlr::RankNorm::fro}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank and full-grid solvers for the 1D1V Vlasov-Poisson system"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "Run a configured simulation");
  run_cmd->add_option("config", run_config, "key = value configuration file")
      ->required()
      ->check(CLI::ExistingFile);

  std::string cmp_a, cmp_b;
  kinlr::RankNorm cmp_norm = kinlr::RankNorm::fro;
  double cmp_tol = -1.0;
  auto* cmp_cmd = app.add_subcommand("compare", "Relative differences between two runs");
  cmp_cmd->add_option("a", cmp_a, "snapshot directory or file")->required();
  cmp_cmd->add_option("b", cmp_b, "reference snapshot directory or file")->required();
  cmp_cmd->add_option("--norm", cmp_norm, "fro or max")
      ->transform(CLI::CheckedTransformer(kNorms, CLI::ignore_case));
  cmp_cmd->add_option("--tol", cmp_tol, "exit with status 2 when the maximum difference exceeds this");

  std::string scan_config, scan_out;
  double scan_tol = 1e-2;
  kinlr::RankNorm scan_norm = kinlr::RankNorm::max;
  auto* scan_cmd = app.add_subcommand("rankscan", "Rank profile of the full-grid solution");
  scan_cmd->add_option("config", scan_config, "key = value configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  scan_cmd->add_option("--tol", scan_tol, "relative accuracy")->check(CLI::NonNegativeNumber);
  scan_cmd->add_option("--norm", scan_norm, "max or fro")
      ->transform(CLI::CheckedTransformer(kNorms, CLI::ignore_case));
  scan_cmd->add_option("--out", scan_out, "output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_thread_cap();
    if (*run_cmd) {
      const kinlr::RunConfig cfg = kinlr::load_config(run_config);
      const kinlr::RunOutput out = kinlr::run(cfg);
      const kinlr::DiagRecord& last = out.records.back();
      std::cout << kinlr::integrator_name(cfg.integrator) << ": " << out.records.size() - 1
                << " steps, t = " << kinlr::format_double(last.t) << ", rank " << last.rank
                << ", mass " << kinlr::format_double(last.mass) << '\n';
    } else if (*cmp_cmd) {
      const kinlr::CompareReport r = kinlr::compare(cmp_a, cmp_b, cmp_norm);
      for (std::size_t j = 0; j < r.times.size(); ++j) {
        std::cout << "t = " << kinlr::format_double(r.times[j])
                  << "  rel_diff = " << kinlr::format_double(r.rel_diff[j]) << '\n';
      }
      std::cout << "max rel_diff = " << kinlr::format_double(r.max_diff) << '\n'
                << "final rel_diff = " << kinlr::format_double(r.final_diff) << '\n';
      if (cmp_tol >= 0.0 && r.max_diff > cmp_tol) return 2;
    } else if (*scan_cmd) {
      const kinlr::RunConfig cfg = kinlr::load_config(scan_config);
      if (scan_out.empty()) {
        kinlr::rankscan(cfg, scan_tol, scan_norm, std::cout);
      } else {
        std::ofstream os(scan_out);
        if (!os) throw kinlr::IoError("cannot write " + scan_out);
        kinlr::rankscan(cfg, scan_tol, scan_norm, os);
      }
    }
  } catch (const kinlr::Error& e) {
    std::cerr << "kinlr: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "kinlr: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
