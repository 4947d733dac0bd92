#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "kinlr/config.hpp"
#include "kinlr/diagnostics.hpp"
#include "kinlr/reference.hpp"

namespace kinlr {

struct RunOutput {
  std::vector<DiagRecord> records;   ///< t = 0 and every step
  std::optional<LowRankState> state;  ///< final state of a low-rank run
  Matrix dense;                       ///< final state of a dense run
};

/// Advances the configured integrator for nsteps() steps. Snapshots are
/// written when out_snap_dir is set; no CSV is written. A step-size failure
/// is rethrown with the offending step index.
RunOutput execute(const RunConfig& cfg);

/// execute() followed by writing cfg.out_csv.
RunOutput run(const RunConfig& cfg);

// A snapshot directory holds "index.txt":
//   kinlr-snapshots v1 <lowrank|dense> nx nv x_a x_b v_a v_b
//   <step> <t> <file>
// with lrstate files for low-rank runs and matrix files for dense runs.

struct CompareReport {
  std::vector<double> times;
  std::vector<double> rel_diff;  ///< ||A - B|| / ||B|| per snapshot
  double max_diff = 0.0;
  double final_diff = 0.0;
};

/// Compares two snapshot directories (or two single snapshot files) in the
/// given norm. Throws ConfigError on mismatched grids or times.
CompareReport compare(const std::filesystem::path& a, const std::filesystem::path& b,
                      RankNorm norm);

/// Dense run with the counterpart method of cfg.integrator; one CSV row
/// "t,rank_f,rank_E_energy" per snapshot (every step when snapshot_every = 0).
void rankscan(const RunConfig& cfg, double tol, RankNorm norm, std::ostream& csv);

/// Full-grid method used for a given integrator by rankscan.
DenseMethod dense_counterpart(Integrator i);

}  // namespace kinlr
