#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "kinlr/lowrank.hpp"
#include "kinlr/scheme.hpp"

namespace kinlr {

struct DiagRecord {
  double t = 0.0;
  double mass = 0.0;
  double momentum = 0.0;
  double e_kin = 0.0;
  double e_ele = 0.0;  ///< 0.5 dx sum E^2
  double e_tot = 0.0;
  Index rank = 0;
  std::vector<double> sv;  ///< descending; rank == sv.size()

  friend bool operator==(const DiagRecord&, const DiagRecord&) = default;
};

/// Reductions in factored form; sv are the singular values of S.
DiagRecord observe(const LowRankState& s, double t, const SchemeConfig& scheme = {});

/// Reductions of a full matrix; sv is the weighted spectrum of F above
/// 1e-13 of its largest value.
DiagRecord observe(const Matrix& F, const PhaseGrid& grids, double t,
                   const SchemeConfig& scheme = {});

/// Header "t,mass,momentum,e_kin,e_ele,e_tot,rank,sv0,...,sv{K-1}" with K the
/// largest rank present; shorter rows are padded with empty fields.
void write_csv(std::ostream& os, const std::vector<DiagRecord>& records);
void write_csv(const std::filesystem::path& path, const std::vector<DiagRecord>& records);

std::vector<DiagRecord> read_csv(std::istream& is);
std::vector<DiagRecord> read_csv(const std::filesystem::path& path);

}  // namespace kinlr
