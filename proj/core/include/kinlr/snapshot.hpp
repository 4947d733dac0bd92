#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "kinlr/lowrank.hpp"
#include "kinlr/types.hpp"

namespace kinlr {

// Text format shared by every file the project writes: a line "rows cols",
// then one row per line with whitespace-separated 17-significant-digit values.

/// %.17g rendering; parse_double is its exact inverse for finite values.
std::string format_double(double value);
double parse_double(std::string_view text);

void write_matrix(std::ostream& os, const Matrix& M);
Matrix read_matrix(std::istream& is);

/// "kinlr-lrstate v1 Nx Nv r" followed by the U, S and V blocks separated by
/// single blank lines. The grid is not part of the file and is supplied on read.
void write_lrstate(std::ostream& os, const LowRankState& s);
void write_lrstate(const std::filesystem::path& path, const LowRankState& s);
LowRankState read_lrstate(std::istream& is, const PhaseGrid& grids);
LowRankState read_lrstate(const std::filesystem::path& path, const PhaseGrid& grids);

/// Reads only the factors, for consumers that do not know the grid.
struct RawLrState {
  Matrix U;
  Matrix S;
  Matrix V;
};
RawLrState read_lrstate_raw(std::istream& is);
RawLrState read_lrstate_raw(const std::filesystem::path& path);

}  // namespace kinlr
