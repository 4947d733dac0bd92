#include "kinlr/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "kinlr/errors.hpp"

namespace kinlr {

namespace {

constexpr const char* kLrStateMagic = "kinlr-lrstate";
constexpr const char* kLrStateVersion = "v1";

bool next_nonblank_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

Index parse_index(std::string_view text) {
  Index value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    throw IoError("malformed integer '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw IoError("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

void write_matrix(std::ostream& os, const Matrix& M) {
  os << M.rows() << ' ' << M.cols() << '\n';
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j > 0) os << ' ';
      os << format_double(M(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  std::string line;
  if (!next_nonblank_line(is, line)) throw IoError("read_matrix: missing shape line");
  const auto shape = split_ws(line);
  if (shape.size() != 2) throw IoError("read_matrix: shape line must be 'rows cols'");
  const Index rows = parse_index(shape[0]);
  const Index cols = parse_index(shape[1]);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(is, line)) throw IoError("read_matrix: truncated matrix block");
    const auto fields = split_ws(line);
    if (static_cast<Index>(fields.size()) != cols) {
      throw IoError("read_matrix: row " + std::to_string(i) + " has " +
                    std::to_string(fields.size()) + " values, expected " + std::to_string(cols));
    }
    for (Index j = 0; j < cols; ++j) M(i, j) = parse_double(fields[static_cast<std::size_t>(j)]);
  }
  return M;
}

void write_lrstate(std::ostream& os, const LowRankState& s) {
  os << kLrStateMagic << ' ' << kLrStateVersion << ' ' << s.grids().nx() << ' '
     << s.grids().nv() << ' ' << s.rank() << '\n';
  write_matrix(os, s.U());
  os << '\n';
  write_matrix(os, s.S());
  os << '\n';
  write_matrix(os, s.V());
}

void write_lrstate(const std::filesystem::path& path, const LowRankState& s) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_lrstate(os, s);
  if (!os) throw IoError("failed writing " + path.string());
}

RawLrState read_lrstate_raw(std::istream& is) {
  std::string line;
  if (!next_nonblank_line(is, line)) throw IoError("lrstate: empty input");
  const auto header = split_ws(line);
  if (header.size() != 5 || header[0] != kLrStateMagic || header[1] != kLrStateVersion) {
    throw IoError("lrstate: bad header '" + line + "'");
  }
  const Index nx = parse_index(header[2]);
  const Index nv = parse_index(header[3]);
  const Index r = parse_index(header[4]);
  RawLrState raw;
  raw.U = read_matrix(is);
  raw.S = read_matrix(is);
  raw.V = read_matrix(is);
  if (raw.U.rows() != nx || raw.U.cols() != r || raw.S.rows() != r || raw.S.cols() != r ||
      raw.V.rows() != nv || raw.V.cols() != r) {
    throw IoError("lrstate: block shapes disagree with the header");
  }
  return raw;
}

RawLrState read_lrstate_raw(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_lrstate_raw(is);
}

LowRankState read_lrstate(std::istream& is, const PhaseGrid& grids) {
  RawLrState raw = read_lrstate_raw(is);
  if (raw.U.rows() != grids.nx() || raw.V.rows() != grids.nv()) {
    throw DimensionError("lrstate: file grid sizes differ from the supplied grids");
  }
  return LowRankState(grids, std::move(raw.U), std::move(raw.S), std::move(raw.V));
}

LowRankState read_lrstate(const std::filesystem::path& path, const PhaseGrid& grids) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_lrstate(is, grids);
}

}  // namespace kinlr
