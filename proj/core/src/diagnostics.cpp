#include "kinlr/diagnostics.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "kinlr/errors.hpp"
#include "kinlr/snapshot.hpp"
#include "kinlr/vlasov.hpp"

namespace kinlr {

namespace {

constexpr const char* kFixedColumns[] = {"t", "mass", "momentum", "e_kin", "e_ele", "e_tot", "rank"};
constexpr std::size_t kNumFixed = 7;

double electric_energy(const Vector& E, const Grid1D& xg) {
  return 0.5 * xg.delta() * E.squaredNorm();
}

void fill(DiagRecord& rec, const Moments& m, double e_ele) {
  rec.mass = m.mass;
  rec.momentum = m.momentum;
  rec.e_kin = m.kinetic_energy;
  rec.e_ele = e_ele;
  rec.e_tot = rec.e_kin + rec.e_ele;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

DiagRecord observe(const LowRankState& s, double t, const SchemeConfig& scheme) {
  DiagRecord rec;
  rec.t = t;
  fill(rec, moments(s), electric_energy(field_for(s, scheme), s.grids().x()));
  Eigen::JacobiSVD<Matrix> svd(s.S());
  const Vector& sv = svd.singularValues();
  rec.sv.assign(sv.data(), sv.data() + sv.size());
  rec.rank = s.rank();
  return rec;
}

DiagRecord observe(const Matrix& F, const PhaseGrid& grids, double t, const SchemeConfig& scheme) {
  if (F.rows() != grids.nx() || F.cols() != grids.nv()) {
    throw DimensionError("observe: matrix shape differs from the grids");
  }
  DiagRecord rec;
  rec.t = t;
  fill(rec, moments(F, grids), electric_energy(field_for(F, grids, scheme), grids.x()));
  const double w = std::sqrt(grids.x().delta() * grids.v().delta());
  Eigen::BDCSVD<Matrix> svd(w * F);
  const Vector& sv = svd.singularValues();
  const double cut = sv.size() > 0 ? 1e-13 * sv(0) : 0.0;
  for (Index j = 0; j < sv.size(); ++j) {
    if (j == 0 || sv(j) > cut) rec.sv.push_back(sv(j));
  }
  rec.rank = static_cast<Index>(rec.sv.size());
  return rec;
}

void write_csv(std::ostream& os, const std::vector<DiagRecord>& records) {
  std::size_t k = 0;
  for (const DiagRecord& r : records) k = std::max(k, r.sv.size());
  for (std::size_t j = 0; j < kNumFixed; ++j) os << (j ? "," : "") << kFixedColumns[j];
  for (std::size_t j = 0; j < k; ++j) os << ",sv" << j;
  os << '\n';
  for (const DiagRecord& r : records) {
    os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.momentum)
       << ',' << format_double(r.e_kin) << ',' << format_double(r.e_ele) << ','
       << format_double(r.e_tot) << ',' << r.rank;
    for (std::size_t j = 0; j < k; ++j) {
      os << ',';
      if (j < r.sv.size()) os << format_double(r.sv[j]);
    }
    os << '\n';
  }
  if (!os) throw IoError("write_csv: stream failure");
}

void write_csv(const std::filesystem::path& path, const std::vector<DiagRecord>& records) {
  std::ofstream os(path);
  if (!os) throw IoError("write_csv: cannot open " + path.string());
  write_csv(os, records);
}

std::vector<DiagRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("read_csv: missing header");
  const std::vector<std::string> header = split_fields(line);
  if (header.size() < kNumFixed) throw IoError("read_csv: malformed header");
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string expected = j < kNumFixed ? std::string(kFixedColumns[j])
                                               : "sv" + std::to_string(j - kNumFixed);
    if (header[j] != expected) throw IoError("read_csv: unexpected column '" + header[j] + "'");
  }
  std::vector<DiagRecord> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != header.size()) {
      throw IoError("read_csv: line " + std::to_string(line_no) + " has " +
                    std::to_string(f.size()) + " fields, expected " + std::to_string(header.size()));
    }
    try {
      DiagRecord r;
      r.t = parse_double(f[0]);
      r.mass = parse_double(f[1]);
      r.momentum = parse_double(f[2]);
      r.e_kin = parse_double(f[3]);
      r.e_ele = parse_double(f[4]);
      r.e_tot = parse_double(f[5]);
      r.rank = static_cast<Index>(std::stoll(f[6]));
      for (std::size_t j = kNumFixed; j < f.size(); ++j) {
        if (f[j].empty()) break;
        r.sv.push_back(parse_double(f[j]));
      }
      out.push_back(std::move(r));
    } catch (const IoError& e) {
      throw IoError("read_csv: line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception&) {
      throw IoError("read_csv: line " + std::to_string(line_no) + ": bad number");
    }
  }
  return out;
}

std::vector<DiagRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("read_csv: cannot open " + path.string());
  return read_csv(is);
}

}  // namespace kinlr
