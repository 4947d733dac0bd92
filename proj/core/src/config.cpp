#include "kinlr/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <string_view>
#include <utility>

#include "kinlr/errors.hpp"
#include "kinlr/snapshot.hpp"

namespace kinlr {

namespace {

template <class E, std::size_t N>
using Names = std::array<std::pair<std::string_view, E>, N>;

constexpr Names<ProblemKind, 4> kProblems{{{"landau", ProblemKind::landau},
                                           {"two_stream", ProblemKind::two_stream},
                                           {"bump_on_tail", ProblemKind::bump_on_tail},
                                           {"free_stream", ProblemKind::free_stream}}};

constexpr Names<Integrator, 12> kIntegrators{{{"ps_lie", Integrator::ps_lie},
                                              {"ps_strang", Integrator::ps_strang},
                                              {"bug", Integrator::bug},
                                              {"bug_aug", Integrator::bug_aug},
                                              {"sat_euler", Integrator::sat_euler},
                                              {"sat_rk2", Integrator::sat_rk2},
                                              {"sat_rk4", Integrator::sat_rk4},
                                              {"sl", Integrator::sl},
                                              {"dense_euler", Integrator::dense_euler},
                                              {"dense_rk2", Integrator::dense_rk2},
                                              {"dense_rk4", Integrator::dense_rk4},
                                              {"dense_sl", Integrator::dense_sl}}};

constexpr Names<TruncationPolicy::Mode, 3> kTruncations{
    {{"fixed", TruncationPolicy::Mode::fixed_rank},
     {"tolerance", TruncationPolicy::Mode::tolerance},
     {"conservative", TruncationPolicy::Mode::conservative}}};

constexpr Names<SpaceScheme, 2> kSchemes{
    {{"upwind", SpaceScheme::upwind}, {"centered", SpaceScheme::centered}}};

constexpr Names<SubstepSolver, 2> kSubsteps{
    {{"euler", SubstepSolver::euler}, {"rk4", SubstepSolver::rk4}}};

template <class E, std::size_t N>
E lookup(const Names<E, N>& names, std::string_view key, std::string_view value) {
  for (const auto& [name, e] : names) {
    if (name == value) return e;
  }
  throw ConfigError("config: invalid value '" + std::string(value) + "' for " + std::string(key));
}

template <class E, std::size_t N>
std::string_view name_of(const Names<E, N>& names, E e) {
  for (const auto& [name, v] : names) {
    if (v == e) return name;
  }
  return "?";
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view value) {
  try {
    const double d = parse_double(value);
    if (!std::isfinite(d)) throw IoError("non-finite");
    return d;
  } catch (const IoError&) {
    throw ConfigError("config: " + std::string(key) + " expects a number, got '" +
                      std::string(value) + "'");
  }
}

template <class Int>
Int to_integer(std::string_view key, std::string_view value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config: " + std::string(key) + " expects an integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

void assign(RunConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "problem") cfg.problem.kind = lookup(kProblems, key, value);
  else if (key == "alpha") cfg.problem.alpha = to_double(key, value);
  else if (key == "k") cfg.problem.k = to_double(key, value);
  else if (key == "periods") cfg.problem.periods = to_integer<int>(key, value);
  else if (key == "nx") cfg.nx = to_integer<Index>(key, value);
  else if (key == "nv") cfg.nv = to_integer<Index>(key, value);
  else if (key == "vmax") cfg.vmax = to_double(key, value);
  else if (key == "dt") cfg.dt = to_double(key, value);
  else if (key == "tfinal") cfg.tfinal = to_double(key, value);
  else if (key == "integrator") cfg.integrator = lookup(kIntegrators, key, value);
  else if (key == "rank") cfg.rank = to_integer<Index>(key, value);
  else if (key == "truncation") cfg.truncation = lookup(kTruncations, key, value);
  else if (key == "theta") cfg.theta = to_double(key, value);
  else if (key == "r_max") cfg.r_max = to_integer<Index>(key, value);
  else if (key == "scheme") cfg.scheme = lookup(kSchemes, key, value);
  else if (key == "substep") cfg.substep = lookup(kSubsteps, key, value);
  else if (key == "snapshot_every") cfg.snapshot_every = to_integer<Index>(key, value);
  else if (key == "out_csv") cfg.out_csv = std::string(value);
  else if (key == "out_snap_dir") cfg.out_snap_dir = std::string(value);
  else if (key == "seed") cfg.seed = to_integer<std::uint64_t>(key, value);
  else throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

}  // namespace

std::string_view integrator_name(Integrator i) { return name_of(kIntegrators, i); }

bool is_dense(Integrator i) {
  return i == Integrator::dense_euler || i == Integrator::dense_rk2 ||
         i == Integrator::dense_rk4 || i == Integrator::dense_sl;
}

bool is_fixed_rank(Integrator i) {
  return i == Integrator::ps_lie || i == Integrator::ps_strang || i == Integrator::bug;
}

void RunConfig::validate() const {
  problem.validate();
  if (nx < 4 || nv < 6) throw ConfigError("config: need nx >= 4 and nv >= 6");
  if (!(vmax > 0.0)) throw ConfigError("config: vmax must be positive");
  if (!(dt > 0.0)) throw ConfigError("config: dt must be positive");
  if (!(tfinal >= 0.0)) throw ConfigError("config: tfinal must be non-negative");
  if (rank < 1) throw ConfigError("config: rank must be at least 1");
  if (!(theta >= 0.0)) throw ConfigError("config: theta must be non-negative");
  if (r_max < 1) throw ConfigError("config: r_max must be at least 1");
  if (snapshot_every < 0) throw ConfigError("config: snapshot_every must be non-negative");
  if (is_fixed_rank(integrator) && truncation != TruncationPolicy::Mode::fixed_rank) {
    throw ConfigError("config: integrator " + std::string(name_of(kIntegrators, integrator)) +
                      " keeps the rank fixed and requires truncation = fixed");
  }
  if (truncation == TruncationPolicy::Mode::fixed_rank && rank > r_max) {
    throw ConfigError("config: rank exceeds r_max");
  }
  if (truncation == TruncationPolicy::Mode::conservative && r_max < 3) {
    throw ConfigError("config: conservative truncation needs r_max >= 3");
  }
  nsteps();
}

PhaseGrid RunConfig::grids() const { return make_grids(problem, nx, nv, vmax); }

TruncationPolicy RunConfig::policy() const {
  switch (truncation) {
    case TruncationPolicy::Mode::fixed_rank: {
      TruncationPolicy p = TruncationPolicy::fixed(rank);
      p.r_max = std::max(r_max, rank);
      return p;
    }
    case TruncationPolicy::Mode::tolerance:
      return TruncationPolicy::tolerance(theta, r_max);
    case TruncationPolicy::Mode::conservative:
      break;
  }
  return TruncationPolicy::conservative(theta, r_max);
}

SchemeConfig RunConfig::scheme_config() const {
  SchemeConfig s;
  s.space_scheme = scheme;
  s.substep_solver = substep;
  s.field = problem.field_coupling();
  return s;
}

Index RunConfig::nsteps() const {
  const double ratio = tfinal / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, n)) {
    throw ConfigError("config: tfinal must be a whole multiple of dt");
  }
  return static_cast<Index>(n);
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string_view key = trim(view.substr(0, eq));
    const std::string_view value = trim(view.substr(eq + 1));
    if (!seen.emplace(key).second) throw ConfigError("config: duplicate key '" + std::string(key) + "'");
    assign(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  return parse_config(is);
}

void write_config(std::ostream& os, const RunConfig& cfg) {
  os << "problem = " << name_of(kProblems, cfg.problem.kind) << '\n'
     << "alpha = " << format_double(cfg.problem.alpha) << '\n'
     << "k = " << format_double(cfg.problem.k) << '\n'
     << "periods = " << cfg.problem.periods << '\n'
     << "nx = " << cfg.nx << '\n'
     << "nv = " << cfg.nv << '\n'
     << "vmax = " << format_double(cfg.vmax) << '\n'
     << "dt = " << format_double(cfg.dt) << '\n'
     << "tfinal = " << format_double(cfg.tfinal) << '\n'
     << "integrator = " << name_of(kIntegrators, cfg.integrator) << '\n'
     << "rank = " << cfg.rank << '\n'
     << "truncation = " << name_of(kTruncations, cfg.truncation) << '\n'
     << "theta = " << format_double(cfg.theta) << '\n'
     << "r_max = " << cfg.r_max << '\n'
     << "scheme = " << name_of(kSchemes, cfg.scheme) << '\n'
     << "substep = " << name_of(kSubsteps, cfg.substep) << '\n'
     << "snapshot_every = " << cfg.snapshot_every << '\n'
     << "out_csv = " << cfg.out_csv << '\n'
     << "out_snap_dir = " << cfg.out_snap_dir << '\n'
     << "seed = " << cfg.seed << '\n';
}

}  // namespace kinlr
