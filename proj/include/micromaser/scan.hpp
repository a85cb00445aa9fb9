#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"

#include "micromaser/error.hpp"
#include "micromaser/linewidth.hpp"
#include "micromaser/params.hpp"
#include "micromaser/regression.hpp"
#include "micromaser/steady_state.hpp"
#include "micromaser/uniform.hpp"

namespace micromaser {

enum class ScanVariable { GTau, Rate, Theta, ThetaBar };
enum class DistKind { Fixed, Exponential };
enum class OutputFormat { Csv, Json };

inline const char* to_string(ScanVariable v) {
  switch (v) {
    case ScanVariable::GTau: return "gtau";
    case ScanVariable::Rate: return "rate";
    case ScanVariable::Theta: return "theta";
    case ScanVariable::ThetaBar: return "theta_bar";
  }
  return "?";
}

inline ScanVariable parse_scan_variable(const std::string& s) {
  if (s == "gtau") return ScanVariable::GTau;
  if (s == "rate") return ScanVariable::Rate;
  if (s == "theta") return ScanVariable::Theta;
  if (s == "theta_bar") return ScanVariable::ThetaBar;
  fail(ErrorCode::InvalidArgument, "unknown scan variable '" + s + "' (gtau|rate|theta|theta_bar)");
}

inline DistKind parse_dist(const std::string& s) {
  if (s == "fixed") return DistKind::Fixed;
  if (s == "exp") return DistKind::Exponential;
  fail(ErrorCode::InvalidArgument, "unknown distribution '" + s + "' (fixed|exp)");
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  fail(ErrorCode::InvalidArgument, "unknown format '" + s + "' (csv|json)");
}

/// Fully resolved run description. Scans hold g (g_tau with tau = 1) or r
/// fixed and move the other; theta scans move g_tau, theta_bar scans move r.
struct ScanConfig {
  std::string command;
  double kappa = 1.0;
  double n_th = 0.0;
  double rate = 0.0;
  double g_tau = 1.0;
  DistKind dist = DistKind::Fixed;
  ScanVariable scan = ScanVariable::GTau;
  double min = 0.0;
  double max = 1.0;
  int steps = 1;
  std::size_t trunc = 0;  ///< 0 = automatic
  int nodes = 0;          ///< 0 = automatic
  std::vector<int> orders{1, 3, 7};
  std::string out;        ///< empty = stdout
  OutputFormat format = OutputFormat::Csv;
  // spectrum
  double t_max = 0.0;      ///< 0 = 4 / D_slope
  int t_steps = 101;
  double omega_max = 0.0;  ///< 0 = 5 D_slope
  int omega_steps = 201;
  // fock-resolved
  bool fig1_pair = false;
  int threads = 0;         ///< 0 = hardware concurrency

  MaserParams base_params() const {
    return dist == DistKind::Fixed ? MaserParams{kappa, n_th, rate, g_tau, FixedTime{1.0}}
                                   : MaserParams{kappa, n_th, rate, g_tau, ExponentialTime{1.0}};
  }

  void validate() const {
    require(steps >= 1, "steps must be >= 1");
    require(min < max, "scan range needs min < max");
    require(t_steps >= 2 && omega_steps >= 2, "spectrum grids need at least 2 points");
    require(t_max >= 0.0 && omega_max >= 0.0, "spectrum ranges must be >= 0");
    if (scan == ScanVariable::Theta) {
      require(dist == DistKind::Fixed, "scan variable theta needs --dist fixed");
    }
    if (scan == ScanVariable::ThetaBar) {
      require(dist == DistKind::Exponential, "scan variable theta_bar needs --dist exp");
    }
    for (int o : orders) micromaser::validate(UniformOrders{o, o - 1});
    base_params().validate();
  }

  /// Parameters at scan point i.
  MaserParams params_at(int i) const {
    const double value = steps == 1 ? min : min + (max - min) * i / (steps - 1);
    MaserParams p = base_params();
    switch (scan) {
      case ScanVariable::GTau: p.g = value; break;
      case ScanVariable::Rate: p.r = value; break;
      case ScanVariable::Theta:
        require(rate > 0.0, "theta scan needs a positive rate");
        p.g = value / std::sqrt(rate / kappa);
        break;
      case ScanVariable::ThetaBar: p.r = rate_for_theta(kappa, value, g_tau); break;
    }
    p.validate();
    return p;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["kappa"] = kappa;
    j["nth"] = n_th;
    j["rate"] = rate;
    j["g_tau"] = g_tau;
    j["dist"] = dist == DistKind::Fixed ? "fixed" : "exp";
    j["scan"] = to_string(scan);
    j["min"] = min;
    j["max"] = max;
    j["steps"] = steps;
    j["trunc"] = trunc;
    j["nodes"] = nodes;
    j["orders"] = orders;
    j["out"] = out;
    j["format"] = format == OutputFormat::Csv ? "csv" : "json";
    j["t_max"] = t_max;
    j["t_steps"] = t_steps;
    j["omega_max"] = omega_max;
    j["omega_steps"] = omega_steps;
    j["fig1_pair"] = fig1_pair;
    return j;
  }
};

/// Empty cell = undefined value; the row's status says why.
using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json metadata;
};

/// Runs f(i) for i in [0, count) on a few threads; results stay in index order.
template <class T>
std::vector<T> parallel_rows(int count, int threads, const std::function<T(int)>& f) {
  std::vector<T> out(count);
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(count, 1));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) out[i] = f(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

inline std::size_t resolve_truncation(const ScanConfig& config, const MaserParams& params) {
  return config.trunc > 0 ? config.trunc : auto_truncation(params);
}

inline PhotonStatistics resolve_statistics(const ScanConfig& config, const MaserParams& params,
                                           std::size_t N) {
  SteadyStateOptions opts;
  if (config.nodes > 0) {
    opts.averaging = TauAveraging::Quadrature;
    opts.quadrature_nodes = config.nodes;
  }
  return steady_state(params, N, opts);
}

namespace detail {

/// Row with every value cell empty and the error code as status.
inline std::vector<Cell> failed_row(std::vector<Cell> leading, std::size_t width, const Error& e) {
  leading.resize(width - 1);
  leading.push_back(std::string(to_string(e.code())));
  return leading;
}

}  // namespace detail

inline Table scan_theta(const ScanConfig& config) {
  config.validate();
  require(config.dist == DistKind::Fixed, "scan-theta needs a fixed interaction time");
  Table table;
  table.columns = {"theta", "g_tau", "n_mean", "D_main", "D_thermal", "D_cos", "D_sin",
                   "D_scully", "D_mcgowan", "D_slope", "st_ratio", "status"};
  const std::size_t width = table.columns.size();
  table.rows = parallel_rows<std::vector<Cell>>(config.steps, config.threads, [&](int i) {
    const MaserParams p = config.params_at(i);
    const double theta = p.theta();
    std::vector<Cell> row{theta, p.g};
    try {
      const std::size_t N = resolve_truncation(config, p);
      const PhotonStatistics stats = resolve_statistics(config, p, N);
      const double n_mean = mean_photon_number(stats);
      if (!(n_mean > 0.0)) {
        row.push_back(n_mean);
        row.resize(width - 1);
        row.push_back(std::string("vacuum"));
        return row;
      }
      const LinewidthBreakdown main = linewidth_main(p, stats);
      const double slope = linewidth_from_slope(build_sideband_generator(p, N), initial_sideband(stats));
      const SchawlowTownes st = schawlow_townes_ratio(p, stats, main.total);
      row.insert(row.end(), {n_mean, main.total, main.thermal, main.cos, main.sin,
                             linewidth_scully(p, stats), linewidth_mcgowan(p, stats), slope,
                             st.ratio / st.reference, std::string(theta < 1.0 ? "below_threshold" : "ok")});
      return row;
    } catch (const Error& e) {
      return detail::failed_row(row, width, e);
    }
  });
  table.metadata["config"] = config.to_json();
  return table;
}

inline constexpr double kFig1Rate = 200.0;
inline constexpr double kFig1Nth = 0.1;
inline constexpr double kFig1Thetas[] = {2.1, 2.2};  // in units of pi

inline Table fock_resolved(const ScanConfig& config) {
  config.validate();
  require(config.dist == DistKind::Fixed, "fock-resolved needs a fixed interaction time");
  std::vector<MaserParams> sets;
  if (config.fig1_pair) {
    for (double t : kFig1Thetas) {
      sets.push_back(fixed_maser(config.kappa, kFig1Nth, kFig1Rate,
                                 t * std::numbers::pi / std::sqrt(kFig1Rate / config.kappa)));
    }
  } else {
    sets.push_back(config.base_params());
  }
  Table table;
  table.columns = {"theta", "n", "p_n", "w_main", "w_main_cos", "w_main_sin", "w_mcgowan"};
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (const MaserParams& p : sets) {
    const std::size_t N = resolve_truncation(config, p);
    const PhotonStatistics stats = resolve_statistics(config, p, N);
    const FockResolvedWeights w = fock_resolved_weights(p, stats);
    for (std::size_t n = 0; n < w.p.size(); ++n) {
      table.rows.push_back({p.theta(), static_cast<long long>(n), w.p[n], w.main[n], w.main_cos[n],
                            w.main_sin[n], w.mcgowan[n]});
    }
    nlohmann::ordered_json s;
    s["theta"] = p.theta();
    s["rate"] = p.r;
    s["nth"] = p.n_th;
    s["g_tau"] = p.g;
    s["trunc"] = N;
    s["n_mean"] = mean_photon_number(stats);
    if (mean_photon_number(stats) > 0.0) s["D_main"] = linewidth_main(p, stats).total;
    summary.push_back(s);
  }
  table.metadata["config"] = config.to_json();
  table.metadata["sets"] = summary;
  return table;
}

inline Table spectrum(const ScanConfig& config) {
  config.validate();
  MaserParams p = config.base_params();
  const std::size_t N = resolve_truncation(config, p);
  const PhotonStatistics stats = resolve_statistics(config, p, N);
  const SidebandGenerator gen =
      config.nodes > 0 ? build_sideband_generator(p, N, PumpAverage(p, quadrature_nodes(p.tau_dist, config.nodes)))
                       : build_sideband_generator(p, N);
  const std::vector<double> v0 = initial_sideband(stats);
  const double slope = linewidth_from_slope(gen, v0);
  const SpectralDecomposition decomp = spectral_decomposition(gen, v0);

  const double t_max = config.t_max > 0.0 ? config.t_max : 4.0 / slope;
  const double omega_max = config.omega_max > 0.0 ? config.omega_max : 5.0 * slope;
  std::vector<double> times(config.t_steps), omegas(config.omega_steps);
  for (int i = 0; i < config.t_steps; ++i) times[i] = t_max * i / (config.t_steps - 1);
  for (int i = 0; i < config.omega_steps; ++i) {
    omegas[i] = -omega_max + 2.0 * omega_max * i / (config.omega_steps - 1);
  }
  const std::vector<double> g = correlate(gen, v0, times);
  const Spectrum s = spectrum_and_fwhm(decomp, omegas);

  Table table;
  table.columns = {"section", "x", "value"};
  for (int i = 0; i < config.t_steps; ++i) table.rows.push_back({std::string("correlation"), times[i], g[i]});
  for (int i = 0; i < config.omega_steps; ++i) {
    table.rows.push_back({std::string("spectrum"), omegas[i], s.density[i]});
  }
  table.metadata["config"] = config.to_json();
  table.metadata["trunc"] = N;
  table.metadata["n_mean"] = mean_photon_number(stats);
  table.metadata["D_slope"] = slope;
  table.metadata["D_eigen"] = decomp.mean_decay_rate();
  table.metadata["FWHM"] = s.fwhm;
  return table;
}

inline const double kLaserThreshold = 1.0 / std::sqrt(2.0);

inline Table uniform_convergence(const ScanConfig& config) {
  config.validate();
  require(config.dist == DistKind::Exponential, "uniform-convergence needs --dist exp");
  require(config.scan == ScanVariable::ThetaBar || config.scan == ScanVariable::Rate,
          "uniform-convergence scans theta_bar (or rate) at fixed g_tau");
  require(config.n_th == 0.0, "uniform-convergence needs nth = 0");
  Table table;
  table.columns = {"theta_bar", "n_mean", "D_exact", "D_exp_scully"};
  for (int o : config.orders) table.columns.push_back("D_order_" + std::to_string(o));
  table.columns.push_back("status");
  const std::size_t width = table.columns.size();
  table.rows = parallel_rows<std::vector<Cell>>(config.steps, config.threads, [&](int i) {
    const MaserParams p = config.params_at(i);
    const double theta_bar = p.theta();
    std::vector<Cell> row{theta_bar};
    try {
      const std::size_t N = std::max<std::size_t>(resolve_truncation(config, p), 2);
      const PhotonStatistics stats = steady_state_exp(p, N);
      const double n_mean = mean_photon_number(stats);
      row.push_back(n_mean);
      if (!(n_mean > 0.0)) {
        row.resize(width - 1);
        row.push_back(std::string("vacuum"));
        return row;
      }
      row.push_back(linewidth_exp_closed(p, stats, false));
      row.push_back(linewidth_exp_scully(p, stats));
      for (int o : config.orders) {
        const UniformLindbladSet set = build_uniform_lindblad(p, {o, o - 1}, N);
        row.push_back(uniform_linewidth(set, uniform_steady_state(set)));
      }
      row.push_back(std::string(theta_bar < kLaserThreshold ? "below_threshold" : "ok"));
      return row;
    } catch (const Error& e) {
      return detail::failed_row(row, width, e);
    }
  });
  table.metadata["config"] = config.to_json();
  table.metadata["threshold_theta_bar"] = kLaserThreshold;
  return table;
}

inline Table run_command(const ScanConfig& config) {
  if (config.command == "scan-theta") return scan_theta(config);
  if (config.command == "fock-resolved") return fock_resolved(config);
  if (config.command == "spectrum") return spectrum(config);
  if (config.command == "uniform-convergence") return uniform_convergence(config);
  fail(ErrorCode::InvalidArgument, "unknown command '" + config.command + "'");
}

// ---- output ---------------------------------------------------------------

inline std::string format_number(double x) {
  require(std::isfinite(x), "refusing to write a non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string cell_text(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(long long x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return csv_quote(s); }
  };
  return std::visit(Visitor{}, cell);
}

/// Metadata as '#'-prefixed lines, then an RFC-4180 body.
inline void write_csv(std::ostream& os, const Table& table) {
  for (const auto& [key, value] : table.metadata.items()) {
    os << "# " << key << '=' << value.dump() << "\r\n";
  }
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? "," : "") << csv_quote(table.columns[c]);
  }
  os << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_text(row[c]);
    os << "\r\n";
  }
}

inline void write_json(std::ostream& os, const Table& table) {
  nlohmann::ordered_json doc;
  doc["metadata"] = table.metadata;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json record;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const Cell& cell = row[c];
      if (const auto* d = std::get_if<double>(&cell)) {
        require(std::isfinite(*d), "refusing to write a non-finite value");
        record[table.columns[c]] = *d;
      } else if (const auto* i = std::get_if<long long>(&cell)) {
        record[table.columns[c]] = *i;
      } else if (const auto* s = std::get_if<std::string>(&cell)) {
        record[table.columns[c]] = *s;
      } else {
        record[table.columns[c]] = nullptr;
      }
    }
    doc["rows"].push_back(std::move(record));
  }
  os << doc.dump(2) << '\n';
}

inline void write_table(std::ostream& os, const Table& table, OutputFormat format) {
  if (format == OutputFormat::Csv) write_csv(os, table); else write_json(os, table);
}

}  // namespace micromaser
