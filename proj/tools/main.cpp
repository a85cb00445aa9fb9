#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "micromaser/micromaser.hpp"

namespace mm = micromaser;

namespace {

constexpr double kPi = std::numbers::pi;

mm::ScanConfig defaults_for(const std::string& command) {
  mm::ScanConfig c;
  c.command = command;
  if (command == "scan-theta") {
    c.n_th = 0.01;
    c.rate = 50.0;
    c.scan = mm::ScanVariable::Theta;
    c.min = 0.1 * kPi;
    c.max = 4.0 * kPi;
    c.steps = 200;
  } else if (command == "fock-resolved") {
    c.n_th = 0.1;
    c.rate = 200.0;
    c.g_tau = 2.1 * kPi / std::sqrt(200.0);
  } else if (command == "spectrum") {
    c.n_th = 0.01;
    c.rate = 50.0;
    c.g_tau = 3.0 * kPi / std::sqrt(50.0);
  } else if (command == "uniform-convergence") {
    c.n_th = 0.0;
    c.rate = 1.0;
    c.g_tau = 0.3;
    c.dist = mm::DistKind::Exponential;
    c.scan = mm::ScanVariable::ThetaBar;
    c.min = 0.2;
    c.max = 3.0;
    c.steps = 15;
  }
  return c;
}

std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      mm::require(used == item.size(), "");
    } catch (...) {
      mm::fail(mm::ErrorCode::InvalidArgument, "bad --orders entry '" + item + "'");
    }
  }
  mm::require(!out.empty(), "--orders is empty");
  return out;
}

void apply_config_file(mm::ScanConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) mm::fail(mm::ErrorCode::InvalidArgument, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    mm::fail(mm::ErrorCode::InvalidArgument, std::string("config file: ") + e.what());
  }
  mm::require(j.is_object(), "config file must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "command") continue;
      else if (key == "kappa") c.kappa = value.get<double>();
      else if (key == "nth") c.n_th = value.get<double>();
      else if (key == "rate") c.rate = value.get<double>();
      else if (key == "g_tau") c.g_tau = value.get<double>();
      else if (key == "dist") c.dist = mm::parse_dist(value.get<std::string>());
      else if (key == "scan") c.scan = mm::parse_scan_variable(value.get<std::string>());
      else if (key == "min") c.min = value.get<double>();
      else if (key == "max") c.max = value.get<double>();
      else if (key == "steps") c.steps = value.get<int>();
      else if (key == "trunc") c.trunc = value.get<std::size_t>();
      else if (key == "nodes") c.nodes = value.get<int>();
      else if (key == "orders") c.orders = value.get<std::vector<int>>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "format") c.format = mm::parse_format(value.get<std::string>());
      else if (key == "t_max") c.t_max = value.get<double>();
      else if (key == "t_steps") c.t_steps = value.get<int>();
      else if (key == "omega_max") c.omega_max = value.get<double>();
      else if (key == "omega_steps") c.omega_steps = value.get<int>();
      else if (key == "fig1_pair") c.fig1_pair = value.get<bool>();
      else if (key == "threads") c.threads = value.get<int>();
      else mm::fail(mm::ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    mm::fail(mm::ErrorCode::InvalidArgument, std::string("config file: ") + e.what());
  }
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch == '\n' ? ' ' : ch;
  }
  return out;
}

int report(const std::string& code, const std::string& message) {
  std::cerr << "error: code=" << code << " message=\"" << escape(message) << "\"\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Micromaser linewidth simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  double kappa = 0, nth = 0, rate = 0, g_tau = 0, min = 0, max = 0, t_max = 0, omega_max = 0;
  std::string dist, scan, out, format, orders;
  int steps = 0, nodes = 0, t_steps = 0, omega_steps = 0, threads = 0;
  std::size_t trunc = 0;
  bool fig1 = false;

  app.add_option("--config", config_path, "JSON config file (flags override its fields)");
  auto* o_kappa = app.add_option("--kappa", kappa, "cavity decay rate");
  auto* o_nth = app.add_option("--nth", nth, "thermal photon number");
  auto* o_rate = app.add_option("--rate", rate, "atom injection rate r");
  auto* o_gtau = app.add_option("--g-tau", g_tau, "g*tau (fixed) or g*tau_bar (exp)");
  auto* o_dist = app.add_option("--dist", dist, "fixed|exp");
  auto* o_scan = app.add_option("--scan", scan, "gtau|rate|theta|theta_bar");
  auto* o_min = app.add_option("--min", min, "scan start");
  auto* o_max = app.add_option("--max", max, "scan end");
  auto* o_steps = app.add_option("--steps", steps, "number of scan points");
  auto* o_trunc = app.add_option("--trunc", trunc, "Fock truncation N (default: automatic)");
  auto* o_nodes = app.add_option("--nodes", nodes, "quadrature nodes (default: automatic)");
  auto* o_orders = app.add_option("--orders", orders, "uniform sine orders, e.g. 1,3,7");
  auto* o_out = app.add_option("--out", out, "output path (default: stdout)");
  auto* o_format = app.add_option("--format", format, "csv|json");
  auto* o_tmax = app.add_option("--t-max", t_max, "spectrum: correlation time span");
  auto* o_tsteps = app.add_option("--t-steps", t_steps, "spectrum: correlation points");
  auto* o_wmax = app.add_option("--omega-max", omega_max, "spectrum: half frequency span");
  auto* o_wsteps = app.add_option("--omega-steps", omega_steps, "spectrum: frequency points");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (0: all cores)");
  app.add_flag("--fig1", fig1, "fock-resolved: emit the two reference parameter sets");

  for (const char* name : {"scan-theta", "fock-resolved", "spectrum", "uniform-convergence"}) {
    app.add_subcommand(name)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("invalid_argument", e.what());
  }

  try {
    mm::ScanConfig c = defaults_for(app.get_subcommands().front()->get_name());
    if (!config_path.empty()) apply_config_file(c, config_path);
    if (o_kappa->count()) c.kappa = kappa;
    if (o_nth->count()) c.n_th = nth;
    if (o_rate->count()) c.rate = rate;
    if (o_gtau->count()) c.g_tau = g_tau;
    if (o_dist->count()) c.dist = mm::parse_dist(dist);
    if (o_scan->count()) c.scan = mm::parse_scan_variable(scan);
    if (o_min->count()) c.min = min;
    if (o_max->count()) c.max = max;
    if (o_steps->count()) c.steps = steps;
    if (o_trunc->count()) c.trunc = trunc;
    if (o_nodes->count()) c.nodes = nodes;
    if (o_orders->count()) c.orders = parse_orders(orders);
    if (o_out->count()) c.out = out;
    if (o_format->count()) c.format = mm::parse_format(format);
    if (o_tmax->count()) c.t_max = t_max;
    if (o_tsteps->count()) c.t_steps = t_steps;
    if (o_wmax->count()) c.omega_max = omega_max;
    if (o_wsteps->count()) c.omega_steps = omega_steps;
    if (o_threads->count()) c.threads = threads;
    if (fig1) c.fig1_pair = true;

    const mm::Table table = mm::run_command(c);
    std::ostringstream buffer;
    mm::write_table(buffer, table, c.format);
    if (c.out.empty()) {
      std::cout << buffer.str();
    } else {
      std::ofstream file(c.out, std::ios::binary);
      if (!file) mm::fail(mm::ErrorCode::InvalidArgument, "cannot open output '" + c.out + "'");
      file << buffer.str();
    }
  } catch (const mm::Error& e) {
    return report(mm::to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return report("internal", e.what());
  }
  return 0;
}
