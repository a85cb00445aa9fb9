#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "support.hpp"

using namespace mmtest;

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / ("mm_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string(MICROMASER_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int raw = std::system(cmd.c_str());
  return {WEXITSTATUS(raw), slurp(out), slurp(err)};
}

struct Csv {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("no column " + name);
  }
  double num(std::size_t row, const std::string& name) const { return std::stod(rows[row][col(name)]); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      csv.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
    }
  }
  return csv;
}

}  // namespace

TEST(Cli, ErrorLineAndExitCode) {
  const CliRun bad_range = cli("scan-theta --min 3 --max 1");
  EXPECT_NE(bad_range.status, 0);
  EXPECT_EQ(bad_range.err.rfind("error: code=invalid_argument message=\"", 0), 0u) << bad_range.err;
  const CliRun bad_flag = cli("scan-theta --bogus 1");
  EXPECT_NE(bad_flag.status, 0);
  EXPECT_EQ(bad_flag.err.rfind("error: code=invalid_argument", 0), 0u);
  const CliRun no_command = cli("--kappa 1");
  EXPECT_NE(no_command.status, 0);
  const CliRun bad_dist = cli("scan-theta --dist exp");
  EXPECT_NE(bad_dist.status, 0);
  const CliRun bad_orders = cli("uniform-convergence --orders 2,3");
  EXPECT_NE(bad_orders.status, 0);
  const CliRun trunc = cli("fock-resolved --trunc 20");
  EXPECT_NE(trunc.status, 0);
  EXPECT_NE(trunc.err.find("code=truncation_inadequate"), std::string::npos) << trunc.err;
}

TEST(Cli, ThermalSingleRow) {
  const CliRun r = cli("scan-theta --scan gtau --rate 0 --nth 0.1 --min 1 --max 2 --steps 1");
  ASSERT_EQ(r.status, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 1u);
  EXPECT_NEAR(csv.num(0, "D_main"), 1.0, 1e-12);
  EXPECT_NEAR(csv.num(0, "D_slope"), 1.0, 1e-12);
}

TEST(Cli, ThetaColumnDefinition) {
  const CliRun r = cli("scan-theta --steps 7 --rate 50 --kappa 2");
  ASSERT_EQ(r.status, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  ASSERT_EQ(csv.rows.size(), 7u);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    EXPECT_EQ(csv.num(i, "theta"), std::sqrt(50.0 / 2.0) * csv.num(i, "g_tau"));
    EXPECT_FALSE(csv.rows[i][csv.col("status")].empty());
  }
}

TEST(Cli, ConcordanceAwayFromTrapping) {
  // three points well inside trapping-free stretches of the reference scan
  const CliRun r = cli("scan-theta --scan theta --min 1.0 --max 1.3 --steps 3");
  ASSERT_EQ(r.status, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    EXPECT_LT(rel(csv.num(i, "D_slope"), csv.num(i, "D_main")), 1e-8);
  }
}

TEST(Cli, BitReproducible) {
  const std::string args = "scan-theta --steps 12 --format csv";
  const CliRun a = cli(args + " --threads 1");
  const CliRun b = cli(args + " --threads 3");
  const CliRun c = cli(args + " --threads 3");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(b.out, c.out);
  // the thread count is not echoed, so the whole file must match
  EXPECT_EQ(a.out, b.out);
  const CliRun j1 = cli("uniform-convergence --steps 4 --format json");
  const CliRun j2 = cli("uniform-convergence --steps 4 --format json");
  EXPECT_EQ(j1.out, j2.out);
}

TEST(Cli, OutputFileMatchesStdout) {
  const fs::path path = fs::temp_directory_path() / "mm_cli_out.csv";
  const CliRun to_file = cli("scan-theta --steps 3 --out " + path.string());
  ASSERT_EQ(to_file.status, 0) << to_file.err;
  const CliRun to_stdout = cli("scan-theta --steps 3");
  // the echoed config differs only in the out field
  const Csv a = parse_csv(slurp(path));
  const Csv b = parse_csv(to_stdout.out);
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_NE(a.meta.at("config").find("mm_cli_out.csv"), std::string::npos);
}

TEST(Cli, FockResolvedPair) {
  const CliRun r = cli("fock-resolved --fig1");
  ASSERT_EQ(r.status, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  const auto sets = nlohmann::json::parse(csv.meta.at("sets"));
  ASSERT_EQ(sets.size(), 2u);
  for (const auto& set : sets) {
    const double theta = set["theta"].get<double>();
    double total = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
      if (csv.num(i, "theta") != theta) continue;
      total += csv.num(i, "p_n");
      weighted += csv.num(i, "p_n") * csv.num(i, "w_main");
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const double expected = set["D_main"].get<double>() * set["n_mean"].get<double>() - 1.0 * set["nth"].get<double>();
    EXPECT_LT(rel(weighted, expected), 1e-12);
  }
}

TEST(Cli, SpectrumThermalDecay) {
  const CliRun r = cli("spectrum --rate 0 --nth 0.5 --t-max 5 --t-steps 51");
  ASSERT_EQ(r.status, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  const double n_mean = std::stod(csv.meta.at("n_mean"));
  EXPECT_NEAR(std::stod(csv.meta.at("D_slope")), 1.0, 1e-12);
  EXPECT_NEAR(std::stod(csv.meta.at("D_eigen")), 1.0, 1e-8);
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    if (csv.rows[i][0] != "correlation") continue;
    const double t = csv.num(i, "x");
    EXPECT_NEAR(csv.num(i, "value"), n_mean * std::exp(-0.5 * t), 1e-9 * n_mean);
  }
}

TEST(Cli, SpectrumHeaderAtReferenceParameters) {
  const CliRun r = cli("spectrum --rate 50 --nth 0.01 --g-tau " + std::to_string(3.0 * kPi / std::sqrt(50.0)));
  ASSERT_EQ(r.status, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  const double slope = std::stod(csv.meta.at("D_slope"));
  const double eigen = std::stod(csv.meta.at("D_eigen"));
  EXPECT_LT(rel(eigen, slope), 1e-8);
  EXPECT_LT(rel(std::stod(csv.meta.at("FWHM")), eigen), 0.15);
}

TEST(Cli, UniformConvergenceTable) {
  const CliRun r = cli("uniform-convergence --min 0.2 --max 3 --steps 15 --format json");
  ASSERT_EQ(r.status, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["metadata"]["threshold_theta_bar"].get<double>(), 1.0 / std::sqrt(2.0), 1e-15);
  const auto& rows = doc["rows"];
  ASSERT_EQ(rows.size(), 15u);
  EXPECT_EQ(rows[0]["status"], "below_threshold");
  EXPECT_EQ(rows[14]["status"], "ok");
  EXPECT_LT(rel(rows[14]["D_exp_scully"].get<double>(), rows[14]["D_exact"].get<double>()), 0.2);
  double max_err[3] = {0, 0, 0};
  const char* names[3] = {"D_order_1", "D_order_3", "D_order_7"};
  for (const auto& row : rows) {
    for (const auto& [key, value] : row.items()) {
      if (value.is_number()) EXPECT_TRUE(std::isfinite(value.get<double>())) << key;
    }
    for (int k = 0; k < 3; ++k) {
      max_err[k] = std::max(max_err[k], rel(row[names[k]].get<double>(), row["D_exact"].get<double>()));
    }
  }
  EXPECT_GT(max_err[0], max_err[1]);
  EXPECT_GT(max_err[1], max_err[2]);
}

TEST(Cli, ConfigFileWithOverrides) {
  const fs::path path = fs::temp_directory_path() / "mm_cli_config.json";
  std::ofstream(path) << R"({"kappa": 1.0, "nth": 0.1, "rate": 0.0, "scan": "gtau", "min": 1, "max": 2, "steps": 2})";
  const CliRun r = cli("scan-theta --config " + path.string() + " --nth 0.2");
  ASSERT_EQ(r.status, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  const auto config = nlohmann::json::parse(csv.meta.at("config"));
  EXPECT_EQ(config["nth"].get<double>(), 0.2);
  EXPECT_EQ(config["steps"].get<int>(), 2);
  EXPECT_EQ(csv.rows.size(), 2u);
  std::ofstream(path) << R"({"nope": 1})";
  const CliRun bad = cli("scan-theta --config " + path.string());
  EXPECT_NE(bad.status, 0);
  EXPECT_NE(bad.err.find("unknown config key"), std::string::npos);
}

TEST(Cli, VacuumRowsCarryStatus) {
  const CliRun r = cli("scan-theta --scan gtau --rate 0 --nth 0 --min 1 --max 2 --steps 2");
  ASSERT_EQ(r.status, 0) << r.err;
  const Csv csv = parse_csv(r.out);
  for (const auto& row : csv.rows) {
    EXPECT_EQ(row.back(), "vacuum");
    EXPECT_EQ(row[csv.col("D_main")], "");
  }
}
