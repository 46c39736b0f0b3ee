#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>

#include "nscheps/config.hpp"
#include "nscheps/output.hpp"
#include "nscheps/plots.hpp"
#include "oracles.hpp"

using namespace nscheps;
namespace fs = std::filesystem;

namespace {

std::string first_issue(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.issues().empty() ? std::string(e.what()) : e.issues().front();
  }
  return "";
}

SimState sample_state(int nx, int ny) {
  const GridSpec g = GridSpec::make(nx, ny, 1.0 * nx / ny, 1.0);
  SimState s;
  s.t = 0.125;
  s.phi = oracle::random_field(g, 1);
  s.mu = oracle::random_field(g, 2);
  s.p = oracle::random_field(g, 3);
  s.v = VectorField(g);
  for (std::size_t k = 0; k < s.v.u.size(); ++k) s.v.u[k] = 0.001 * static_cast<double>(k);
  for (std::size_t k = 0; k < s.v.v.size(); ++k) s.v.v[k] = -0.002 * static_cast<double>(k);
  return s;
}

int count(const std::string& text, const std::string& what) {
  int n = 0;
  for (std::size_t p = text.find(what); p != std::string::npos; p = text.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("minimal document takes the defaults") {
    const AppConfig cfg = parse_config_text("{}");
    CHECK(cfg.run.grid.nx == 64);
    CHECK(cfg.run.variant.is_nonlocal());
    CHECK(cfg.run.variant.eps == 0.1);
    CHECK(cfg.run.dt == 1e-4);
    CHECK(cfg.run.T == 0.05);
    CHECK(cfg.run.params.theta_c == 0.5);
    CHECK(cfg.sweep.eps_list == std::vector<double>{0.2, 0.1, 0.05});
  }
  SUBCASE("theta_c must stay below theta") {
    CHECK(first_issue(R"({"params": {"theta": 1.0, "theta_c": 1.0}})").find("0 < θ_c < θ") != std::string::npos);
  }
  SUBCASE("unknown keys are reported with their path") {
    CHECK(first_issue(R"({"run": {"epsilonn": 0.1}})").find("run.epsilonn") != std::string::npos);
    CHECK(first_issue(R"({"gird": {}})").find("gird") != std::string::npos);
  }
  SUBCASE("type errors") {
    CHECK(first_issue(R"({"grid": {"nx": "sixty"}})").find("grid.nx") != std::string::npos);
    CHECK_THROWS_AS(parse_config_text("{"), Error);
  }
  SUBCASE("canonical JSON round trip") {
    const AppConfig cfg = parse_config_text(R"({"run": {"variant": "local", "T": 0.01}, "params": {"rho2": 5}})");
    const std::string json = config_to_json(cfg);
    CHECK(config_to_json(parse_config_text(json)) == json);
  }
  SUBCASE("shipped configs are valid") {
    for (const char* name : {"default.json", "sweep.json", "checks.json"})
      CHECK_NOTHROW(parse_config(std::string(NSCHEPS_SOURCE_DIR) + "/configs/" + name));
    CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), Error);
  }
}

TEST_CASE("snapshot format") {
  const SimState s = sample_state(8, 4);
  const std::vector<unsigned char> bytes = encode_snapshot(s);
  CHECK(bytes.size() == 4 + 4 + 4 + 4 + 8 + 8 * (3 * 32 + 9 * 4 + 8 * 5));
  CHECK(bytes.size() == snapshot_size(8, 4));

  const SnapshotData d = decode_snapshot(bytes);
  CHECK(d.nx == 8);
  CHECK(d.ny == 4);
  CHECK(d.t == s.t);
  CHECK(d.phi == s.phi.values);
  CHECK(d.mu == s.mu.values);
  CHECK(d.p == s.p.values);
  CHECK(d.u == s.v.u);
  CHECK(d.v == s.v.v);

  std::vector<unsigned char> bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_snapshot(bad), doctest::Contains("offset 0"), Error);
  std::vector<unsigned char> cut(bytes.begin(), bytes.end() - 3);
  CHECK_THROWS_AS(decode_snapshot(cut), Error);
  std::vector<unsigned char> version = bytes;
  version[4] = 2;
  CHECK_THROWS_AS(decode_snapshot(version), Error);

  const fs::path path = fs::temp_directory_path() / "nscheps_test_snapshot.epsf";
  write_snapshot(s, path.string());
  CHECK(read_snapshot(path.string()).phi == s.phi.values);
  fs::remove(path);
}

TEST_CASE("csv") {
  CHECK(timeseries_csv({}) ==
        "t,kinetic,e0_part,potential_part,total,dissipation_cum,mass_mean,max_abs_phi,div_v_norm\n");
  CHECK(sweep_csv({}) == "eps,sup_L2_phi_diff,L2QT_v_diff,L2L2_mu_diff,init_energy_gap,audit_max\n");
  CHECK(format_number(0.1) == "0.10000000000000001");
  EnergyRecord r;
  r.t = 0.5;
  r.mass_mean = 0.25;
  const std::string csv = timeseries_csv({r, r});
  CHECK(count(csv, "\n") == 3);
  CHECK(csv.find("0.5,0,0,0,0,0,0.25,0,0\n") != std::string::npos);
}

TEST_CASE("svg") {
  SweepReport report;
  for (double eps : {0.2, 0.1, 0.05}) {
    SweepRow row;
    row.eps = eps;
    row.sup_l2_phi = eps * eps;
    row.l2qt_v = eps;
    row.l2l2_mu = 2 * eps;
    row.init_energy_gap = 0.5 * eps;
    report.rows.push_back(row);
  }
  const std::string svg = sweep_plot_svg(report);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(count(svg, "<g class=\"series\"") == 4);
  CHECK(count(svg, "class=\"pt\"") == 12);
  CHECK(sweep_plot_svg(report) == svg);

  const std::string one = line_chart_svg({"t", "x", "y", false, false}, {{"s", {1, 2, 3, 4}, {4, 3, 2, 1}}});
  std::smatch m;
  REQUIRE(std::regex_search(one, m, std::regex("points=\"([^\"]*)\"")));
  std::vector<double> ys;
  const std::string pts = m[1];
  const std::regex pair("[0-9.]+,([0-9.]+)");
  for (auto it = std::sregex_iterator(pts.begin(), pts.end(), pair); it != std::sregex_iterator(); ++it)
    ys.push_back(std::stod((*it)[1]));
  REQUIRE(ys.size() == 4);
  CHECK(std::is_sorted(ys.begin(), ys.end()));

  const std::string logged = line_chart_svg({"t", "x", "y", true, true}, {{"s", {1, 2, 3}, {1, 0, -1}}});
  CHECK(count(logged, "class=\"pt\"") == 1);
}
