#include <catch2/catch_amalgamated.hpp>

#include "qmacro/reports.hpp"

using namespace qmacro;
using namespace qmacro::reports;

TEST_CASE("tables embed the run configuration and render both formats") {
  const Table t = cmd_fig_subgroup({1, 5});
  const std::string csv = t.to_csv();
  CHECK(csv.find("# qmacro subgroup") == 0);
  CHECK(csv.find("# config: {") != std::string::npos);
  CHECK(csv.find("k,p_measure_k,p_measure_all_but_k") != std::string::npos);
  const auto j = nlohmann::json::parse(t.to_json());
  CHECK(j["config"]["k_max"] == 5);
  CHECK(j["rows"].size() == 5);
  CHECK_THROWS_AS(t.render("xml"), validation_error);
}

TEST_CASE("subgroup rows hit the documented landmarks") {
  const Table t = cmd_fig_subgroup({1, 100});
  // k = 1 row: 0.75 and (1+1/sqrt2)/2
  CHECK(t.rows[0][1] == "0.75");
  CHECK(std::stod(t.rows[0][2]) == Catch::Approx(0.85355339059).epsilon(1e-9));
  CHECK(std::stod(t.rows[99][1]) == Catch::Approx(0.8173).margin(5e-4));
  CHECK(std::stod(t.rows[99][2]) == Catch::Approx(0.8188).margin(5e-4));
}

TEST_CASE("measures table reproduces the summary scalings") {
  const Table t = cmd_table_effective_sizes({{3, 9}, 0.99});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "2"); // korsbakken
  CHECK(t.rows[0][2] == "2"); // marquardt
  CHECK(std::stod(t.rows[1][3]) == Catch::Approx(1.2).epsilon(1e-12));
  CHECK(std::stod(t.rows[1][5]) == Catch::Approx(4.5 + 2.0 + 3.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("distinguish table carries all four scenario columns and a fit") {
  DistinguishConfig cfg;
  cfg.n_min = 11;
  cfg.n_max = 51;
  cfg.n_step = 8;
  const Table t = cmd_fig_distinguishability(cfg);
  int sharp_rows = 0;
  for (const auto& row : t.rows) {
    if (row[1] == "sharp") {
      CHECK(row[3] == "1");
      ++sharp_rows;
    }
  }
  CHECK(sharp_rows == 6);
  REQUIRE_FALSE(t.extra.is_null());
  CHECK(t.extra["extrapolation"].contains("pair"));
  CHECK(t.extra["extrapolation"].contains("povm"));
  CHECK(t.extra["extrapolation"].contains("noise"));
}

TEST_CASE("povm profile defaults to the three documented widths") {
  const Table t = cmd_fig_povm_profiles({7, {}});
  // sigma values 0, 1, sqrt(7): 3 blocks of N+1 rows
  REQUIRE(t.rows.size() == 3 * 8);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) sum += std::stod(t.rows[i][2]);
  CHECK(sum == Catch::Approx(1.0).margin(1e-10));
  // sharp block shows the parity comb: odd outcomes carry no plus weight
  for (int i = 0; i < 8; i += 2) CHECK(std::stod(t.rows[i + 1][2]) == 0.0);
}

TEST_CASE("oracle-check command reports every check as passing") {
  const Table t = cmd_oracle_check({5});
  CHECK(t.extra["all_pass"] == true);
  for (const auto& row : t.rows) CHECK(row[3] == "pass");
}

TEST_CASE("rendering is deterministic") {
  for (int repeat = 0; repeat < 2; ++repeat) {
    const std::string a = cmd_fig_subgroup({1, 30}).to_csv();
    const std::string b = cmd_fig_subgroup({1, 30}).to_csv();
    CHECK(a == b);
    const std::string ja = cmd_table_effective_sizes({{3, 21}, 0.99}).to_json();
    const std::string jb = cmd_table_effective_sizes({{3, 21}, 0.99}).to_json();
    CHECK(ja == jb);
  }
}

TEST_CASE("validation failures surface as typed errors") {
  CHECK_THROWS_AS(cmd_fig_subgroup({5, 1}), validation_error);
  CHECK_THROWS_AS(cmd_table_effective_sizes({{4}, 0.99}), validation_error);
  CHECK_THROWS_AS(cmd_fig_metrology({"purple", 3, 9}), validation_error);
  CHECK_THROWS_AS(cmd_oracle_check({9}), validation_error);
}
