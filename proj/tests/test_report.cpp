#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "udn/report.hpp"

using namespace udn;

namespace {

std::vector<SweepRow> two_rows() {
  ExperimentSpec base;
  base.network = NetworkConfig::symmetric(2, 1.0, 1.0, 1.0, 0.1, 16, 32, 1.0, 1.0);
  base.codebook.messages = 16;
  base.trials = 10;
  return sweep(base, SweepGrid{{2}, {1.0}, {0.2, 1.0}, {1.0}, {0.1, 5.0}, {16}});
}

}  // namespace

TEST_CASE("CSV header is the fixed column list") {
  std::ostringstream os;
  write_csv(os, {});
  CHECK(os.str() ==
        "K,g,h,mu,sigma2,N,Nprime,M,trials,P1,P2,regime,snr_lb,snr_measured_mean,"
        "snr_measured_min_good,bler,bler_ci_lo,bler_ci_hi,e_idc_freq,e_idc_bound,"
        "source_energy_mean,relay_energy_mean,rpue_achieved,rpue_lb,rpue_ub,seed\n");
}

TEST_CASE("CSV round trip, including failed rows") {
  const auto rows = two_rows();
  REQUIRE(rows.size() == 4);
  std::vector<ResultRow> table;
  for (const auto& r : rows) table.push_back(make_row(r));
  CHECK(std::isnan(table[1].bler));  // sigma2 = 5 is not realisable
  CHECK_FALSE(std::isnan(table[0].bler));
  CHECK(table[0].regime == "MAC-limited");
  CHECK(table[2].regime == "intermediate");

  std::stringstream ss;
  write_csv(ss, table);
  const auto back = read_csv(ss);
  REQUIRE(back.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const ResultRow& a = table[i];
    const ResultRow& b = back[i];
    CHECK(a.K == b.K);
    CHECK(a.h == b.h);
    CHECK(a.M == b.M);
    CHECK(a.regime == b.regime);
    CHECK(a.seed == b.seed);
    CHECK(a.rpue_ub == b.rpue_ub);
    CHECK(a.snr_lb == b.snr_lb);
    CHECK((a.bler == b.bler || (std::isnan(a.bler) && std::isnan(b.bler))));
    CHECK((a.relay_energy_mean == b.relay_energy_mean ||
           (std::isnan(a.relay_energy_mean) && std::isnan(b.relay_energy_mean))));
  }
}

TEST_CASE("malformed CSV is rejected") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), UsageError);
  std::istringstream header("K,g,h\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(header), UsageError);
  std::ostringstream os;
  write_csv(os, {});
  std::istringstream short_row(os.str() + "2,1,1\n");
  CHECK_THROWS_AS(read_csv(short_row), UsageError);
}

TEST_CASE("JSON rows mirror the CSV columns") {
  std::vector<ResultRow> table;
  for (const auto& r : two_rows()) table.push_back(make_row(r));
  const auto j = nlohmann::ordered_json::parse(rows_to_json(table));
  REQUIRE(j.size() == 4);
  for (const auto& row : j) {
    REQUIRE(row.size() == kResultColumns.size());
    std::size_t i = 0;
    for (const auto& [key, value] : row.items()) CHECK(key == kResultColumns[i++]);
  }
  CHECK(j[1]["bler"].is_null());
}
