#include "udn/report.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace udn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double parse_double(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw UsageError("malformed number '" + s + "' in result CSV");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> cells(const ResultRow& r) {
  return {std::to_string(r.K), fmt(r.g), fmt(r.h), fmt(r.mu), fmt(r.sigma2),
          std::to_string(r.N), std::to_string(r.Nprime), std::to_string(r.M),
          std::to_string(r.trials), fmt(r.P1), fmt(r.P2), r.regime, fmt(r.snr_lb),
          fmt(r.snr_measured_mean), fmt(r.snr_measured_min_good), fmt(r.bler), fmt(r.bler_ci_lo),
          fmt(r.bler_ci_hi), fmt(r.e_idc_freq), fmt(r.e_idc_bound), fmt(r.source_energy_mean),
          fmt(r.relay_energy_mean), fmt(r.rpue_achieved), fmt(r.rpue_lb), fmt(r.rpue_ub),
          std::to_string(r.seed)};
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

ResultRow make_row(const SweepRow& row) {
  const NetworkConfig& cfg = row.spec.network;
  ResultRow r;
  r.K = cfg.relays;
  r.g = cfg.g;
  r.h = cfg.h;
  r.mu = row.bounds.mu;
  r.sigma2 = cfg.sigma2;
  r.N = cfg.outer_length;
  r.Nprime = cfg.repetitions;
  r.trials = row.spec.trials;
  r.P1 = cfg.source_power;
  r.P2 = mean_of(cfg.relay_power);
  r.regime = std::string(to_string(row.bounds.regime));
  r.snr_lb = row.bounds.snr_lb;
  r.rpue_lb = row.bounds.unsync_lb;
  r.rpue_ub = row.bounds.sync_ub;
  r.seed = cfg.seed;
  if (row.result) {
    const ExperimentResult& e = *row.result;
    r.M = e.messages;
    r.snr_lb = e.snr_lb;
    r.snr_measured_mean = e.snr_measured_mean;
    r.snr_measured_min_good = e.snr_measured_min_good;
    r.bler = e.bler.estimate;
    r.bler_ci_lo = e.bler.lo;
    r.bler_ci_hi = e.bler.hi;
    r.e_idc_freq = e.e_idc_freq;
    r.e_idc_bound = e.e_idc_bound;
    r.source_energy_mean = e.source_energy_mean;
    r.relay_energy_mean = mean_of(e.relay_energy_mean);
    r.rpue_achieved = e.rpue_achieved;
  } else {
    r.M = row.spec.codebook.messages;
    r.snr_measured_mean = r.snr_measured_min_good = kNaN;
    r.bler = r.bler_ci_lo = r.bler_ci_hi = kNaN;
    r.e_idc_freq = r.e_idc_bound = kNaN;
    r.source_energy_mean = r.relay_energy_mean = r.rpue_achieved = kNaN;
  }
  return r;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  for (std::size_t i = 0; i < kResultColumns.size(); ++i) {
    os << (i ? "," : "") << kResultColumns[i];
  }
  os << '\n';
  for (const ResultRow& r : rows) {
    const auto c = cells(r);
    for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw UsageError("result CSV is empty");
  const auto header = split(line);
  if (header.size() != kResultColumns.size() ||
      !std::equal(header.begin(), header.end(), kResultColumns.begin())) {
    throw UsageError("result CSV header does not match the expected columns");
  }
  std::vector<ResultRow> rows;
  Index line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != kResultColumns.size()) {
      throw UsageError("result CSV line " + std::to_string(line_no) + " has " +
                       std::to_string(c.size()) + " cells");
    }
    ResultRow r;
    r.K = std::stoi(c[0]);
    r.g = parse_double(c[1]);
    r.h = parse_double(c[2]);
    r.mu = parse_double(c[3]);
    r.sigma2 = parse_double(c[4]);
    r.N = std::stoll(c[5]);
    r.Nprime = std::stoll(c[6]);
    r.M = std::stoull(c[7]);
    r.trials = std::stoll(c[8]);
    r.P1 = parse_double(c[9]);
    r.P2 = parse_double(c[10]);
    r.regime = c[11];
    r.snr_lb = parse_double(c[12]);
    r.snr_measured_mean = parse_double(c[13]);
    r.snr_measured_min_good = parse_double(c[14]);
    r.bler = parse_double(c[15]);
    r.bler_ci_lo = parse_double(c[16]);
    r.bler_ci_hi = parse_double(c[17]);
    r.e_idc_freq = parse_double(c[18]);
    r.e_idc_bound = parse_double(c[19]);
    r.source_energy_mean = parse_double(c[20]);
    r.relay_energy_mean = parse_double(c[21]);
    r.rpue_achieved = parse_double(c[22]);
    r.rpue_lb = parse_double(c[23]);
    r.rpue_ub = parse_double(c[24]);
    r.seed = std::stoull(c[25]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string rows_to_json(const std::vector<ResultRow>& rows, int indent) {
  auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ResultRow& r : rows) {
    nlohmann::ordered_json j;
    j["K"] = r.K;
    j["g"] = num(r.g);
    j["h"] = num(r.h);
    j["mu"] = num(r.mu);
    j["sigma2"] = num(r.sigma2);
    j["N"] = r.N;
    j["Nprime"] = r.Nprime;
    j["M"] = r.M;
    j["trials"] = r.trials;
    j["P1"] = num(r.P1);
    j["P2"] = num(r.P2);
    j["regime"] = r.regime;
    j["snr_lb"] = num(r.snr_lb);
    j["snr_measured_mean"] = num(r.snr_measured_mean);
    j["snr_measured_min_good"] = num(r.snr_measured_min_good);
    j["bler"] = num(r.bler);
    j["bler_ci_lo"] = num(r.bler_ci_lo);
    j["bler_ci_hi"] = num(r.bler_ci_hi);
    j["e_idc_freq"] = num(r.e_idc_freq);
    j["e_idc_bound"] = num(r.e_idc_bound);
    j["source_energy_mean"] = num(r.source_energy_mean);
    j["relay_energy_mean"] = num(r.relay_energy_mean);
    j["rpue_achieved"] = num(r.rpue_achieved);
    j["rpue_lb"] = num(r.rpue_lb);
    j["rpue_ub"] = num(r.rpue_ub);
    j["seed"] = r.seed;
    arr.push_back(std::move(j));
  }
  return arr.dump(indent);
}

}  // namespace udn
