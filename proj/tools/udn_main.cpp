// udn: bounds, simulate, sweep and verify.
//
// Exit codes: 0 success, 1 a check failed, 2 usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "udn/analysis.hpp"
#include "udn/config.hpp"
#include "udn/harness.hpp"
#include "udn/report.hpp"
#include "udn/verify.hpp"

namespace fs = std::filesystem;
using namespace udn;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "udn_out";
  bool json = false;
  bool verbose = false;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config, "JSON configuration file");
  cmd->add_option("--seed", o.seed, "master seed (64-bit)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--json", o.json, "print the result as JSON on stdout");
  cmd->add_flag("-v,--verbose", o.verbose, "progress on stderr");
  cmd->allow_extras();
}

// "--network.K 4" and "--network.K=4" pairs left over by the parser.
void apply_dotted(nlohmann::json& config, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + arg + "'");
    std::string key = arg.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else {
      if (i + 1 >= extras.size()) throw UsageError("flag '" + arg + "' needs a value");
      value = extras[++i];
    }
    apply_override(config, key, value);
  }
}

RunConfig load_run_config(const RunOptions& o, const std::vector<std::string>& extras) {
  nlohmann::json config = default_config_json();
  if (!o.config.empty()) merge_config(config, read_config_file(o.config));
  apply_dotted(config, extras);
  if (o.seed) config["seed"] = *o.seed;
  return parse_config(config);
}

BoundsReport bounds_for(const NetworkConfig& cfg) {
  if (cfg.equal_drifts()) return bounds_report(cfg.relays, cfg.g, cfg.h, cfg.mu());
  return bounds_report(cfg.relays, cfg.g, cfg.h, cfg.mu_first, cfg.mu_second);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------

struct BoundsOptions {
  int relays = 0;
  double g = 0.0, h = 0.0, mu = 1.0;
  std::string mu1, mu2;
  bool json = false;
};

int cmd_bounds(const BoundsOptions& o) {
  auto positive = [](double v, const char* flag) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw UsageError(std::string(flag) + " must be positive");
    }
  };
  if (o.relays < 1) throw UsageError("-K must be a positive integer");
  positive(o.g, "-g");
  positive(o.h, "-h");
  positive(o.mu, "--mu");

  BoundsReport report;
  if (!o.mu1.empty() || !o.mu2.empty()) {
    auto m1 = o.mu1.empty() ? std::vector<double>(o.relays, o.mu) : parse_list(o.mu1, "--mu1");
    auto m2 = o.mu2.empty() ? std::vector<double>(o.relays, o.mu) : parse_list(o.mu2, "--mu2");
    if (static_cast<int>(m1.size()) != o.relays) {
      throw UsageError("--mu1 has " + std::to_string(m1.size()) + " entries, -K is " +
                       std::to_string(o.relays));
    }
    if (static_cast<int>(m2.size()) != o.relays) {
      throw UsageError("--mu2 has " + std::to_string(m2.size()) + " entries, -K is " +
                       std::to_string(o.relays));
    }
    for (double m : m1) positive(m, "--mu1");
    for (double m : m2) positive(m, "--mu2");
    report = bounds_report(o.relays, o.g, o.h, m1, m2);
  } else {
    report = bounds_report(o.relays, o.g, o.h, o.mu);
  }

  if (o.json) {
    std::cout << to_json(report) << '\n';
    return kOk;
  }
  std::cout << "regime            " << to_string(report.regime) << '\n'
            << "min-cut metric    " << report.min_cut_metric << '\n'
            << "sync upper bound  " << report.sync_ub << " bits/energy\n"
            << "unsync lower bnd  " << report.unsync_lb << " bits/energy\n"
            << "ratio             " << report.ratio << '\n'
            << "P1                " << report.powers.p1 << '\n'
            << "P2                ";
  for (std::size_t k = 0; k < report.powers.p2.size(); ++k) {
    std::cout << (k ? ", " : "") << report.powers.p2[k];
  }
  std::cout << '\n'
            << "snr_lb            " << report.snr_lb << '\n'
            << "gamma             " << report.gamma << '\n'
            << "achievable rpue   " << report.achievable_rpue << " bits/energy\n";
  return kOk;
}

int cmd_simulate(const RunOptions& o, const std::vector<std::string>& extras) {
  RunConfig rc = load_run_config(o, extras);
  rc.spec.resolve();
  SweepRow row;
  row.spec = rc.spec;
  row.bounds = bounds_for(rc.spec.network);
  if (o.verbose) std::cerr << "simulating " << rc.spec.trials << " trials\n";
  row.result = run_experiment(rc.spec);

  fs::create_directories(o.out);
  const std::vector<ResultRow> rows{make_row(row)};
  {
    std::ofstream csv(fs::path(o.out) / "result.csv");
    write_csv(csv, rows);
  }
  write_file(fs::path(o.out) / "result.json", rows_to_json(rows));
  const std::string details = to_json(*row.result);
  write_file(fs::path(o.out) / "details.json", details);

  if (o.json) {
    std::cout << details << '\n';
  } else {
    const ExperimentResult& r = *row.result;
    std::cout << "M=" << r.messages << "  trials=" << r.trials << "  BLER=" << r.bler.estimate
              << " [" << r.bler.lo << ", " << r.bler.hi << "]\n"
              << "snr_lb=" << r.snr_lb << "  measured SNR=" << r.snr_measured_mean
              << "  E_IDC freq=" << r.e_idc_freq << '\n'
              << "rate=" << r.rate_bits_per_symbol << " bits/symbol vs gamma*C="
              << r.effective_capacity << "  rpue=" << r.rpue_achieved << '\n'
              << "wall clock " << r.wall_clock_seconds << " s; results in " << o.out << '\n';
  }
  return kOk;
}

int cmd_sweep(const RunOptions& o, const std::vector<std::string>& extras) {
  const RunConfig rc = load_run_config(o, extras);
  if (!rc.grid) throw UsageError("sweep needs a nonempty 'sweep' section or --sweep.<key> flags");
  if (o.verbose) std::cerr << "sweeping " << rc.grid->points() << " points\n";
  const std::vector<SweepRow> rows = sweep(rc.spec, *rc.grid);

  std::vector<ResultRow> table;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.push_back(make_row(rows[i]));
    if (!rows[i].error.empty()) {
      std::cerr << "point " << i << " failed: " << rows[i].error << '\n';
      failures.push_back({{"row", i}, {"error", rows[i].error}});
    }
  }
  fs::create_directories(o.out);
  {
    std::ofstream csv(fs::path(o.out) / "sweep.csv");
    write_csv(csv, table);
  }
  const std::string json = rows_to_json(table);
  write_file(fs::path(o.out) / "sweep.json", json);
  write_file(fs::path(o.out) / "sweep_failures.json", failures.dump(2));
  if (o.json) std::cout << json << '\n';

  const auto violations = sweep_bound_violations(rows);
  for (std::size_t i : violations) {
    std::cerr << "row " << i << ": achieved rate per unit energy " << table[i].rpue_achieved
              << " exceeds the synchronized bound " << table[i].rpue_ub << '\n';
  }
  if (!o.json) {
    std::cout << rows.size() << " points, " << failures.size() << " failed, "
              << violations.size() << " bound violations; results in " << o.out << '\n';
  }
  return violations.empty() ? kOk : kCheckFailed;
}

int cmd_verify(const std::string& level, unsigned threads, bool json) {
  VerifyOptions opt;
  opt.level = parse_verify_level(level);
  opt.threads = threads;
  bool all = true;
  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  auto emit = [&](const CheckResult& c) {
    all = all && c.passed;
    if (json) {
      report.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed},
                        {"details", c.details}, {"seconds", c.seconds}});
    } else {
      print_check(std::cout, c);
      std::cout.flush();
    }
  };
  for (int id = 1; id <= kCheckCount; ++id) emit(run_check(id, opt));
  for (const auto& c : run_studies(opt)) emit(c);
  if (json) std::cout << report.dump(2) << '\n';
  return all ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient relaying over unsynchronized diamond networks"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);

  BoundsOptions bo;
  auto* bounds = app.add_subcommand("bounds", "closed-form bounds and power selection");
  bounds->set_help_flag("--help", "print help and exit");
  bounds->add_option("-K", bo.relays, "number of relays")->required();
  bounds->add_option("-g", bo.g, "source-relay gain")->required();
  bounds->add_option("-h", bo.h, "relay-destination gain")->required();
  bounds->add_option("--mu", bo.mu, "common drift");
  bounds->add_option("--mu1", bo.mu1, "first-hop drifts, comma separated");
  bounds->add_option("--mu2", bo.mu2, "second-hop drifts, comma separated");
  bounds->add_flag("--json", bo.json, "JSON on stdout");

  RunOptions so;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of one configuration");
  simulate->set_help_flag("--help", "print help and exit");
  add_run_options(simulate, so);

  RunOptions wo;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid of simulations");
  sweep_cmd->set_help_flag("--help", "print help and exit");
  add_run_options(sweep_cmd, wo);

  std::string level = "quick";
  unsigned threads = 0;
  bool verify_json = false;
  auto* verify = app.add_subcommand("verify", "self-check suite");
  verify->set_help_flag("--help", "print help and exit");
  verify->add_option("--level", level, "quick or full");
  verify->add_option("--threads", threads, "worker threads (0: all cores)");
  verify->add_flag("--json", verify_json, "JSON report on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*bounds) return cmd_bounds(bo);
    if (*simulate) return cmd_simulate(so, simulate->remaining());
    if (*sweep_cmd) return cmd_sweep(wo, sweep_cmd->remaining());
    if (*verify) return cmd_verify(level, threads, verify_json);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kUsage;
}
