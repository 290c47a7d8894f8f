// One PASS/FAIL line per numbered check, at full scale.
//
//   udn_acceptance                 all checks
//   udn_acceptance --criterion 6,7 selected checks
//   udn_acceptance --level quick   reduced scale

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "udn/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::vector<int> ids;
  std::string level = "full";
  unsigned threads = 0;
  app.add_option("--criterion", ids, "check numbers")->delimiter(',')->check(CLI::Range(1, udn::kCheckCount));
  app.add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  app.add_option("--threads", threads, "worker threads");
  CLI11_PARSE(app, argc, argv);

  if (ids.empty()) {
    for (int id = 1; id <= udn::kCheckCount; ++id) ids.push_back(id);
  }
  udn::VerifyOptions opt;
  opt.level = udn::parse_verify_level(level);
  opt.threads = threads;

  bool all = true;
  std::ostringstream details;
  for (int id : ids) {
    const udn::CheckResult c = udn::run_check(id, opt);
    all = all && c.passed;
    std::cout << (c.passed ? "PASS" : "FAIL") << " criterion " << id << ": " << c.name << '\n';
    for (const auto& d : c.details) std::cout << "    " << d << '\n';
    std::cout.flush();
  }
  return all ? 0 : 1;
}
