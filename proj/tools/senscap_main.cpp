#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "senscap/senscap.h"

namespace {

constexpr int kOk = 0;
constexpr int kAssertionFailed = 1;
constexpr int kConfigError = 2;

int report(senscap_status status) {
  std::cerr << "senscap: " << senscap_status_string(status) << ": " << senscap_last_error() << '\n';
  return kConfigError;
}

int run_table(const std::string& config_path, const std::string& out_path, bool bound) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "senscap: cannot read " << config_path << '\n';
    return kConfigError;
  }
  std::ostringstream text;
  text << in.rdbuf();

  senscap_config* config = nullptr;
  if (auto s = senscap_config_parse(text.str().c_str(), &config); s != SENSCAP_OK) return report(s);
  senscap_table* table = nullptr;
  const auto s = bound ? senscap_run_bound(config, &table) : senscap_run_simulate(config, &table);
  senscap_config_destroy(config);
  if (s != SENSCAP_OK) return report(s);

  std::ofstream out(out_path, std::ios::binary);
  out << senscap_table_csv(table);
  senscap_table_destroy(table);
  if (!out) {
    std::cerr << "senscap: cannot write " << out_path << '\n';
    return kConfigError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensing capacity bounds and Monte Carlo decoding for sensor networks on MRF fields"};
  app.require_subcommand(1);

  std::string config_path, out_path, level = "fast";
  auto* bound = app.add_subcommand("bound", "Capacity lower bound for every D in the config");
  bound->add_option("--config", config_path, "JSON run configuration")->required();
  bound->add_option("--out", out_path, "CSV output path")->required();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo error probability over the n list");
  simulate->add_option("--config", config_path, "JSON run configuration")->required();
  simulate->add_option("--out", out_path, "CSV output path")->required();

  auto* validate = app.add_subcommand("validate", "Run the invariant suites");
  validate->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (*bound) return run_table(config_path, out_path, true);
  if (*simulate) return run_table(config_path, out_path, false);

  senscap_report* rep = nullptr;
  if (auto s = senscap_validate(level.c_str(), &rep); s != SENSCAP_OK) return report(s);
  std::cout << senscap_report_text(rep);
  const bool passed = senscap_report_passed(rep) != 0;
  senscap_report_destroy(rep);
  return passed ? kOk : kAssertionFailed;
}
