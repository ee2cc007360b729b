// Command line front end: check, run and describe a configuration.

#include "qcw/qcw.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

std::string read_file(std::string const& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw qcw::Error("cannot read " + path);
  }
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amalgam normal forms, metric probes and experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool fail_fast = false;
  unsigned threads = 1;
  std::string format = "both";

  auto* check = app.add_subcommand("check", "validate a config and its hypotheses");
  auto* run = app.add_subcommand("run", "run the configured experiments");
  auto* describe = app.add_subcommand("describe", "print the constructed groups");
  for (auto* sub : {check, run, describe}) {
    sub->add_option("--config", config_path, "configuration file (YAML)")->required();
  }
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");
  run->add_flag("--fail-fast", fail_fast, "stop at the first failed experiment");
  run->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));
  run->add_option("--format", format, "csv, json or both")
      ->check(CLI::IsMember({"csv", "json", "both"}));

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = qcw::parse_config(read_file(config_path));
    if (*check) {
      auto ws = qcw::build_workspace(config);
      qcw::check_hypotheses(config, ws);
      std::cout << "ok\n";
      return 0;
    }
    if (*describe) {
      std::cout << qcw::describe(config);
      return 0;
    }
    qcw::RunOptions opt;
    if (!out_dir.empty()) {
      opt.out_dir = out_dir;
    }
    opt.fail_fast = fail_fast;
    opt.threads = threads;
    static std::map<std::string, qcw::OutputFormat> const formats = {
        {"csv", qcw::OutputFormat::csv},
        {"json", qcw::OutputFormat::json},
        {"both", qcw::OutputFormat::both}};
    opt.format = formats.at(format);
    auto report = qcw::run(config, opt);
    for (auto const& e : report.experiments) {
      std::cerr << e.name << ": " << (e.ok ? "ok" : "FAILED (" + e.reason + ") " + e.error) << " ["
                << e.seconds << " s]\n";
    }
    std::cerr << "total " << report.seconds << " s, output in " << report.output_dir << "\n";
    return report.ok() ? 0 : 1;
  } catch (qcw::ConfigError const& e) {
    std::cerr << "config error" << (e.reason().empty() ? "" : " [" + e.reason() + "]") << ": "
              << e.what() << "\n";
    return 2;
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
