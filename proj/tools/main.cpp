#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "coiso/cli/run.hpp"

namespace {

using namespace coiso::cli;

bool read_file(const std::string& path, std::string& text) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return false;
  std::ostringstream ss;
  ss << is.rdbuf();
  text = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SHAKE/RATTLE integrators for coisotropic constraints"};
  app.require_subcommand(1);

  std::string runConfig;
  std::string outputDir;
  long long seed = -1;
  std::string emit;
  auto* runCmd = app.add_subcommand("run", "integrate a configured problem and write results");
  runCmd->add_option("config", runConfig, "configuration file (TOML subset or JSON)")->required();
  runCmd->add_option("--output-dir", outputDir, "output directory (overrides output_dir)");
  runCmd->add_option("--seed", seed, "sampling seed for the structure report (overrides seed)");
  runCmd->add_option("--emit", emit, "comma-separated emission list (overrides emit)");

  std::string checkConfig;
  auto* checkCmd = app.add_subcommand("check", "structure report only (coisotropy and nondegeneracy)");
  checkCmd->add_option("config", checkConfig, "configuration file")->required();

  auto* listCmd = app.add_subcommand("list-problems", "list the builtin problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (listCmd->parsed()) {
    list_problems(std::cout);
    return kOk;
  }

  const std::string& path = runCmd->parsed() ? runConfig : checkConfig;
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "cannot read configuration file " << path << '\n';
    return kFilesystemError;
  }

  RunConfig cfg;
  try {
    cfg = parse_config(text);
    if (runCmd->parsed()) {
      if (!outputDir.empty()) cfg.outputDir = outputDir;
      if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);
      if (!emit.empty()) cfg.emit = split_list(emit);
      validate(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  }

  if (checkCmd->parsed()) return check(cfg, std::cout);
  return run(cfg, std::cerr);
}
