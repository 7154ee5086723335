#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "rtflow/config.hpp"
#include "rtflow/errors.hpp"

namespace rtflow::cli {

namespace {

constexpr const char* kSubcommands[][2] = {
    {"lift", "image (input= or phantom=crossing|bandlimited) -> lifted.lif"},
    {"flow", "lifted field (input= or phantom=bars|two_bundle|...) -> snapshots, traces"},
    {"reconstruct", "lifted field (input=) -> reconstructed.pfm"},
    {"enhance", "image -> lift, flow, reconstruct -> enhanced.pfm"},
    {"denoise-fodf", "FODF table (input=) or phantom=two_bundle -> denoised.fodf, error.txt"},
    {"icosphere", "write the subdiv icosphere vertices and weights"},
    {"metrics", "error curve of snapshots (input=index.txt or .lif) against reference="},
    {"verify", "gradient-flow bound checks as key=value records"},
};

std::string keys_help() {
  std::string s = "config keys (key=default):\n";
  for (const auto& k : RunConfig::keys()) s += "  " + k.name + "=" + k.default_value + "  " + k.help + "\n";
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Total-variation, mean-curvature and diffusion flows on position-orientation space"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.footer(keys_help());

  std::string config_path;
  std::vector<std::string> assignments;
  app.add_option("--config", config_path, "key=value file, applied before --set");
  app.add_option("--set", assignments, "override one key, e.g. --set eps=0.02 (repeatable)")->allow_extra_args(false);
  for (const auto& [name, help] : kSubcommands) app.add_subcommand(name, help);

  std::vector<const char*> argv{"rtflow"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& a : assignments) cfg.set_assignment(a);

    const std::filesystem::path out_dir = cfg.get("output");
    std::filesystem::create_directories(out_dir);
    {
      std::ofstream echo(out_dir / "config.txt");
      if (!echo) throw FormatError("cannot write " + (out_dir / "config.txt").string());
      echo << "# rtflow " << command << '\n';
      cfg.write(echo);
    }
    return run_command(command, Job{cfg, out_dir, out});
  } catch (const ConfigError& e) {
    err << "rtflow " << command << ": configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const FormatError& e) {
    err << "rtflow " << command << ": format error: " << e.what() << '\n';
    return kFormatError;
  } catch (const NumericalError& e) {
    err << "rtflow " << command << ": numerical abort: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "rtflow " << command << ": " << e.what() << '\n';
    return kFormatError;
  }
}

}  // namespace rtflow::cli
