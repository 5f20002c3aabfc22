#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>

#include "spdcsim/commands.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string preset = "quoted";
  std::string out_dir = ".";
  std::string input_path;
  std::optional<std::uint64_t> seed;
};

spdcsim::ExperimentConfig resolve_config(const Options& options) {
  spdcsim::ExperimentConfig config = spdcsim::preset_by_name(options.preset);
  if (!options.config_path.empty()) {
    nlohmann::json document;
    try {
      document = nlohmann::json::parse(
          spdcsim::read_text_file(options.config_path));
    } catch (const nlohmann::json::parse_error& err) {
      throw spdcsim::ConfigError({std::string("config: ") + err.what()});
    }
    config = spdcsim::validate_config(document, config);
  }
  if (options.seed) config.seed = *options.seed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-enhanced entangled photon pair source simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Options options;
  app.add_option("--config", options.config_path, "JSON config file");
  app.add_option("--preset", options.preset, "Parameter preset")
      ->check(CLI::IsMember({"quoted", "ratios"}));
  app.add_option("--out", options.out_dir, "Output directory");
  app.add_option("--seed", options.seed, "Override the RNG seed");

  const std::vector<std::string> commands = {
      "spectrum",  "entangle",  "chsh",     "tomo-simulate", "tomo-reconstruct",
      "g2-sample", "g2-fit",    "coherence", "rates-fit",    "pdh-sweep"};
  const std::vector<std::string> needs_input = {"tomo-reconstruct", "g2-fit",
                                                "rates-fit"};
  for (const auto& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    if (std::find(needs_input.begin(), needs_input.end(), name) !=
        needs_input.end())
      sub->add_option("--input", options.input_path, "Input CSV file")
          ->required();
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const spdcsim::ExperimentConfig config = resolve_config(options);
    std::optional<std::filesystem::path> input;
    if (!options.input_path.empty()) input = options.input_path;
    const nlohmann::json report =
        spdcsim::run_command(command, config, options.out_dir, input);
    std::cout << report.dump(2) << '\n';
    return 0;
  } catch (const spdcsim::ConfigError& err) {
    for (const auto& message : err.messages())
      std::cerr << "error: " << message << '\n';
    return 1;
  } catch (const spdcsim::ConvergenceError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 3;
  } catch (const spdcsim::IoError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  } catch (const std::domain_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
}
