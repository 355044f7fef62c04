#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "commands.hpp"
#include "kerrtwpa/errors.hpp"
#include "run_config.hpp"

namespace {

constexpr int kExitConfig = static_cast<int>(kerrtwpa::ErrorKind::config);

const std::map<std::string, std::string> kHelp = {
    {"cell-sweep", "SNAIL expansion coefficients, inductance and g3/g4 versus flux"},
    {"dispersion", "wavevector and transmitted phase over a frequency grid"},
    {"gain", "coupled-mode gain profile for one or more pump frequencies"},
    {"phase-match", "phase-matched signal/idler pairs per pump"},
    {"noise-sim", "gain and added noise with distributed line loss"},
    {"noise-fit", "output-line and TWPA noise fits on radiometer data"},
    {"impedance", "Bloch impedance and |S21| of an LC ladder"},
    {"ripple", "gain ripple versus device impedance mismatch"},
    {"transient", "time-domain lattice run and second-harmonic ratio"},
    {"fit-phase", "cell inductance from transmitted phase"},
    {"fit-flux", "critical current and asymmetry from inductance versus flux"},
};

}  // namespace

int main(int argc, char** argv) {
  using namespace kerrtwpa;
  CLI::App app{"Reversed-Kerr SNAIL TWPA simulation and calibration"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
  for (const auto& name : cli::subcommands()) {
    auto* sub = app.add_subcommand(name, kHelp.at(name));
    sub->add_option("config", config_path, "run file (YAML)")->required();
    sub->add_option("--set", overrides, "override a run-file field, e.g. gain.pump.power_dbm=-75");
    sub->add_option("-o,--output-dir", output_dir, "output directory (overrides output_dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    const auto cfg = cli::load_run_config(config_path, overrides);
    const auto output = cli::run_command(sub, cfg);
    const std::filesystem::path dir = output_dir.empty() ? cfg.output_dir : std::filesystem::path(output_dir);
    cli::write_outputs(sub, cfg, output, dir);
    for (const auto& d : output.diagnostics) std::cerr << "note: " << d << "\n";
    for (const auto& f : output.files) std::cout << (dir / f.name).string() << "\n";
    std::cout << (dir / "manifest.json").string() << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
