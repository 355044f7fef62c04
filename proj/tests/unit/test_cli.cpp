#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "commands.hpp"
#include "kerrtwpa/csv.hpp"
#include "kerrtwpa/errors.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
namespace kt = kerrtwpa;

namespace {

const fs::path kSource = KERRTWPA_SOURCE_DIR;
const fs::path kReference = kSource / "examples_config" / "reference_device.yaml";

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("kerrtwpa_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Runs the tool and returns its exit status; stderr lands in err().
  int run(const std::string& args) {
    const std::string cmd = std::string("\"") + KERRTWPA_BIN + "\" " + args + " >\"" +
                            (dir_ / "stdout.txt").string() + "\" 2>\"" +
                            (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string err() const { return slurp(dir_ / "stderr.txt"); }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  fs::path write_config(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

const char* kDevice = R"(device:
  i0_ua: 2.19
  r: 0.07
  cg_ff: 250
  cj_ff: 50
  n_cells: 700
)";

}  // namespace

TEST(RunConfig, ConvertsLabUnitsToSi) {
  const auto cfg = kt::cli::load_run_config(kReference);
  EXPECT_DOUBLE_EQ(cfg.device.i0, 2.19e-6);
  EXPECT_DOUBLE_EQ(cfg.device.cg, 250e-15);
  EXPECT_DOUBLE_EQ(cfg.device.cj, 50e-15);
  EXPECT_EQ(cfg.device.polarity.size(), 700u);
  ASSERT_TRUE(cfg.gain.has_value());
  EXPECT_DOUBLE_EQ(cfg.gain->pump.omegas.at(0), kt::units::ghz_to_rad_per_s(8.0));
  EXPECT_DOUBLE_EQ(cfg.gain->phi_ext, kt::constants::pi);
  ASSERT_TRUE(cfg.gain->loss_profile.has_value());
  EXPECT_TRUE(fs::exists(*cfg.gain->loss_profile));
  ASSERT_TRUE(cfg.impedance.has_value());
  EXPECT_DOUBLE_EQ(cfg.impedance->ladder.l_cell, 240e-12);
  EXPECT_DOUBLE_EQ(cfg.transient->ring_up, 8e-9);
  ASSERT_TRUE(cfg.noise_fit.has_value() && cfg.noise_fit->synthetic.has_value());
  EXPECT_DOUBLE_EQ(cfg.noise_fit->synthetic->twpa_temperatures.back(), 0.4);
}

TEST(RunConfig, RejectsUnknownKeysNamingTheField) {
  try {
    kt::cli::parse_run_config(std::string(kDevice) + "gain:\n  bogus: 1\n", ".");
    FAIL() << "expected ConfigError";
  } catch (const kt::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("gain.bogus"), std::string::npos) << e.what();
  }
  EXPECT_THROW(kt::cli::parse_run_config(std::string(kDevice) + "extra_block: {}\n", "."),
               kt::ConfigError);
}

TEST(RunConfig, RejectsAmbiguousPumpAndBadValues) {
  const std::string base = std::string(kDevice) +
                           "gain:\n  pump: {freq_ghz: 8, power_dbm: -75, amplitude_rad: 1}\n"
                           "  grid: {f_min_ghz: 4, f_max_ghz: 12, points: 11}\n";
  EXPECT_THROW(kt::cli::parse_run_config(base, "."), kt::ConfigError);
  std::string bad = kDevice;
  bad.replace(bad.find("0.07"), 4, "1.5");
  EXPECT_THROW(kt::cli::parse_run_config(bad, "."), kt::ConfigError);
}

TEST(RunConfig, OverridesApplyBeforeValidation) {
  const auto cfg = kt::cli::load_run_config(kReference, {"gain.pump.power_dbm=-75",
                                                         "gain.pump.phase_per_cell_rad=null",
                                                         "seed=7"});
  EXPECT_EQ(cfg.seed, 7u);
  ASSERT_TRUE(cfg.gain->pump.power_dbm.has_value());
  EXPECT_EQ(*cfg.gain->pump.power_dbm, -75.0);
  EXPECT_NE(cfg.canonical_text.find("-75"), std::string::npos);
  EXPECT_THROW(kt::cli::load_run_config(kReference, {"noequals"}), kt::ConfigError);
}

TEST(Sha256, KnownDigest) {
  EXPECT_EQ(kt::cli::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(Workspace, GainPeaksOnBothSidesOfPump) {
  ASSERT_EQ(run("gain \"" + kReference.string() + "\" -o \"" + (dir_ / "g").string() + "\""), 0)
      << err();
  const auto t = kt::csv::read_file(dir_ / "g" / "gain_fp8ghz.csv",
                                    {"f_signal_ghz", "gain_db", "delta_k_out_rad"});
  const auto f = t.column(0);
  const auto g = t.column(1);
  double lo = -1e9, hi = -1e9;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] < 8.0) lo = std::max(lo, g[i]);
    if (f[i] > 8.0) hi = std::max(hi, g[i]);
  }
  EXPECT_GT(lo, 10.0);
  EXPECT_GT(hi, 10.0);
}

TEST_F(Workspace, DeterministicOutputsAndCompleteManifest) {
  const auto a = dir_ / "a";
  const auto b = dir_ / "b";
  ASSERT_EQ(run("noise-fit \"" + kReference.string() + "\" -o \"" + a.string() + "\""), 0) << err();
  ASSERT_EQ(run("noise-fit \"" + kReference.string() + "\" -o \"" + b.string() + "\""), 0) << err();
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    const auto name = entry.path().filename();
    if (name == "manifest.json") continue;
    EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << name;
  }
  EXPECT_GE(files, 4u);

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["subcommand"], "noise-fit");
  EXPECT_EQ(manifest["seed"], 1234);
  EXPECT_EQ(manifest["config"]["sha256"].get<std::string>().size(), 64u);
  std::size_t listed = 0;
  for (const auto& out : manifest["outputs"]) {
    const auto path = a / out["file"].get<std::string>();
    ASSERT_TRUE(fs::exists(path));
    EXPECT_EQ(out["sha256"], kt::cli::sha256_hex(slurp(path)));
    EXPECT_EQ(out["bytes"].get<std::size_t>(), fs::file_size(path));
    ++listed;
  }
  EXPECT_EQ(listed, files - 1);
  EXPECT_TRUE(manifest.contains("libraries"));
}

TEST_F(Workspace, MissingLossProfileIsDataErrorWithoutOutputs) {
  const auto cfg = write_config(
      "missing.yaml", std::string(kDevice) +
                          "gain:\n  pump: {freq_ghz: 8, phase_per_cell_rad: 1.4}\n"
                          "  grid: {f_min_ghz: 4, f_max_ghz: 12, points: 11}\n"
                          "  loss_profile: nowhere.csv\n");
  const auto out = dir_ / "never";
  EXPECT_EQ(run("gain \"" + cfg.string() + "\" -o \"" + out.string() + "\""), 3);
  EXPECT_NE(err().find("nowhere.csv"), std::string::npos) << err();
  EXPECT_FALSE(fs::exists(out));
}

TEST_F(Workspace, UnknownKeyIsConfigError) {
  const auto cfg = write_config("bad.yaml", std::string(kDevice) + "gain:\n  bogus: 1\n");
  EXPECT_EQ(run("gain \"" + cfg.string() + "\" -o \"" + (dir_ / "x").string() + "\""), 2);
  EXPECT_NE(err().find("gain.bogus"), std::string::npos) << err();
  EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(Workspace, PumpBeyondGuardIsModelValidityError) {
  EXPECT_EQ(run("gain \"" + kReference.string() + "\" -o \"" + (dir_ / "x").string() +
                "\" --set gain.loss_profile=null --set gain.pump.phase_per_cell_rad=1.2"),
            5);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(Workspace, MissingSubcommandBlockIsConfigError) {
  const auto cfg = write_config("dev.yaml", kDevice);
  EXPECT_EQ(run("ripple \"" + cfg.string() + "\" -o \"" + (dir_ / "x").string() + "\""), 2);
  EXPECT_EQ(run("no-such-command \"" + cfg.string() + "\""), 2);
}

TEST_F(Workspace, FitFluxReportsReferenceParameters) {
  ASSERT_EQ(run("fit-flux \"" + kReference.string() + "\" -o \"" + (dir_ / "f").string() + "\""), 0)
      << err();
  const auto report = nlohmann::json::parse(slurp(dir_ / "f" / "fit_flux.json"));
  EXPECT_TRUE(report.dump().find("converged") != std::string::npos);
}
