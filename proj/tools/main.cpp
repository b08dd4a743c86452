#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "matbf/errors.hpp"
#include "matbf/parallel.hpp"
#include "matbf/version.hpp"

using nlohmann::ordered_json;
using namespace matbf;

int main(int argc, char** argv) {
  CLI::App app{"Sequential Bayes-factor outlier detection for matrix-valued series"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  int threads = threads_from_env();
  std::string out_dir = ".";
  app.add_option("--threads", threads, "Worker thread cap (default: MATBF_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  // detect
  auto* det = app.add_subcommand("detect", "Rolling-window detection on a long-format CSV");
  std::string data, manifest, regime = "known_v", convention = "upper_survival";
  std::string classical_test = "gesd";
  std::size_t window = 0, mc_draws = 10000;
  double tau = 0.01, beta = 0.8;
  std::vector<double> alpha_grid, curve_grid, levels{0.01, 0.05};
  std::optional<std::string> sigma_l, v_path;
  std::optional<std::size_t> gesd_max, classical_window;
  bool no_robust = false, no_classical = false, bonferroni = false, freeze_sigma = false;
  std::uint64_t seed = 1;
  det->add_option("--data", data, "Long CSV t,row,col,value")->required();
  det->add_option("--manifest", manifest, "JSON shape manifest")->required();
  det->add_option("--window", window, "Rolling window length w (phi = w)")->required();
  det->add_option("--tau", tau, "Test size");
  det->add_option("--beta", beta, "Target power");
  det->add_option("--regime", regime, "known_v | unknown_v");
  det->add_option("--alpha-grid", alpha_grid, "Extra alphas reported for every t")->delimiter(',');
  det->add_option("--curve-grid", curve_grid, "Alphas for bf_curve.csv")->delimiter(',');
  det->add_option("--sigma-l", sigma_l, "User-supplied Sigma_L (dense CSV)");
  det->add_option("--v", v_path, "Known column covariance V (dense CSV)");
  det->add_flag("--freeze-sigma", freeze_sigma, "Estimate Sigma_L on the first window only");
  det->add_flag("--no-robust", no_robust, "Skip MBF/IBF/NIBF");
  det->add_flag("--no-classical", no_classical, "Skip Grubbs/GESD baselines");
  det->add_option("--classical-test", classical_test, "gesd | grubbs");
  det->add_option("--levels", levels, "Classical significance levels")->delimiter(',');
  det->add_flag("--bonferroni", bonferroni, "Divide classical levels by pn");
  det->add_option("--gesd-max", gesd_max, "GESD outlier cap (default ceil(0.1 length))");
  det->add_option("--classical-window", classical_window, "Trailing window for classical tests");
  det->add_option("--convention", convention, "upper_survival | upper_cdf");
  det->add_option("--mc-draws", mc_draws, "Monte Carlo draws for unknown-V calibration");
  det->add_option("--seed", seed, "Seed for Monte Carlo calibration");
  det->add_option("--out", out_dir, "Output directory");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Size/power table from simulated scenarios");
  int which_case = 1;
  std::vector<double> us{15.0};
  std::vector<std::string> masks{"all"};
  std::optional<std::size_t> reps;
  std::size_t sim_window = 79;
  std::optional<long> null_time;
  bool identity_v = false;
  std::uint64_t sim_seed = 1;
  double sim_tau = 0.01, sim_beta = 0.8;
  std::string sim_convention = "upper_survival";
  sim->add_option("--case", which_case, "1: p=30,n=10   2: p=n=50")->check(CLI::IsMember({1, 2}));
  sim->add_option("--u", us, "Outlier magnitudes")->delimiter(',');
  sim->add_option("--mask", masks, "all | RxC | N (comma separated)")->delimiter(',');
  sim->add_option("--reps", reps, "Replications J (default 100 / 25)");
  sim->add_option("--seed", sim_seed, "Base seed");
  sim->add_option("--window", sim_window, "Detector window (phi = w)");
  sim->add_option("--null-time", null_time, "Use one fixed t for the null column");
  sim->add_flag("--identity-v", identity_v, "Give the detector V = I instead of the true Psi");
  sim->add_option("--tau", sim_tau, "Test size");
  sim->add_option("--beta", sim_beta, "Target power");
  sim->add_option("--convention", sim_convention, "upper_survival | upper_cdf");
  sim->add_option("--out", out_dir, "Output directory");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Calibrated alpha and thresholds");
  int p = 0, n = 0;
  double phi = 0.0, cal_tau = 0.01, cal_beta = 0.8, alpha_lo = 0.01, alpha_hi = 0.99;
  long T = 0;
  int prescan = 64;
  std::string cal_convention = "upper_survival";
  cal->add_option("--p", p, "Rows")->required();
  cal->add_option("--n", n, "Columns")->required();
  cal->add_option("--phi", phi, "Prior precision factor")->required();
  cal->add_option("--T", T, "Absorbed observations")->required();
  cal->add_option("--tau", cal_tau, "Test size");
  cal->add_option("--beta", cal_beta, "Target power");
  cal->add_option("--alpha-lo", alpha_lo, "Lower end of the alpha search");
  cal->add_option("--alpha-hi", alpha_hi, "Upper end of the alpha search");
  cal->add_option("--prescan", prescan, "Grid points before bisection");
  cal->add_option("--convention", cal_convention, "upper_survival | upper_cdf");
  cal->add_option("--out", out_dir, "Output directory");

  // replay
  auto* rep = app.add_subcommand("replay", "Re-run a recorded command and compare outputs");
  std::string run_manifest;
  std::string replay_out;
  rep->add_option("--run-manifest", run_manifest, "run_manifest.json of a previous run")->required();
  rep->add_option("--out", replay_out, "Output directory for the re-run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kBadInput;
  }

  const ThreadLimit limit(threads);
  try {
    if (*det) {
      ordered_json c{{"data", data},
                     {"manifest", manifest},
                     {"window", window},
                     {"tau", tau},
                     {"beta", beta},
                     {"regime", regime},
                     {"alpha_grid", alpha_grid},
                     {"curve_grid", curve_grid},
                     {"sigma_l", sigma_l ? ordered_json(*sigma_l) : ordered_json(nullptr)},
                     {"v", v_path ? ordered_json(*v_path) : ordered_json(nullptr)},
                     {"freeze_sigma", freeze_sigma},
                     {"robust", !no_robust},
                     {"classical", !no_classical},
                     {"classical_test", classical_test},
                     {"levels", levels},
                     {"bonferroni", bonferroni},
                     {"gesd_max", gesd_max ? ordered_json(*gesd_max) : ordered_json(nullptr)},
                     {"classical_window",
                      classical_window ? ordered_json(*classical_window) : ordered_json(nullptr)},
                     {"convention", convention},
                     {"mc_draws", mc_draws},
                     {"seed", seed}};
      return cli::execute("detect", c, out_dir);
    }
    if (*sim) {
      ordered_json c{{"case", which_case},
                     {"u", us},
                     {"mask", masks},
                     {"reps", reps ? ordered_json(*reps) : ordered_json(nullptr)},
                     {"seed", sim_seed},
                     {"window", sim_window},
                     {"null_time", null_time ? ordered_json(*null_time) : ordered_json(nullptr)},
                     {"identity_v", identity_v},
                     {"tau", sim_tau},
                     {"beta", sim_beta},
                     {"convention", sim_convention}};
      return cli::execute("simulate", c, out_dir);
    }
    if (*cal) {
      ordered_json c{{"p", p},
                     {"n", n},
                     {"phi", phi},
                     {"T", T},
                     {"tau", cal_tau},
                     {"beta", cal_beta},
                     {"alpha_lo", alpha_lo},
                     {"alpha_hi", alpha_hi},
                     {"prescan", prescan},
                     {"convention", cal_convention}};
      return cli::execute("calibrate", c, out_dir);
    }
    return cli::replay(run_manifest, replay_out);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kBadInput;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kBadInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kBadInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return cli::kNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: configuration: " << e.what() << '\n';
    return cli::kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return cli::kNumerical;
  }
}
