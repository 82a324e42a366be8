#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vlcsec/scenario.hpp"
#include "vlcsec/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCase = 3;

int emit(const std::string& csv, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << csv;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitInternal;
  }
  out << csv;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy-rate evaluation and beamformer optimization for "
               "intensity-constrained MIMO optical wiretap channels"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  auto* rate = app.add_subcommand("rate", "Evaluate the direct-connected rate over the SNR sweep");
  rate->add_option("--config", config_path, "JSON scenario file")->required();
  rate->add_option("--out", out_path, "Output CSV path (default stdout)");

  int max_iters = -1;
  double tol = -1.0;
  std::string log_base;
  auto* opt = app.add_subcommand("optimize", "Optimize the configured beamforming schemes");
  opt->add_option("--config", config_path, "JSON scenario file")->required();
  opt->add_option("--out", out_path, "Output CSV path (default stdout)");
  opt->add_option("--max-iters", max_iters, "Iteration cap override");
  opt->add_option("--tol", tol, "Step/objective tolerance override");
  opt->add_option("--log-base", log_base, "Reported rate base")
      ->check(CLI::IsMember({"2", "e"}));

  double vtol = -1.0;
  bool perturb = false;
  auto* val = app.add_subcommand("validate", "Run the numerical cross-check suite");
  val->add_option("--tol", vtol, "Tolerance override for every check");
  val->add_flag("--perturb-gradient", perturb,
                "Bias the analytic gradients (negative control)")
      ->group("");  // hidden

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(rate) || app.got_subcommand(opt)) {
      auto sc = vlcsec::load_scenario(config_path);
      if (app.got_subcommand(opt)) {
        if (max_iters > 0) sc.sca.max_iters = max_iters;
        if (tol > 0.0) {
          sc.sca.tol_step = tol;
          sc.sca.tol_obj = tol;
        }
        if (log_base == "2") sc.log_base = 2.0;
        if (log_base == "e") sc.log_base = M_E;
        return emit(vlcsec::run_optimize_csv(sc), out_path);
      }
      return emit(vlcsec::run_rate_csv(sc), out_path);
    }

    vlcsec::ValidateOptions vo;
    vo.tol = vtol;
    vo.perturb_gradient = perturb;
    const auto results = vlcsec::run_validation(vo);
    for (const auto& r : results) {
      std::printf("%s %-22s error=%.3e tol=%.3e%s\n", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.error, r.tol,
                  vtol > 0.0 ? " (non-default tolerance)" : "");
    }
    return vlcsec::all_passed(results) ? kExitOk : kExitInternal;
  } catch (const vlcsec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const vlcsec::CaseError& e) {
    std::cerr << "case error: " << e.what() << "\n";
    return kExitCase;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
