#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scsparc/rng.hpp"
#include "scsparc/sim.hpp"

namespace {

using namespace scsparc;

struct CommonFlags {
  std::string preset = "custom";
  std::string config_path;
  std::vector<double> rates;
  std::string rate_unit = "bits";
  std::size_t L = 0, M = 0;
  long omega = -1, lambda = -1;
  double snr = 0.0;
  std::string base;
  std::string base_csv;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string backend;
  std::string out;
  bool full = false;
  std::size_t workers = 0;
  std::size_t max_iter = 0;
  double stop_tol = 0.0;
  bool fixed_operator = false;
  std::size_t se_samples = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--preset", f.preset, "fig3_wave | fig4_ser_vs_rate | fig5_omega_sweep | custom");
  cmd->add_option("--config", f.config_path, "flat key=value config file");
  cmd->add_option("--rate", f.rates, "rate value(s), in --rate-unit");
  cmd->add_option("--rate-unit", f.rate_unit)->check(CLI::IsMember({"bits", "nats"}));
  cmd->add_option("--L", f.L, "number of sections");
  cmd->add_option("--M", f.M, "columns per section");
  cmd->add_option("--omega", f.omega, "coupling width");
  cmd->add_option("--lambda", f.lambda, "coupling length");
  cmd->add_option("--snr", f.snr, "P/sigma2 (sets P=snr, sigma2=1)");
  cmd->add_option("--base", f.base, "omega_lambda | flat | single_row | csv");
  cmd->add_option("--base-csv", f.base_csv, "path for --base csv");
  cmd->add_option("--trials", f.trials);
  auto* s = cmd->add_option("--seed", f.seed);
  s->each([&f](const std::string&) { f.seed_set = true; });
  cmd->add_option("--backend", f.backend)->check(CLI::IsMember({"gaussian", "hadamard"}));
  cmd->add_option("--out", f.out, "output file prefix (.csv/.json)");
  cmd->add_flag("--full", f.full, "full-scale preset trial counts");
  cmd->add_option("--workers", f.workers, "trial worker threads");
  cmd->add_option("--max-iter", f.max_iter);
  cmd->add_option("--stop-tol", f.stop_tol);
  cmd->add_flag("--fixed-operator", f.fixed_operator, "reuse one design matrix across trials");
  cmd->add_option("--se-samples", f.se_samples, "Monte Carlo samples per SE expectation");
}

ExperimentConfig build_config(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = load_config(f.config_path);
  else cfg = preset_config(parse_preset(f.preset), f.full);
  if (f.full) {
    const ExperimentConfig scale = preset_config(cfg.preset, true);
    cfg.n_trials = scale.n_trials;
  }
  const RateUnit unit = parse_rate_unit(f.rate_unit);
  cfg.display_unit = unit;
  if (!f.rates.empty()) {
    cfg.rates_nats.clear();
    for (double r : f.rates) cfg.rates_nats.push_back(convert_rate(r, unit, RateUnit::nats));
  }
  if (f.L) cfg.L = f.L;
  if (f.M) cfg.M = f.M;
  if (f.omega >= 0) cfg.omega = static_cast<std::size_t>(f.omega);
  if (f.lambda >= 0) cfg.lambda = static_cast<std::size_t>(f.lambda);
  if (f.snr > 0.0) {
    cfg.P = f.snr;
    cfg.sigma2 = 1.0;
  }
  if (!f.base.empty()) {
    if (f.base == "omega_lambda") cfg.base_kind = BaseSpecKind::omega_lambda;
    else if (f.base == "flat") cfg.base_kind = BaseSpecKind::flat_1x1;
    else if (f.base == "single_row") cfg.base_kind = BaseSpecKind::single_row;
    else if (f.base == "csv") cfg.base_kind = BaseSpecKind::custom_csv;
    else throw std::invalid_argument("unknown base kind: " + f.base);
  }
  if (!f.base_csv.empty()) cfg.base_csv_path = f.base_csv;
  if (f.trials) cfg.n_trials = f.trials;
  if (f.seed_set) cfg.master_seed = f.seed;
  if (!f.backend.empty()) cfg.backend = parse_backend(f.backend);
  if (!f.out.empty()) cfg.out_prefix = f.out;
  if (f.workers) cfg.workers = f.workers;
  if (f.max_iter) cfg.max_iter = f.max_iter;
  if (f.stop_tol > 0.0) cfg.stop_tol = f.stop_tol;
  if (f.fixed_operator) cfg.fixed_operator = true;
  if (f.se_samples) cfg.se_samples = f.se_samples;
  cfg.progress = true;
  return cfg;
}

double shown_rate(double nats, RateUnit unit) {
  return convert_rate(nats, RateUnit::nats, unit);
}

int cmd_simulate(const CommonFlags& f) {
  ExperimentConfig cfg = build_config(f);
  const Aggregate agg = run_experiment(cfg);
  const char* unit = cfg.display_unit == RateUnit::bits ? "bits" : "nats";
  for (const auto& pt : agg.points)
    std::printf("R=%.6g %s  n=%zu  mean SER=%.6g  (std err %.3g)  mean iters=%.2f\n",
                shown_rate(pt.rate_nats, cfg.display_unit), unit, pt.n, pt.mean_ser,
                pt.ser_std_error, pt.mean_iters);
  if (!cfg.out_prefix.empty())
    std::printf("wrote %s.csv and %s.json\n", cfg.out_prefix.c_str(), cfg.out_prefix.c_str());
  return 0;
}

int cmd_predict(const CommonFlags& f, bool exact_only, bool threshold_only) {
  ExperimentConfig cfg = build_config(f);
  if (threshold_only) {
    for (double r : cfg.rates_nats) {
      const std::size_t om = cfg.base_kind == BaseSpecKind::flat_1x1 ? 1 : cfg.omega;
      const std::size_t la = cfg.base_kind == BaseSpecKind::flat_1x1 ? 1 : cfg.lambda;
      const PropOneReport rep = proposition_one(om, la, cfg.snr(), r);
      std::printf("R=%.6g bits  kappa=%.6g  rate_ok=%s  omega_threshold=%.6g  omega_ok=%s  "
                  "c*>=%ld  iters<=%ld  full_first_iter=%s\n",
                  rep.R_bits, rep.kappa, rep.rate_condition_ok ? "yes" : "no",
                  rep.omega_threshold, rep.omega_ok ? "yes" : "no", rep.c_star_lower_bound,
                  rep.iteration_upper_bound, rep.full_decode_first_iter ? "yes" : "no");
    }
    return 0;
  }
  if (exact_only) {
    const BaseMatrix base = cfg.make_base();
    for (std::size_t i = 0; i < cfg.rates_nats.size(); ++i) {
      const double r = cfg.rates_nats[i];
      const SeTrace se = se_recursion(base, cfg.sigma2, r, cfg.M, cfg.se_max_iter,
                                      cfg.se_samples, derive_seed(cfg.master_seed, "se", {i}));
      std::printf("R=%.6g bits  iterations=%zu  final psi:",
                  shown_rate(r, RateUnit::bits), se.iterations());
      for (double v : se.final_psi()) std::printf(" %.4f", v);
      std::printf("\n");
    }
    return 0;
  }
  const auto points = predict(cfg);
  for (const auto& pt : points) {
    std::printf("R=%.6g bits:\n", pt.rate_bits);
    std::printf("  exact SE: %zu iterations, final max psi=%.6g\n", pt.exact.iterations(),
                *std::max_element(pt.exact.final_psi().begin(), pt.exact.final_psi().end()));
    const bool decoded = pt.asymptotic.fully_decoded();
    std::printf("  asymptotic SE: %s after %zu iterations\n",
                decoded ? "decodes" : "does NOT decode", pt.asymptotic.iterations());
    if (pt.has_prop1)
      std::printf("  decoding-start: rate_ok=%s omega_threshold=%.6g omega_ok=%s c*>=%ld "
                  "iters<=%ld full_first_iter=%s\n",
                  pt.prop1.rate_condition_ok ? "yes" : "no", pt.prop1.omega_threshold,
                  pt.prop1.omega_ok ? "yes" : "no", pt.prop1.c_star_lower_bound,
                  pt.prop1.iteration_upper_bound, pt.prop1.full_decode_first_iter ? "yes" : "no");
  }
  return 0;
}

int cmd_export_base(const CommonFlags& f, std::string out_path) {
  ExperimentConfig cfg = build_config(f);
  if (cfg.rates_nats.empty()) cfg.rates_nats = {1.0};  // unused by the export
  if (!f.out.empty()) out_path = f.out;  // --out is an alias for --out-csv
  const BaseMatrix W = cfg.make_base();
  save_base_matrix_csv(W, out_path);
  std::printf("wrote %zux%zu base matrix to %s\n", W.rows(), W.cols(), out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatially coupled sparse regression codes: simulation and prediction"};
  app.require_subcommand(1);

  CommonFlags sim_f, pred_f, se_f, thr_f, exp_f;
  std::string export_out = "base_matrix.csv";

  auto* sim = app.add_subcommand("simulate", "Monte Carlo coding trials");
  add_common(sim, sim_f);
  auto* pred = app.add_subcommand("predict", "exact SE + asymptotic SE + decoding-start report");
  add_common(pred, pred_f);
  auto* se = app.add_subcommand("se", "exact state evolution only");
  add_common(se, se_f);
  auto* thr = app.add_subcommand("threshold", "coupling-width threshold report only");
  add_common(thr, thr_f);
  auto* exp = app.add_subcommand("export-base-matrix", "write the base matrix W as CSV");
  add_common(exp, exp_f);
  exp->add_option("--out-csv", export_out, "destination CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_f);
    if (pred->parsed()) return cmd_predict(pred_f, false, false);
    if (se->parsed()) return cmd_predict(se_f, true, false);
    if (thr->parsed()) return cmd_predict(thr_f, false, true);
    if (exp->parsed()) return cmd_export_base(exp_f, export_out);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
