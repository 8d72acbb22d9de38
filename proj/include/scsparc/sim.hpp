#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scsparc/base_matrix.hpp"
#include "scsparc/codec.hpp"
#include "scsparc/design_matrix.hpp"
#include "scsparc/params.hpp"
#include "scsparc/state_evolution.hpp"

namespace scsparc {

enum class Preset { fig3_wave, fig4_ser_vs_rate, fig5_omega_sweep, custom };
Preset parse_preset(const std::string& s);
std::string preset_name(Preset p);

enum class BaseSpecKind { omega_lambda, flat_1x1, single_row, custom_csv };

struct ExperimentConfig {
  Preset preset = Preset::custom;
  std::size_t L = 1024;
  std::size_t M = 512;
  std::vector<double> rates_nats;
  RateUnit display_unit = RateUnit::bits;
  double P = 15.0;
  double sigma2 = 1.0;
  BaseSpecKind base_kind = BaseSpecKind::omega_lambda;
  std::size_t omega = 6;
  std::size_t lambda = 32;
  std::string base_csv_path;
  Backend backend = Backend::hadamard;
  std::size_t n_trials = 200;
  std::uint64_t master_seed = 1;
  std::size_t max_iter = 0;  // 0: decoder default
  double stop_tol = 1e-8;
  std::size_t workers = 1;
  bool fixed_operator = false;    // reuse one design matrix across trials
  bool with_exact_se = false;     // attach exact-SE prediction columns
  std::size_t se_samples = 10000;
  std::size_t se_max_iter = 64;
  std::string out_prefix;
  bool progress = false;

  double snr() const { return P / sigma2; }
  void validate() const;
  BaseMatrix make_base() const;
  std::size_t base_rows() const;
  std::size_t base_cols() const;
  CodeParams params_for_rate(double rate_nats) const;
};

// Desk-scale preset defaults; full=true restores the full trial counts.
ExperimentConfig preset_config(Preset preset, bool full = false);

// Flat key=value config file; keys mirror the CLI flags.
ExperimentConfig load_config(const std::string& path);

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;  // design-operator seed for this trial
  double ser = 0.0;
  std::size_t iters = 0;
  bool warn = false;
  std::vector<double> nmse_final;                 // per column block
  std::vector<std::vector<double>> nmse_history;  // [iteration][block]
};

struct RatePointAggregate {
  double rate_nats = 0.0;
  double rate_bits = 0.0;
  std::size_t n = 0;
  double R_eff_nats = 0.0;
  double mean_ser = 0.0;
  double ser_std_error = 0.0;
  double mean_iters = 0.0;
  // Mean empirical NMSE per block, per iteration; trials that stopped early
  // contribute their final profile to later iterations.
  std::vector<std::vector<double>> mean_nmse_history;
  std::vector<TrialRecord> trials;
  // Predictions for the same parameters.
  std::vector<std::vector<double>> se_psi;  // exact SE, when requested
  std::vector<std::vector<double>> ase_psi;
  long ase_first_full_decode = -1;
};

struct Aggregate {
  ExperimentConfig config;
  std::vector<RatePointAggregate> points;
};

Aggregate run_experiment(const ExperimentConfig& config);

// Prediction-only report: exact SE, asymptotic SE and the decoding-start
// calculators, no coding trials.
struct PredictPoint {
  double rate_nats = 0.0;
  double rate_bits = 0.0;
  SeTrace exact;
  SeTrace asymptotic;
  bool has_prop1 = false;
  PropOneReport prop1;
};

std::vector<PredictPoint> predict(const ExperimentConfig& config);

std::string render_csv(const Aggregate& aggregate);
std::string render_json(const Aggregate& aggregate);
// Writes out_prefix + ".csv" and out_prefix + ".json" (LF line endings).
void emit_outputs(const Aggregate& aggregate, const std::string& out_prefix);

}  // namespace scsparc
