#pragma once

#include <cstdint>
#include <vector>

#include "scsparc/base_matrix.hpp"

namespace scsparc {

enum class SeMode { exact, asymptotic };

// Per-iteration state-evolution profiles. psi has one more row than phi:
// psi[0] is the all-ones initialization and psi[t+1] is produced from
// phi[t]. tau/nu are populated in exact mode only.
struct SeTrace {
  SeMode mode = SeMode::exact;
  std::vector<std::vector<double>> phi;  // phi[t], length L_R
  std::vector<std::vector<double>> psi;  // psi[t], length L_C
  std::vector<std::vector<double>> tau;  // tau[t], length L_C
  std::vector<std::vector<double>> nu;   // nu[t] = 1/(tau[t]*ln M), length L_C

  std::size_t iterations() const { return phi.size(); }
  const std::vector<double>& final_psi() const { return psi.back(); }
  bool fully_decoded(double tol = 1e-9) const;
  // Fraction of columns with psi[t] below tol.
  std::vector<double> decoded_fraction(double tol = 1e-9) const;
};

struct MseEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of the denoiser MSE factor
//   E[ e^{U1/sqrt(tau)} / (e^{U1/sqrt(tau)} + e^{-1/tau} sum_{j>=2} e^{Uj/sqrt(tau)}) ]
// over n_samples draws of M iid standard Gaussians, evaluated in log-space.
MseEstimate denoiser_mse(double tau, std::size_t M, std::size_t n_samples, std::uint64_t seed);

// Tensor-product Gauss-Hermite quadrature of the same integrand; exactness
// oracle, limited to M <= 4.
double denoiser_mse_quadrature(double tau, std::size_t M, std::size_t points_per_dim = 64);

// Exact state evolution: phi^t_r = sigma2 + (1/L_C) sum_c W_rc psi^t_c,
// tau^t_c = (R/lnM) / ((1/L_R) sum_r W_rc/phi^t_r), psi^{t+1}_c = 1 - E(tau^t_c).
// R in nats. Stops after T iterations or when psi changes by < 1e-6.
SeTrace se_recursion(const BaseMatrix& W, double sigma2, double R_nats, std::size_t M,
                     std::size_t T, std::size_t n_samples, std::uint64_t seed);

// Large-M limit: psi entries are 0/1, a column decodes iff
// (1/L_R) sum_r W_rc/phi_r > 2R (strict). Runs to a fixed point.
SeTrace asymptotic_se(const BaseMatrix& W, double sigma2, double R_nats);

// Closed-form fast path of asymptotic_se for the (omega, Lambda) band
// matrix; P cancels, only snr enters.
SeTrace asymptotic_se_band(std::size_t omega, std::size_t lambda, double snr, double R_nats);

struct PropOneReport {
  double kappa = 0.0;
  double R_nats = 0.0;
  double R_bits = 0.0;
  bool rate_condition_ok = false;   // R < (1/2k) ln(1+k*snr)
  double omega_threshold = 0.0;     // minimum coupling width, +inf when rate condition fails
  bool omega_ok = false;            // omega > omega_threshold
  long c_star_lower_bound = 0;      // columns per end decoded at t=1
  long iteration_upper_bound = 0;   // ceil(Lambda/(2 c*)), 0 when c* < 1
  bool full_decode_first_iter = false;  // snr/(1+k*snr) > 2R
};

PropOneReport proposition_one(std::size_t omega, std::size_t lambda, double snr, double R_nats);

}  // namespace scsparc
