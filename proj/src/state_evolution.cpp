#include "scsparc/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "scsparc/params.hpp"
#include "scsparc/rng.hpp"

namespace scsparc {

bool SeTrace::fully_decoded(double tol) const {
  for (double v : psi.back())
    if (v > tol) return false;
  return true;
}

std::vector<double> SeTrace::decoded_fraction(double tol) const {
  std::vector<double> out;
  out.reserve(psi.size());
  for (const auto& profile : psi) {
    std::size_t decoded = 0;
    for (double v : profile)
      if (v <= tol) ++decoded;
    out.push_back(static_cast<double>(decoded) / static_cast<double>(profile.size()));
  }
  return out;
}

MseEstimate denoiser_mse(double tau, std::size_t M, std::size_t n_samples, std::uint64_t seed) {
  if (!(tau > 0.0)) throw std::invalid_argument("denoiser_mse: tau must be positive");
  if (M < 1 || n_samples < 1) throw std::invalid_argument("denoiser_mse: M, n_samples >= 1");

  const double a = 1.0 / std::sqrt(tau);
  const double penalty = 1.0 / tau;
  Rng rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  std::vector<double> u(M);
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::size_t j = 0; j < M; ++j) u[j] = rng.gaussian();
    // ratio = 1 / (1 + exp(lse_rest - a*U1)), lse_rest over a*Uj - 1/tau, j >= 2
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < M; ++j) m = std::max(m, a * u[j]);
    m -= penalty;
    double rest;
    if (std::isinf(m)) {
      rest = -std::numeric_limits<double>::infinity();  // M = 1
    } else {
      double acc = 0.0;
      for (std::size_t j = 1; j < M; ++j) acc += std::exp(a * u[j] - penalty - m);
      rest = m + std::log(acc);
    }
    const double ratio = 1.0 / (1.0 + std::exp(rest - a * u[0]));
    sum += ratio;
    sum_sq += ratio * ratio;
  }
  MseEstimate est;
  est.value = sum / static_cast<double>(n_samples);
  const double var = std::max(0.0, sum_sq / static_cast<double>(n_samples) - est.value * est.value);
  est.std_error = std::sqrt(var / static_cast<double>(n_samples));
  return est;
}

namespace {

// Gauss-Hermite nodes/weights for weight e^{-x^2}, via sign changes of the
// orthonormal Hermite polynomial followed by bisection; weights from the
// Christoffel sum 1/sum_k p_k(x)^2.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

double hermite_orthonormal(std::size_t n, double x, std::vector<double>* all = nullptr) {
  double p_prev = 0.0;
  double p = 0.7511255444649425;  // pi^{-1/4}
  if (all) all->assign(1, p);
  for (std::size_t k = 0; k < n; ++k) {
    const double p_next = x * std::sqrt(2.0 / (k + 1.0)) * p -
                          std::sqrt(static_cast<double>(k) / (k + 1.0)) * p_prev;
    p_prev = p;
    p = p_next;
    if (all && k + 1 < n) all->push_back(p);
  }
  return p;
}

GaussHermite gauss_hermite(std::size_t n) {
  const double bound = std::sqrt(2.0 * n + 1.0) + 1.0;
  const std::size_t grid = 64 * n;
  GaussHermite gh;
  double x_prev = -bound;
  double f_prev = hermite_orthonormal(n, x_prev);
  for (std::size_t g = 1; g <= grid; ++g) {
    const double x = -bound + 2.0 * bound * static_cast<double>(g) / static_cast<double>(grid);
    const double f = hermite_orthonormal(n, x);
    if (f_prev == 0.0 || f * f_prev < 0.0) {
      double lo = x_prev, hi = x;
      double flo = f_prev;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = hermite_orthonormal(n, mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if (fm * flo < 0.0) hi = mid;
        else { lo = mid; flo = fm; }
      }
      const double root = 0.5 * (lo + hi);
      std::vector<double> lower;
      hermite_orthonormal(n, root, &lower);
      double christoffel = 0.0;
      for (double pk : lower) christoffel += pk * pk;
      gh.nodes.push_back(root);
      gh.weights.push_back(1.0 / christoffel);
    }
    x_prev = x;
    f_prev = f;
  }
  if (gh.nodes.size() != n) throw std::runtime_error("gauss_hermite: root search failed");
  return gh;
}

}  // namespace

double denoiser_mse_quadrature(double tau, std::size_t M, std::size_t points_per_dim) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (M < 1 || M > 4) throw std::invalid_argument("quadrature oracle supports M <= 4 only");
  const GaussHermite gh = gauss_hermite(points_per_dim);
  const double a = 1.0 / std::sqrt(tau);
  const double penalty = 1.0 / tau;
  const double sqrt2 = std::sqrt(2.0);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::acos(-1.0));

  std::vector<std::size_t> idx(M, 0);
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    double u[4];
    for (std::size_t d = 0; d < M; ++d) {
      weight *= gh.weights[idx[d]] * inv_sqrt_pi;
      u[d] = sqrt2 * gh.nodes[idx[d]];
    }
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < M; ++j) m = std::max(m, a * u[j]);
    m -= penalty;
    double rest = -std::numeric_limits<double>::infinity();
    if (!std::isinf(m)) {
      double acc = 0.0;
      for (std::size_t j = 1; j < M; ++j) acc += std::exp(a * u[j] - penalty - m);
      rest = m + std::log(acc);
    }
    total += weight / (1.0 + std::exp(rest - a * u[0]));

    std::size_t d = 0;
    while (d < M && ++idx[d] == points_per_dim) idx[d++] = 0;
    if (d == M) break;
  }
  return total;
}

SeTrace se_recursion(const BaseMatrix& W, double sigma2, double R_nats, std::size_t M,
                     std::size_t T, std::size_t n_samples, std::uint64_t seed) {
  if (T < 1) throw std::invalid_argument("se_recursion: T >= 1");
  if (R_nats <= 0.0) throw std::invalid_argument("se_recursion: rate must be positive");
  const std::size_t L_R = W.rows(), L_C = W.cols();
  const double ln_M = std::log(static_cast<double>(M));

  SeTrace trace;
  trace.mode = SeMode::exact;
  trace.psi.push_back(std::vector<double>(L_C, 1.0));

  for (std::size_t t = 0; t < T; ++t) {
    const std::vector<double>& psi = trace.psi.back();
    std::vector<double> phi(L_R);
    for (std::size_t r = 0; r < L_R; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < L_C; ++c) acc += W(r, c) * psi[c];
      phi[r] = sigma2 + acc / static_cast<double>(L_C);
    }

    std::vector<double> tau(L_C), nu(L_C), psi_next(L_C);
    for (std::size_t c = 0; c < L_C; ++c) {
      double snr_eff = 0.0;
      for (std::size_t r = 0; r < L_R; ++r) snr_eff += W(r, c) / phi[r];
      snr_eff /= static_cast<double>(L_R);
      if (!(snr_eff > 0.0))
        throw std::invalid_argument("se_recursion: base matrix column has zero signal");
      tau[c] = R_nats / (ln_M * snr_eff);
      nu[c] = 1.0 / (tau[c] * ln_M);
      psi_next[c] = 1.0 - denoiser_mse(tau[c], M, n_samples,
                                       derive_seed(seed, "se-mse", {t, c})).value;
    }

    double change = 0.0;
    for (std::size_t c = 0; c < L_C; ++c)
      change = std::max(change, std::abs(psi_next[c] - psi[c]));

    trace.phi.push_back(std::move(phi));
    trace.tau.push_back(std::move(tau));
    trace.nu.push_back(std::move(nu));
    trace.psi.push_back(std::move(psi_next));
    if (change < 1e-6) break;
  }
  return trace;
}

SeTrace asymptotic_se(const BaseMatrix& W, double sigma2, double R_nats) {
  if (R_nats <= 0.0) throw std::invalid_argument("asymptotic_se: rate must be positive");
  const std::size_t L_R = W.rows(), L_C = W.cols();

  SeTrace trace;
  trace.mode = SeMode::asymptotic;
  trace.psi.push_back(std::vector<double>(L_C, 1.0));

  // 0/1 profile space is finite; the fixed point is reached within L_C+1
  // steps in practice, the cap is a hard stop.
  for (std::size_t t = 0; t < 2 * L_C + 4; ++t) {
    const std::vector<double>& psi = trace.psi.back();
    std::vector<double> phi(L_R);
    for (std::size_t r = 0; r < L_R; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < L_C; ++c) acc += W(r, c) * psi[c];
      phi[r] = sigma2 + acc / static_cast<double>(L_C);
    }
    std::vector<double> psi_next(L_C);
    for (std::size_t c = 0; c < L_C; ++c) {
      double acc = 0.0;
      for (std::size_t r = 0; r < L_R; ++r) acc += W(r, c) / phi[r];
      // strict inequality: a value exactly at 2R does not decode
      psi_next[c] = (acc / static_cast<double>(L_R) > 2.0 * R_nats) ? 0.0 : 1.0;
    }
    const bool fixed = (psi_next == psi);
    trace.phi.push_back(std::move(phi));
    trace.psi.push_back(std::move(psi_next));
    if (fixed) break;
  }
  return trace;
}

SeTrace asymptotic_se_band(std::size_t omega, std::size_t lambda, double snr, double R_nats) {
  if (omega < 1 || lambda + 1 < 2 * omega)
    throw std::invalid_argument("asymptotic_se_band: need omega >= 1, Lambda >= 2*omega-1");
  if (R_nats <= 0.0) throw std::invalid_argument("asymptotic_se_band: rate must be positive");
  const std::size_t L_R = lambda + omega - 1;
  const std::size_t L_C = lambda;
  const double kappa = static_cast<double>(L_R) / static_cast<double>(L_C);

  SeTrace trace;
  trace.mode = SeMode::asymptotic;
  trace.psi.push_back(std::vector<double>(L_C, 1.0));

  for (std::size_t t = 0; t < 2 * L_C + 4; ++t) {
    const std::vector<double>& psi = trace.psi.back();
    std::vector<double> phi(L_R);
    for (std::size_t r = 0; r < L_R; ++r) {
      const std::size_t lo = r + 1 >= omega ? r + 1 - omega : 0;
      const std::size_t hi = std::min(r, L_C - 1);
      double acc = 0.0;
      for (std::size_t c = lo; c <= hi; ++c) acc += psi[c];
      phi[r] = 1.0 + kappa * snr / static_cast<double>(omega) * acc;  // sigma2 = 1
    }
    std::vector<double> psi_next(L_C);
    for (std::size_t c = 0; c < L_C; ++c) {
      double acc = 0.0;
      for (std::size_t r = c; r < c + omega; ++r) acc += 1.0 / phi[r];
      psi_next[c] =
          (snr / static_cast<double>(omega) * acc > 2.0 * R_nats) ? 0.0 : 1.0;
    }
    const bool fixed = (psi_next == psi);
    trace.phi.push_back(std::move(phi));
    trace.psi.push_back(std::move(psi_next));
    if (fixed) break;
  }
  return trace;
}

PropOneReport proposition_one(std::size_t omega, std::size_t lambda, double snr, double R_nats) {
  if (omega < 1 || lambda + 1 < 2 * omega)
    throw std::invalid_argument("proposition_one: need omega >= 1, Lambda >= 2*omega-1");
  if (R_nats <= 0.0 || snr <= 0.0)
    throw std::invalid_argument("proposition_one: rate and snr must be positive");

  PropOneReport rep;
  rep.kappa = static_cast<double>(lambda + omega - 1) / static_cast<double>(lambda);
  rep.R_nats = R_nats;
  rep.R_bits = convert_rate(R_nats, RateUnit::nats, RateUnit::bits);

  const double ks = rep.kappa * snr;
  rep.rate_condition_ok = R_nats < std::log1p(ks) / (2.0 * rep.kappa);
  rep.full_decode_first_iter = snr / (1.0 + ks) > 2.0 * R_nats;

  const double diff = 1.0 / std::expm1(2.0 * R_nats * rep.kappa) - 1.0 / ks;
  if (diff <= 0.0) {
    // rate too high for any coupling width at this kappa
    rep.omega_threshold = std::numeric_limits<double>::infinity();
    rep.omega_ok = false;
    return rep;
  }
  rep.omega_threshold = 1.0 / diff;
  rep.omega_ok = static_cast<double>(omega) > rep.omega_threshold;

  const double expr = static_cast<double>(omega) * (1.0 + ks) / (ks * ks) *
                      (std::log1p(ks) - 2.0 * R_nats * rep.kappa);
  rep.c_star_lower_bound =
      std::max(0L, std::min(static_cast<long>(omega) - 1, static_cast<long>(std::floor(expr))));
  if (rep.c_star_lower_bound >= 1)
    rep.iteration_upper_bound = static_cast<long>(
        (lambda + 2 * rep.c_star_lower_bound - 1) / (2 * rep.c_star_lower_bound));
  return rep;
}

}  // namespace scsparc
