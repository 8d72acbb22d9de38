#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scsparc/base_matrix.hpp"
#include "scsparc/state_evolution.hpp"

using namespace scsparc;

namespace {
const double ln2 = std::log(2.0);
}

TEST_CASE("denoiser mse factor limits") {
  // tau -> 0: the true term dominates, the factor tends to 1
  CHECK(denoiser_mse_quadrature(1e-4, 2) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(denoiser_mse_quadrature(1e-4, 4) == doctest::Approx(1.0).epsilon(1e-6));
  // tau -> inf: all exponents flatten, the factor tends to 1/M
  CHECK(denoiser_mse_quadrature(1e7, 2) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(denoiser_mse_quadrature(1e7, 4) == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("denoiser mse factor is decreasing in tau") {
  double prev = 1.0 + 1e-12;
  for (double tau : {0.05, 0.2, 1.0, 5.0, 25.0}) {
    const double v = denoiser_mse_quadrature(tau, 4);
    CHECK(v < prev);
    CHECK(v > 0.25);
    prev = v;
  }
}

TEST_CASE("monte carlo estimate agrees with quadrature") {
  for (std::size_t M : {std::size_t{2}, std::size_t{4}}) {
    for (double tau : {0.3, 1.0, 3.0}) {
      const double exact = denoiser_mse_quadrature(tau, M);
      const MseEstimate mc = denoiser_mse(tau, M, 200000, 88);
      CHECK(mc.std_error > 0.0);
      CHECK(std::abs(mc.value - exact) < 4.0 * mc.std_error + 1e-3);
    }
  }
}

TEST_CASE("monte carlo estimate is deterministic in the seed") {
  const MseEstimate a = denoiser_mse(1.0, 16, 5000, 7);
  const MseEstimate b = denoiser_mse(1.0, 16, 5000, 7);
  const MseEstimate c = denoiser_mse(1.0, 16, 5000, 8);
  CHECK(a.value == b.value);
  CHECK(a.value != c.value);
}

TEST_CASE("quadrature oracle is limited to small M") {
  CHECK_THROWS_AS(denoiser_mse_quadrature(1.0, 5), std::invalid_argument);
}

TEST_CASE("exact scalar recursion first step") {
  const double snr = 15.0, R = 0.9;
  const std::size_t M = 512;
  const BaseMatrix W(1, 1, {snr});
  const SeTrace tr = se_recursion(W, 1.0, R, M, 3, 1000, 5);
  REQUIRE(tr.iterations() >= 1);
  CHECK(tr.psi[0][0] == 1.0);
  CHECK(tr.phi[0][0] == doctest::Approx(1.0 + snr).epsilon(1e-15));
  CHECK(tr.tau[0][0] ==
        doctest::Approx((R / std::log(static_cast<double>(M))) / (snr / 16.0)).epsilon(1e-12));
  CHECK(tr.nu[0][0] ==
        doctest::Approx(1.0 / (tr.tau[0][0] * std::log(static_cast<double>(M)))).epsilon(1e-12));
}

TEST_CASE("exact scalar recursion tracks the asymptotic threshold") {
  const double snr = 15.0;
  const std::size_t M = 512;
  const BaseMatrix W(1, 1, {snr});
  SUBCASE("below threshold the mse collapses") {
    const double R = 0.6 * ln2;  // threshold is snr/(2(1+snr)) = 0.676 bits
    const SeTrace tr = se_recursion(W, 1.0, R, M, 32, 2000, 11);
    CHECK(tr.final_psi()[0] < 0.1);
    const SeTrace as = asymptotic_se(W, 1.0, R);
    CHECK(as.fully_decoded());
    CHECK(std::abs(tr.final_psi()[0] - as.final_psi()[0]) < 0.1);
  }
  SUBCASE("well above threshold the mse stays high") {
    const double R = 2.0 * ln2;
    const SeTrace tr = se_recursion(W, 1.0, R, M, 32, 2000, 12);
    CHECK(tr.final_psi()[0] > 0.5);
    const SeTrace as = asymptotic_se(W, 1.0, R);
    CHECK_FALSE(as.fully_decoded());
    CHECK(as.final_psi()[0] == 1.0);
  }
}

TEST_CASE("asymptotic scalar threshold is strict") {
  const double snr = 15.0;
  const BaseMatrix W(1, 1, {snr});
  // snr/(1+snr) = 0.9375 exactly; decoding requires 2R strictly below it
  CHECK(asymptotic_se(W, 1.0, 0.46874).fully_decoded());
  CHECK_FALSE(asymptotic_se(W, 1.0, 0.46875).fully_decoded());
  CHECK_FALSE(asymptotic_se(W, 1.0, 0.46876).fully_decoded());
}

TEST_CASE("asymptotic band recursion decodes from the ends inward") {
  const double R = 1.2 * ln2;
  const SeTrace tr = asymptotic_se_band(6, 32, 15.0, R);
  CHECK(tr.fully_decoded());
  const std::vector<double> frac = tr.decoded_fraction();
  for (std::size_t t = 1; t < frac.size(); ++t) CHECK(frac[t] >= frac[t - 1]);
  for (const std::vector<double>& psi : tr.psi) {
    // symmetric, and the decoded set is a pair of edge bands
    const std::size_t n = psi.size();
    for (std::size_t c = 0; c < n; ++c) {
      CHECK((psi[c] == 0.0 || psi[c] == 1.0));
      CHECK(psi[c] == psi[n - 1 - c]);
    }
    std::size_t first_undecoded = 0;
    while (first_undecoded < n && psi[first_undecoded] == 0.0) ++first_undecoded;
    for (std::size_t c = first_undecoded; c < n - first_undecoded; ++c)
      CHECK(psi[c] == 1.0);
  }
}

TEST_CASE("asymptotic band recursion stalls above its threshold") {
  // the edge column needs (1/L_R) sum_r W/phi > 2R, which fails at 1.4 bits
  const SeTrace tr = asymptotic_se_band(6, 32, 15.0, 1.4 * ln2);
  CHECK_FALSE(tr.fully_decoded());
  for (double v : tr.final_psi()) CHECK(v == 1.0);
  // but the coupled code still beats the uncoupled threshold of 0.676 bits
  CHECK(asymptotic_se_band(6, 32, 15.0, 1.0 * ln2).fully_decoded());
  CHECK_FALSE(asymptotic_se_band(1, 1, 15.0, 1.0 * ln2).fully_decoded());
}

TEST_CASE("band fast path matches the general asymptotic recursion") {
  for (std::size_t omega : {std::size_t{2}, std::size_t{6}}) {
    for (double R_bits : {0.5, 1.0, 1.2, 1.6}) {
      const std::size_t lambda = 32;
      const double snr = 15.0;
      const BaseMatrix W = build_omega_lambda(omega, lambda, snr);
      const SeTrace gen = asymptotic_se(W, 1.0, R_bits * ln2);
      const SeTrace band = asymptotic_se_band(omega, lambda, snr, R_bits * ln2);
      REQUIRE(gen.psi.size() == band.psi.size());
      for (std::size_t t = 0; t < gen.psi.size(); ++t) CHECK(gen.psi[t] == band.psi[t]);
    }
  }
}

TEST_CASE("exact coupled recursion is symmetric and monotone") {
  const BaseMatrix W = build_omega_lambda(3, 8, 15.0);
  const SeTrace tr = se_recursion(W, 1.0, 1.0 * ln2, 64, 12, 2000, 21);
  for (const std::vector<double>& psi : tr.psi) {
    for (std::size_t c = 0; c < psi.size(); ++c) {
      CHECK(psi[c] >= 0.0);
      CHECK(psi[c] <= 1.0);
      // mirrored columns see mirrored recursions; MC noise differs per column
      CHECK(psi[c] == doctest::Approx(psi[psi.size() - 1 - c]).epsilon(0.1));
    }
    // edges decode no later than the middle
    CHECK(psi.front() <= psi[psi.size() / 2] + 0.05);
  }
}

TEST_CASE("proposition-style threshold report") {
  SUBCASE("a wide coupling window satisfies the sufficient condition") {
    const PropOneReport rep = proposition_one(40, 400, 15.0, 1.0 * ln2);
    CHECK(rep.kappa == doctest::Approx(439.0 / 400.0));
    CHECK(rep.R_bits == doctest::Approx(1.0));
    CHECK(rep.rate_condition_ok);
    CHECK(rep.omega_threshold == doctest::Approx(4.5731).epsilon(1e-3));
    CHECK(rep.omega_ok);
    // floor(40 * 17.4625 / 16.4625^2 * (ln 17.4625 - 1.5215)) = floor(3.450)
    CHECK(rep.c_star_lower_bound == 3);
    CHECK(rep.iteration_upper_bound == 67);  // ceil(400 / 6)
    CHECK_FALSE(rep.full_decode_first_iter);
  }
  SUBCASE("rate above the coupled limit fails the rate condition") {
    // (1/2k) ln(1+k*snr) = 1.258 nats = 1.815 bits for omega=6, lambda=32
    const PropOneReport rep = proposition_one(6, 32, 15.0, 2.0 * ln2);
    CHECK_FALSE(rep.rate_condition_ok);
    CHECK(std::isinf(rep.omega_threshold));
    CHECK_FALSE(rep.omega_ok);
  }
  SUBCASE("narrow window at a feasible rate fails only the width check") {
    const PropOneReport rep = proposition_one(6, 32, 15.0, 1.5 * ln2);
    CHECK(rep.rate_condition_ok);
    CHECK(rep.omega_threshold == doctest::Approx(24.017).epsilon(1e-3));
    CHECK_FALSE(rep.omega_ok);
  }
  SUBCASE("low rate at high snr decodes everything in one iteration") {
    const PropOneReport rep = proposition_one(2, 3, 100.0, 0.25 * ln2);
    CHECK(rep.full_decode_first_iter);  // snr/(1+k*snr) = 0.744 > 2R = 0.347
    CHECK(rep.rate_condition_ok);
  }
  SUBCASE("threshold grows with rate") {
    double prev = 0.0;
    for (double R_bits : {0.4, 0.8, 1.2, 1.6}) {
      const PropOneReport rep = proposition_one(40, 400, 15.0, R_bits * ln2);
      CHECK(rep.omega_threshold > prev);
      CHECK(rep.c_star_lower_bound >= 0);
      CHECK(rep.c_star_lower_bound <= 39);
      prev = rep.omega_threshold;
    }
  }
}
