#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "scsparc/base_matrix.hpp"

using namespace scsparc;

TEST_CASE("band construction matches the definition") {
  const double P = 2.5;
  const BaseMatrix W = build_omega_lambda(3, 7, P);
  REQUIRE(W.rows() == 9);
  REQUIRE(W.cols() == 7);
  for (std::size_t c = 0; c < 7; ++c)
    for (std::size_t r = 0; r < 9; ++r) {
      if (r >= c && r <= c + 2)
        CHECK(W(r, c) == doctest::Approx(3.0 * P));
      else
        CHECK(W(r, c) == 0.0);
    }

  const BaseMatrix trivial = build_omega_lambda(1, 1, P);
  REQUIRE(trivial.rows() == 1);
  REQUIRE(trivial.cols() == 1);
  CHECK(trivial(0, 0) == P);

  const BaseMatrix fig3 = build_omega_lambda(6, 32, P);
  CHECK(fig3.rows() == 37);
  CHECK(fig3.cols() == 32);
  CHECK(fig3(0, 0) == doctest::Approx(P * 37.0 / 6.0));

  CHECK_THROWS_AS(build_omega_lambda(4, 6, P), std::invalid_argument);  // Lambda < 2w-1
}

TEST_CASE("power constraint validation") {
  const double P = 1.75;
  BaseMatrix W = build_omega_lambda(3, 7, P);
  CHECK(validate_power(W, P));
  CHECK(validate_power(BaseMatrix(4, 5, std::vector<double>(20, P)), P));
  W(3, 2) = 0.0;  // mean drops below P
  CHECK_FALSE(validate_power(W, P));
}

TEST_CASE("rate relation") {
  CHECK(rate_relation(1.6, 6, 32) == doctest::Approx(1.85));
  CHECK(rate_relation(1.6, 8, 32) == doctest::Approx(1.95));
  CHECK(rate_relation(0.9, 1, 16) == doctest::Approx(0.9));
}

TEST_CASE("band column sums and row nonzero ramps") {
  const double P = 3.0;
  const std::size_t omega = 4, lambda = 11;
  const BaseMatrix W = build_omega_lambda(omega, lambda, P);
  const double kappa = static_cast<double>(W.rows()) / static_cast<double>(W.cols());
  for (std::size_t c = 0; c < W.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < W.rows(); ++r) sum += W(r, c);
    CHECK(sum == doctest::Approx(P * static_cast<double>(lambda + omega - 1)));
    CHECK(sum == doctest::Approx(P * kappa * static_cast<double>(lambda)));
  }
  for (std::size_t r = 0; r < W.rows(); ++r) {
    std::size_t nonzeros = 0;
    for (std::size_t c = 0; c < W.cols(); ++c) nonzeros += W(r, c) > 0.0;
    const std::size_t expected =
        std::min({r + 1, omega, lambda + omega - 1 - r});
    CHECK(nonzeros == expected);
  }
  // rate_relation is consistent with kappa
  CHECK(rate_relation(1.3, omega, lambda) == doctest::Approx(kappa * 1.3));
}

TEST_CASE("single-row and custom matrices are accepted") {
  const BaseMatrix row(1, 8, std::vector<double>(8, 2.0));
  CHECK(validate_power(row, 2.0));
  const std::vector<double> negative{1.0, -0.5, 1.0, 1.0};
  CHECK_THROWS_AS(BaseMatrix(2, 2, negative), std::invalid_argument);
}

TEST_CASE("CSV round trip") {
  const BaseMatrix W = build_omega_lambda(2, 5, 1.0 / 3.0);
  const std::string path = "test_base_matrix_roundtrip.csv";
  save_base_matrix_csv(W, path);
  const BaseMatrix back = load_base_matrix_csv(path);
  REQUIRE(back.rows() == W.rows());
  REQUIRE(back.cols() == W.cols());
  for (std::size_t r = 0; r < W.rows(); ++r)
    for (std::size_t c = 0; c < W.cols(); ++c) CHECK(back(r, c) == W(r, c));
  std::remove(path.c_str());
}
