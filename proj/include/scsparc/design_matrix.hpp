#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scsparc/base_matrix.hpp"
#include "scsparc/params.hpp"

namespace scsparc {

enum class Backend { gaussian, hadamard };
Backend parse_backend(const std::string& s);
std::string backend_name(Backend b);

// In-place unnormalized Walsh-Hadamard transform; data.size() must be a
// power of two. Sylvester ordering, H_ij = (-1)^popcount(i & j).
void fwht(std::span<double> data);

// Random design matrix A with block-variance structure. Read-only after
// sampling; forward/adjoint multiplies are safe to call concurrently.
class DesignOperator {
 public:
  virtual ~DesignOperator() = default;

  const CodeParams& params() const { return params_; }
  const BaseMatrix& base() const { return base_; }
  Backend backend() const { return backend_; }

  // x = A*beta, beta of length M*L.
  virtual std::vector<double> forward(std::span<const double> beta) const = 0;

  // A^T (z .* phi_inv expanded M_R-fold); phi_inv_profile has length L_R.
  virtual std::vector<double> scaled_adjoint(std::span<const double> z,
                                             std::span<const double> phi_inv_profile) const = 0;

  // Plain adjoint A^T z.
  std::vector<double> adjoint(std::span<const double> z) const;

  // Materialize the full n x ML matrix; intended for small-size oracles.
  std::vector<double> to_dense() const;

 protected:
  DesignOperator(Backend backend, CodeParams params, BaseMatrix base)
      : backend_(backend), params_(std::move(params)), base_(std::move(base)) {}

  void check_forward_args(std::size_t beta_len) const;
  void check_adjoint_args(std::size_t z_len, std::span<const double> phi_inv) const;

  Backend backend_;
  CodeParams params_;
  BaseMatrix base_;
};

std::unique_ptr<DesignOperator> sample_operator(Backend backend, const CodeParams& params,
                                                const BaseMatrix& base, std::uint64_t seed,
                                                std::size_t gaussian_store_threshold = 50'000'000);

}  // namespace scsparc
