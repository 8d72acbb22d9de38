#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace scsparc {

// L_R x L_C matrix of nonnegative variance scales W_rc, row-major.
// Mean of the entries must equal the average power P.
class BaseMatrix {
 public:
  BaseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const std::vector<double>& entries() const { return entries_; }

  double mean() const;

  std::optional<std::size_t> omega;   // set when built via the band construction
  std::optional<std::size_t> lambda;

 private:
  std::size_t rows_, cols_;
  std::vector<double> entries_;
};

// Band-diagonal (omega, Lambda) base matrix: L_R = Lambda+omega-1 rows,
// L_C = Lambda columns, column c nonzero in rows c..c+omega-1 with value
// P*(Lambda+omega-1)/omega.
BaseMatrix build_omega_lambda(std::size_t omega, std::size_t lambda, double P);

// True iff mean(W) is within rel_tol of P.
bool validate_power(const BaseMatrix& W, double P, double rel_tol = 1e-9);

// Overall rate R to inner block rate: R_inner = R*(Lambda+omega-1)/Lambda.
double rate_relation(double R, std::size_t omega, std::size_t lambda);

// CSV import/export for user-supplied matrices (one row per line).
BaseMatrix load_base_matrix_csv(const std::string& path);
void save_base_matrix_csv(const BaseMatrix& W, const std::string& path);

}  // namespace scsparc
