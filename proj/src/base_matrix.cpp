#include "scsparc/base_matrix.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace scsparc {

BaseMatrix::BaseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("base matrix must be nonempty");
  if (entries_.size() != rows_ * cols_)
    throw std::invalid_argument("base matrix entry count does not match dimensions");
  for (double w : entries_)
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("base matrix entries must be finite and nonnegative");
}

double BaseMatrix::mean() const {
  const double sum = std::accumulate(entries_.begin(), entries_.end(), 0.0);
  return sum / static_cast<double>(entries_.size());
}

BaseMatrix build_omega_lambda(std::size_t omega, std::size_t lambda, double P) {
  if (omega < 1) throw std::invalid_argument("omega must be >= 1");
  if (lambda + 1 < 2 * omega) throw std::invalid_argument("Lambda must be >= 2*omega - 1");
  if (P <= 0.0) throw std::invalid_argument("power must be positive");

  const std::size_t L_R = lambda + omega - 1;
  const std::size_t L_C = lambda;
  const double value = P * static_cast<double>(L_R) / static_cast<double>(omega);
  std::vector<double> entries(L_R * L_C, 0.0);
  for (std::size_t c = 0; c < L_C; ++c)
    for (std::size_t r = c; r < c + omega; ++r) entries[r * L_C + c] = value;

  BaseMatrix W(L_R, L_C, std::move(entries));
  W.omega = omega;
  W.lambda = lambda;
  return W;
}

bool validate_power(const BaseMatrix& W, double P, double rel_tol) {
  return std::abs(W.mean() - P) <= rel_tol * std::abs(P);
}

double rate_relation(double R, std::size_t omega, std::size_t lambda) {
  if (R <= 0.0) throw std::invalid_argument("rate must be positive");
  if (lambda + 1 < 2 * omega) throw std::invalid_argument("Lambda must be >= 2*omega - 1");
  return R * static_cast<double>(lambda + omega - 1) / static_cast<double>(lambda);
}

BaseMatrix load_base_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open base matrix file: " + path);
  std::vector<double> entries;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t row_cols = 0;
    while (std::getline(ss, cell, ',')) {
      entries.push_back(std::stod(cell));
      ++row_cols;
    }
    if (rows == 0) cols = row_cols;
    else if (row_cols != cols)
      throw std::runtime_error("ragged base matrix CSV: " + path);
    ++rows;
  }
  return BaseMatrix(rows, cols, std::move(entries));
}

void save_base_matrix_csv(const BaseMatrix& W, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write base matrix file: " + path);
  out.precision(17);
  for (std::size_t r = 0; r < W.rows(); ++r) {
    for (std::size_t c = 0; c < W.cols(); ++c) {
      if (c) out << ',';
      out << W(r, c);
    }
    out << '\n';
  }
}

}  // namespace scsparc
