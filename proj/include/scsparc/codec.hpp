#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scsparc/base_matrix.hpp"
#include "scsparc/design_matrix.hpp"
#include "scsparc/params.hpp"

namespace scsparc {

// Message beta: one unit entry per section of M columns, stored by the
// 0-based in-section index of the nonzero.
struct MessageVector {
  std::vector<std::uint32_t> indices;  // length L, each in [0, M)

  std::vector<double> dense(std::size_t M) const;
};

MessageVector random_message(std::size_t L, std::size_t M, std::uint64_t seed);

std::vector<double> encode(const MessageVector& message, const DesignOperator& op);

// y = x + w, w iid N(0, sigma2).
std::vector<double> awgn(std::span<const double> x, double sigma2, std::uint64_t seed);

// Section-wise softmax of s scaled by the per-column-block variance
// estimate varsigma (length L_C, expanded M_C-fold internally). Stabilized
// by per-section max subtraction.
std::vector<double> denoise(std::span<const double> s, std::span<const double> varsigma,
                            const BlockLayout& layout);

MessageVector hard_decision(std::span<const double> beta, std::size_t L, std::size_t M);

double section_error_rate(const MessageVector& decoded, const MessageVector& truth);

// ||beta_C(c) - truth_C(c)||^2 / (L/L_C) per column block.
std::vector<double> nmse_per_block(std::span<const double> beta, const MessageVector& truth,
                                   const BlockLayout& layout);

// SER <= 4 * mean block NMSE.
double ser_bound_from_nmse(std::span<const double> nmse_blocks);

struct AmpIterationRecord {
  std::vector<double> phi;       // length L_R, residual variance estimate
  std::vector<double> varsigma;  // length L_C
  std::vector<double> nmse;      // per block, for the estimate after this iteration
  double total_nmse = 0.0;
  double beta_change = 0.0;      // ||beta^{t+1}-beta^t||^2 / (ML)
};

struct AmpTrace {
  // records[t] describes iteration t (0-based): phi^t, varsigma^t and the
  // NMSE of beta^{t+1}; beta^0 = 0 has NMSE 1 in every block.
  std::vector<AmpIterationRecord> records;
  bool has_truth = false;
  bool phi_clamped = false;  // some phi entry hit the positivity floor
};

struct AmpOptions {
  std::optional<std::size_t> max_iter;  // default 2*ceil(L_C/2) + 25; 0 runs no iterations
  double stop_tol = 1e-8;               // on mean-squared change of beta
  double phi_floor = 1e-12;
};

struct AmpResult {
  std::vector<double> beta;  // final estimate, length ML
  AmpTrace trace;
  std::size_t iterations = 0;
};

AmpResult amp_decode(std::span<const double> y, const DesignOperator& op,
                     const AmpOptions& options = {},
                     const MessageVector* true_beta = nullptr);

}  // namespace scsparc
