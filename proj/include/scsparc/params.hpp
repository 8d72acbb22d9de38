#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scsparc {

enum class RateUnit { bits, nats };

double convert_rate(double value, RateUnit from, RateUnit to);
RateUnit parse_rate_unit(const std::string& s);

// Index bookkeeping for the block structure of the design matrix.
// All indices are 0-based; a row block r covers rows [r*M_R, (r+1)*M_R).
struct BlockLayout {
  std::size_t n = 0;    // code length
  std::size_t ml = 0;   // M*L columns
  std::size_t M = 0;    // columns per section
  std::size_t M_R = 0;  // rows per block
  std::size_t M_C = 0;  // columns per block

  std::size_t row_of(std::size_t i) const { return i / M_R; }
  std::size_t col_of(std::size_t j) const { return j / M_C; }
  std::size_t section_of(std::size_t j) const { return j / M; }
  std::size_t row_block_begin(std::size_t r) const { return r * M_R; }
  std::size_t col_block_begin(std::size_t c) const { return c * M_C; }
  std::size_t sections_per_block() const { return M_C / M; }
};

struct CodeParams {
  std::size_t L = 0;    // sections
  std::size_t M = 0;    // columns per section
  double R_target = 0;  // requested rate, nats
  double R_eff = 0;     // L*ln(M)/n after rounding n, nats
  double P = 0;         // average power
  double sigma2 = 0;    // noise variance
  std::size_t L_R = 0;
  std::size_t L_C = 0;
  std::size_t n = 0;
  std::size_t M_R = 0;
  std::size_t M_C = 0;
  double kappa = 0;     // L_R/L_C; equals (Lambda+omega-1)/Lambda for band matrices
  double snr = 0;
  double capacity = 0;  // 0.5*ln(1+snr), nats

  BlockLayout layout() const { return BlockLayout{n, M * L, M, M_R, M_C}; }
};

// n is rounded to the nearest multiple of L_R so the rows split evenly into
// blocks; R_eff records the exact rate after rounding.
CodeParams derive_dimensions(std::size_t L, std::size_t M, double R_target_nats,
                             std::size_t L_R, std::size_t L_C,
                             double P, double sigma2);

}  // namespace scsparc
