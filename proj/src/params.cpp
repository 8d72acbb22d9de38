#include "scsparc/params.hpp"

#include <cmath>
#include <limits>

namespace scsparc {

double convert_rate(double value, RateUnit from, RateUnit to) {
  if (from == to) return value;
  const double ln2 = std::log(2.0);
  return from == RateUnit::bits ? value * ln2 : value / ln2;
}

RateUnit parse_rate_unit(const std::string& s) {
  if (s == "bits") return RateUnit::bits;
  if (s == "nats") return RateUnit::nats;
  throw std::invalid_argument("unknown rate unit: " + s);
}

CodeParams derive_dimensions(std::size_t L, std::size_t M, double R_target_nats,
                             std::size_t L_R, std::size_t L_C,
                             double P, double sigma2) {
  if (L == 0 || M == 0 || L_R == 0 || L_C == 0)
    throw std::invalid_argument("L, M, L_R, L_C must be positive");
  if (R_target_nats <= 0.0) throw std::invalid_argument("rate must be positive");
  if (P <= 0.0) throw std::invalid_argument("power must be positive");
  if (sigma2 < 0.0) throw std::invalid_argument("noise variance must be nonnegative");
  if (L % L_C != 0) throw std::invalid_argument("L_C must divide L");
  if ((M * L) % L_C != 0) throw std::invalid_argument("L_C must divide M*L");

  const double n_raw = static_cast<double>(L) * std::log(static_cast<double>(M)) / R_target_nats;
  const auto blocks = static_cast<std::size_t>(std::llround(n_raw / static_cast<double>(L_R)));
  if (blocks == 0) throw std::invalid_argument("derived code length rounds to zero");

  CodeParams p;
  p.L = L;
  p.M = M;
  p.R_target = R_target_nats;
  p.P = P;
  p.sigma2 = sigma2;
  p.L_R = L_R;
  p.L_C = L_C;
  p.n = blocks * L_R;
  p.M_R = p.n / L_R;
  p.M_C = (M * L) / L_C;
  p.R_eff = static_cast<double>(L) * std::log(static_cast<double>(M)) / static_cast<double>(p.n);
  p.kappa = static_cast<double>(L_R) / static_cast<double>(L_C);
  p.snr = sigma2 > 0.0 ? P / sigma2 : std::numeric_limits<double>::infinity();
  p.capacity = 0.5 * std::log1p(p.snr);
  return p;
}

}  // namespace scsparc
