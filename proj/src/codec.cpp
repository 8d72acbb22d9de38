#include "scsparc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "scsparc/rng.hpp"

namespace scsparc {

std::vector<double> MessageVector::dense(std::size_t M) const {
  std::vector<double> out(indices.size() * M, 0.0);
  for (std::size_t l = 0; l < indices.size(); ++l) out[l * M + indices[l]] = 1.0;
  return out;
}

MessageVector random_message(std::size_t L, std::size_t M, std::uint64_t seed) {
  Rng rng(seed);
  MessageVector msg;
  msg.indices.resize(L);
  for (std::size_t l = 0; l < L; ++l) msg.indices[l] = static_cast<std::uint32_t>(rng.index(M));
  return msg;
}

std::vector<double> encode(const MessageVector& message, const DesignOperator& op) {
  const auto& p = op.params();
  if (message.indices.size() != p.L) throw std::invalid_argument("message has wrong section count");
  for (auto idx : message.indices)
    if (idx >= p.M) throw std::invalid_argument("message index out of range");
  return op.forward(message.dense(p.M));
}

std::vector<double> awgn(std::span<const double> x, double sigma2, std::uint64_t seed) {
  if (sigma2 < 0.0) throw std::invalid_argument("noise variance must be nonnegative");
  std::vector<double> y(x.begin(), x.end());
  if (sigma2 == 0.0) return y;
  Rng rng(seed);
  const double sd = std::sqrt(sigma2);
  for (double& v : y) v += sd * rng.gaussian();
  return y;
}

std::vector<double> denoise(std::span<const double> s, std::span<const double> varsigma,
                            const BlockLayout& layout) {
  if (s.size() != layout.ml) throw std::invalid_argument("denoise: s length must be M*L");
  for (double v : varsigma)
    if (!(v > 0.0)) throw std::invalid_argument("denoise: varsigma entries must be positive");

  const std::size_t L = layout.ml / layout.M;
  std::vector<double> out(s.size());
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t begin = l * layout.M;
    const double inv_vs = 1.0 / varsigma[layout.col_of(begin)];
    double max_arg = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < layout.M; ++j)
      max_arg = std::max(max_arg, s[begin + j] * inv_vs);
    double denom = 0.0;
    for (std::size_t j = 0; j < layout.M; ++j) {
      const double e = std::exp(s[begin + j] * inv_vs - max_arg);
      out[begin + j] = e;
      denom += e;
    }
    const double inv_denom = 1.0 / denom;
    for (std::size_t j = 0; j < layout.M; ++j) out[begin + j] *= inv_denom;
  }
  return out;
}

MessageVector hard_decision(std::span<const double> beta, std::size_t L, std::size_t M) {
  if (beta.size() != L * M) throw std::invalid_argument("hard_decision: length must be M*L");
  MessageVector msg;
  msg.indices.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    std::size_t best = 0;
    double best_val = beta[l * M];
    for (std::size_t j = 1; j < M; ++j) {
      if (beta[l * M + j] > best_val) {  // ties break toward the smallest index
        best_val = beta[l * M + j];
        best = j;
      }
    }
    msg.indices[l] = static_cast<std::uint32_t>(best);
  }
  return msg;
}

double section_error_rate(const MessageVector& decoded, const MessageVector& truth) {
  if (decoded.indices.size() != truth.indices.size())
    throw std::invalid_argument("section count mismatch");
  std::size_t errors = 0;
  for (std::size_t l = 0; l < decoded.indices.size(); ++l)
    if (decoded.indices[l] != truth.indices[l]) ++errors;
  return static_cast<double>(errors) / static_cast<double>(decoded.indices.size());
}

std::vector<double> nmse_per_block(std::span<const double> beta, const MessageVector& truth,
                                   const BlockLayout& layout) {
  if (beta.size() != layout.ml) throw std::invalid_argument("nmse: length must be M*L");
  const std::size_t L_C = layout.ml / layout.M_C;
  const double sections_per_block = static_cast<double>(layout.sections_per_block());
  std::vector<double> nmse(L_C, 0.0);
  for (std::size_t j = 0; j < layout.ml; ++j) {
    const std::size_t l = layout.section_of(j);
    const double target = (j == l * layout.M + truth.indices[l]) ? 1.0 : 0.0;
    const double d = beta[j] - target;
    nmse[layout.col_of(j)] += d * d;
  }
  for (double& v : nmse) v /= sections_per_block;
  return nmse;
}

double ser_bound_from_nmse(std::span<const double> nmse_blocks) {
  double sum = 0.0;
  for (double v : nmse_blocks) sum += v;
  return 4.0 * sum / static_cast<double>(nmse_blocks.size());
}

AmpResult amp_decode(std::span<const double> y, const DesignOperator& op,
                     const AmpOptions& options, const MessageVector* true_beta) {
  const CodeParams& p = op.params();
  const BaseMatrix& W = op.base();
  const BlockLayout layout = p.layout();
  if (y.size() != p.n) throw std::invalid_argument("amp_decode: y length must be n");

  const std::size_t max_iter = options.max_iter.value_or(2 * ((p.L_C + 1) / 2) + 25);
  const double sections_per_block = static_cast<double>(p.L) / static_cast<double>(p.L_C);

  AmpResult result;
  result.beta.assign(p.M * p.L, 0.0);
  result.trace.has_truth = (true_beta != nullptr);

  std::vector<double> z_prev(p.n, 0.0);
  std::vector<double> phi_prev;  // empty until the first iteration completes
  std::vector<double> block_norm2(p.L_C, 0.0);  // ||beta^t_C(c)||^2
  std::vector<double> z(p.n), phi(p.L_R), phi_inv(p.L_R), b(p.L_R), varsigma(p.L_C);

  for (std::size_t t = 0; t < max_iter; ++t) {
    // Onsager coefficients; zero at t=0 since z^{-1} = 0.
    if (t == 0) {
      std::fill(b.begin(), b.end(), 0.0);
    } else {
      for (std::size_t r = 0; r < p.L_R; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < p.L_C; ++c)
          acc += W(r, c) * (1.0 - block_norm2[c] / sections_per_block);
        b[r] = acc / (static_cast<double>(p.L_C) * phi_prev[r]);
      }
    }

    // z^t = y - A beta^t + b~ .* z^{t-1}
    std::vector<double> Ab = op.forward(result.beta);
    for (std::size_t i = 0; i < p.n; ++i)
      z[i] = y[i] - Ab[i] + b[i / p.M_R] * z_prev[i];

    // phi^t_r = ||z_R(r)||^2 / M_R, floored to stay positive
    for (std::size_t r = 0; r < p.L_R; ++r) {
      double acc = 0.0;
      const double* zr = z.data() + r * p.M_R;
      for (std::size_t i = 0; i < p.M_R; ++i) acc += zr[i] * zr[i];
      phi[r] = acc / static_cast<double>(p.M_R);
      if (phi[r] < options.phi_floor) {
        phi[r] = options.phi_floor;
        result.trace.phi_clamped = true;
      }
      phi_inv[r] = 1.0 / phi[r];
    }

    // varsigma^t_c = (L/M_R) / sum_r W_rc / phi^t_r
    for (std::size_t c = 0; c < p.L_C; ++c) {
      double denom = 0.0;
      for (std::size_t r = 0; r < p.L_R; ++r) denom += W(r, c) * phi_inv[r];
      if (!(denom > 0.0))
        throw std::invalid_argument("amp_decode: base matrix has an all-zero column");
      varsigma[c] = static_cast<double>(p.L) / (static_cast<double>(p.M_R) * denom);
    }

    // s^t = beta^t + varsigma~ .* A^T (z^t .* phi~^{-1}); beta^{t+1} = eta(s^t)
    std::vector<double> s = op.scaled_adjoint(z, phi_inv);
    for (std::size_t j = 0; j < s.size(); ++j)
      s[j] = result.beta[j] + varsigma[j / p.M_C] * s[j];
    std::vector<double> beta_next = denoise(s, varsigma, layout);

    double change = 0.0;
    for (std::size_t j = 0; j < beta_next.size(); ++j) {
      const double d = beta_next[j] - result.beta[j];
      change += d * d;
    }
    change /= static_cast<double>(beta_next.size());

    std::fill(block_norm2.begin(), block_norm2.end(), 0.0);
    for (std::size_t j = 0; j < beta_next.size(); ++j)
      block_norm2[j / p.M_C] += beta_next[j] * beta_next[j];

    result.beta = std::move(beta_next);
    std::swap(z_prev, z);
    phi_prev = phi;

    AmpIterationRecord rec;
    rec.phi = phi;
    rec.varsigma = varsigma;
    rec.beta_change = change;
    if (true_beta) {
      rec.nmse = nmse_per_block(result.beta, *true_beta, layout);
      double total = 0.0;
      for (double v : rec.nmse) total += v;
      rec.total_nmse = total / static_cast<double>(p.L_C);
    }
    result.trace.records.push_back(std::move(rec));
    result.iterations = t + 1;

    if (change < options.stop_tol) break;
  }
  return result;
}

}  // namespace scsparc
