#include "scsparc/design_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scsparc/rng.hpp"

namespace scsparc {

Backend parse_backend(const std::string& s) {
  if (s == "gaussian") return Backend::gaussian;
  if (s == "hadamard") return Backend::hadamard;
  throw std::invalid_argument("unknown backend: " + s);
}

std::string backend_name(Backend b) {
  return b == Backend::gaussian ? "gaussian" : "hadamard";
}

void fwht(std::span<double> data) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fwht length must be a power of two");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = data[j];
        const double b = data[j + h];
        data[j] = a + b;
        data[j + h] = a - b;
      }
    }
  }
}

void DesignOperator::check_forward_args(std::size_t beta_len) const {
  if (beta_len != params_.M * params_.L)
    throw std::invalid_argument("forward: beta length must be M*L");
}

void DesignOperator::check_adjoint_args(std::size_t z_len, std::span<const double> phi_inv) const {
  if (z_len != params_.n) throw std::invalid_argument("adjoint: z length must be n");
  if (phi_inv.size() != params_.L_R)
    throw std::invalid_argument("adjoint: phi_inv_profile length must be L_R");
  for (double v : phi_inv)
    if (!(v > 0.0)) throw std::invalid_argument("adjoint: phi_inv_profile entries must be positive");
}

std::vector<double> DesignOperator::adjoint(std::span<const double> z) const {
  const std::vector<double> ones(params_.L_R, 1.0);
  return scaled_adjoint(z, ones);
}

std::vector<double> DesignOperator::to_dense() const {
  const std::size_t n = params_.n;
  const std::size_t ml = params_.M * params_.L;
  std::vector<double> dense(n * ml, 0.0);
  std::vector<double> unit(ml, 0.0);
  for (std::size_t j = 0; j < ml; ++j) {
    unit[j] = 1.0;
    const std::vector<double> col = forward(unit);
    unit[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) dense[i * ml + j] = col[i];
  }
  return dense;
}

namespace {

// Dense Gaussian backend, A_ij ~ N(0, W_rc/L). Blocks are generated
// row-major from per-block streams; above the memory threshold the entries
// are regenerated on every multiply instead of stored.
class GaussianOperator final : public DesignOperator {
 public:
  GaussianOperator(CodeParams params, BaseMatrix base, std::uint64_t seed,
                   std::size_t store_threshold)
      : DesignOperator(Backend::gaussian, std::move(params), std::move(base)), seed_(seed) {
    stored_ = params_.n * params_.M * params_.L <= store_threshold;
    if (stored_) {
      matrix_.assign(params_.n * params_.M * params_.L, 0.0);
      for_each_block([&](std::size_t r, std::size_t c, double scale) {
        Rng rng = Rng::stream(seed_, "gauss", {r, c});
        for (std::size_t i = 0; i < params_.M_R; ++i) {
          double* row = matrix_.data() + (r * params_.M_R + i) * params_.M * params_.L;
          for (std::size_t j = 0; j < params_.M_C; ++j)
            row[c * params_.M_C + j] = scale * rng.gaussian();
        }
      });
    }
  }

  std::vector<double> forward(std::span<const double> beta) const override {
    check_forward_args(beta.size());
    std::vector<double> y(params_.n, 0.0);
    if (stored_) {
      const std::size_t ml = params_.M * params_.L;
      for (std::size_t i = 0; i < params_.n; ++i) {
        const double* row = matrix_.data() + i * ml;
        double acc = 0.0;
        for (std::size_t j = 0; j < ml; ++j) acc += row[j] * beta[j];
        y[i] = acc;
      }
      return y;
    }
    for_each_block([&](std::size_t r, std::size_t c, double scale) {
      Rng rng = Rng::stream(seed_, "gauss", {r, c});
      const double* x = beta.data() + c * params_.M_C;
      for (std::size_t i = 0; i < params_.M_R; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < params_.M_C; ++j) acc += rng.gaussian() * x[j];
        y[r * params_.M_R + i] += scale * acc;
      }
    });
    return y;
  }

  std::vector<double> scaled_adjoint(std::span<const double> z,
                                     std::span<const double> phi_inv) const override {
    check_adjoint_args(z.size(), phi_inv);
    std::vector<double> out(params_.M * params_.L, 0.0);
    if (stored_) {
      const std::size_t ml = params_.M * params_.L;
      for (std::size_t i = 0; i < params_.n; ++i) {
        const double zi = z[i] * phi_inv[i / params_.M_R];
        if (zi == 0.0) continue;
        const double* row = matrix_.data() + i * ml;
        for (std::size_t j = 0; j < ml; ++j) out[j] += row[j] * zi;
      }
      return out;
    }
    for_each_block([&](std::size_t r, std::size_t c, double scale) {
      Rng rng = Rng::stream(seed_, "gauss", {r, c});
      double* o = out.data() + c * params_.M_C;
      for (std::size_t i = 0; i < params_.M_R; ++i) {
        const double zi = scale * z[r * params_.M_R + i] * phi_inv[r];
        for (std::size_t j = 0; j < params_.M_C; ++j) o[j] += rng.gaussian() * zi;
      }
    });
    return out;
  }

 private:
  template <typename F>
  void for_each_block(F&& f) const {
    for (std::size_t r = 0; r < params_.L_R; ++r)
      for (std::size_t c = 0; c < params_.L_C; ++c)
        if (base_(r, c) > 0.0)
          f(r, c, std::sqrt(base_(r, c) / static_cast<double>(params_.L)));
  }

  std::uint64_t seed_;
  bool stored_;
  std::vector<double> matrix_;  // row-major n x ML when stored
};

// Subsampled-Hadamard backend. Each nonzero block uses M_R rows drawn
// without replacement from rows 2..2^k of a 2^k x 2^k Hadamard matrix and
// columns 2..M_C+1 (the all-ones first row and column are excluded);
// entries are +-sqrt(W_rc/L). Multiplies go through the fast transform,
// one length-2^k FWHT per column block.
class HadamardOperator final : public DesignOperator {
 public:
  HadamardOperator(CodeParams params, BaseMatrix base, std::uint64_t seed)
      : DesignOperator(Backend::hadamard, std::move(params), std::move(base)) {
    std::size_t need = std::max(params_.M_R, params_.M_C) + 1;
    k_ = 0;
    while ((std::size_t{1} << k_) < need) ++k_;
    size_ = std::size_t{1} << k_;
    if (params_.M_R > size_ - 1 || params_.M_C > size_ - 1)
      throw std::invalid_argument("block dimensions exceed Hadamard order");

    row_idx_.resize(params_.L_R * params_.L_C);
    for (std::size_t r = 0; r < params_.L_R; ++r)
      for (std::size_t c = 0; c < params_.L_C; ++c)
        if (base_(r, c) > 0.0) {
          Rng rng = Rng::stream(seed, "had", {r, c});
          row_idx_[r * params_.L_C + c] =
              rng.sample_without_replacement(1, static_cast<std::uint32_t>(size_), params_.M_R);
        }
  }

  std::size_t order() const { return k_; }
  const std::vector<std::uint32_t>& block_rows(std::size_t r, std::size_t c) const {
    return row_idx_[r * params_.L_C + c];
  }

  std::vector<double> forward(std::span<const double> beta) const override {
    check_forward_args(beta.size());
    std::vector<double> y(params_.n, 0.0);
    std::vector<double> u(size_);
    for (std::size_t c = 0; c < params_.L_C; ++c) {
      std::fill(u.begin(), u.end(), 0.0);
      const double* x = beta.data() + c * params_.M_C;
      for (std::size_t j = 0; j < params_.M_C; ++j) u[j + 1] = x[j];
      fwht(u);
      for (std::size_t r = 0; r < params_.L_R; ++r) {
        if (base_(r, c) <= 0.0) continue;
        const double scale = std::sqrt(base_(r, c) / static_cast<double>(params_.L));
        const auto& rows = row_idx_[r * params_.L_C + c];
        double* out = y.data() + r * params_.M_R;
        for (std::size_t i = 0; i < params_.M_R; ++i) out[i] += scale * u[rows[i]];
      }
    }
    return y;
  }

  std::vector<double> scaled_adjoint(std::span<const double> z,
                                     std::span<const double> phi_inv) const override {
    check_adjoint_args(z.size(), phi_inv);
    std::vector<double> out(params_.M * params_.L, 0.0);
    std::vector<double> v(size_);
    for (std::size_t c = 0; c < params_.L_C; ++c) {
      std::fill(v.begin(), v.end(), 0.0);
      bool any = false;
      for (std::size_t r = 0; r < params_.L_R; ++r) {
        if (base_(r, c) <= 0.0) continue;
        any = true;
        const double w = std::sqrt(base_(r, c) / static_cast<double>(params_.L)) * phi_inv[r];
        const auto& rows = row_idx_[r * params_.L_C + c];
        const double* zr = z.data() + r * params_.M_R;
        for (std::size_t i = 0; i < params_.M_R; ++i) v[rows[i]] += w * zr[i];
      }
      if (!any) continue;
      fwht(v);
      double* o = out.data() + c * params_.M_C;
      for (std::size_t j = 0; j < params_.M_C; ++j) o[j] = v[j + 1];
    }
    return out;
  }

 private:
  std::size_t k_ = 0;
  std::size_t size_ = 0;
  std::vector<std::vector<std::uint32_t>> row_idx_;  // empty for zero blocks
};

}  // namespace

std::unique_ptr<DesignOperator> sample_operator(Backend backend, const CodeParams& params,
                                                const BaseMatrix& base, std::uint64_t seed,
                                                std::size_t gaussian_store_threshold) {
  if (base.rows() != params.L_R || base.cols() != params.L_C)
    throw std::invalid_argument("base matrix dimensions do not match code parameters");
  if (backend == Backend::gaussian)
    return std::make_unique<GaussianOperator>(params, base, seed, gaussian_store_threshold);
  return std::make_unique<HadamardOperator>(params, base, seed);
}

}  // namespace scsparc
