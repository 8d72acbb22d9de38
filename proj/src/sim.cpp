#include "scsparc/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "scsparc/rng.hpp"

#include <json.hpp>

namespace scsparc {

Preset parse_preset(const std::string& s) {
  if (s == "fig3_wave") return Preset::fig3_wave;
  if (s == "fig4_ser_vs_rate") return Preset::fig4_ser_vs_rate;
  if (s == "fig5_omega_sweep") return Preset::fig5_omega_sweep;
  if (s == "custom") return Preset::custom;
  throw std::invalid_argument("unknown preset: " + s);
}

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::fig3_wave: return "fig3_wave";
    case Preset::fig4_ser_vs_rate: return "fig4_ser_vs_rate";
    case Preset::fig5_omega_sweep: return "fig5_omega_sweep";
    case Preset::custom: return "custom";
  }
  return "custom";
}

void ExperimentConfig::validate() const {
  if (rates_nats.empty()) throw std::invalid_argument("rate list must be nonempty");
  for (double r : rates_nats)
    if (r <= 0.0) throw std::invalid_argument("rates must be positive");
  if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
  if (P <= 0.0 || sigma2 < 0.0) throw std::invalid_argument("invalid power/noise parameters");
  if (base_kind == BaseSpecKind::custom_csv) {
    std::ifstream probe(base_csv_path);
    if (!probe) throw std::invalid_argument("base matrix CSV not found: " + base_csv_path);
  }
  if (L % base_cols() != 0) throw std::invalid_argument("base column count must divide L");
}

BaseMatrix ExperimentConfig::make_base() const {
  switch (base_kind) {
    case BaseSpecKind::omega_lambda: return build_omega_lambda(omega, lambda, P);
    case BaseSpecKind::flat_1x1: return BaseMatrix(1, 1, {P});
    case BaseSpecKind::single_row: return BaseMatrix(1, L, std::vector<double>(L, P));
    case BaseSpecKind::custom_csv: {
      BaseMatrix W = load_base_matrix_csv(base_csv_path);
      if (!validate_power(W, P, 1e-9))
        throw std::invalid_argument("custom base matrix violates the power constraint");
      return W;
    }
  }
  throw std::invalid_argument("bad base kind");
}

std::size_t ExperimentConfig::base_rows() const {
  switch (base_kind) {
    case BaseSpecKind::omega_lambda: return lambda + omega - 1;
    case BaseSpecKind::flat_1x1: return 1;
    case BaseSpecKind::single_row: return 1;
    case BaseSpecKind::custom_csv: return load_base_matrix_csv(base_csv_path).rows();
  }
  return 1;
}

std::size_t ExperimentConfig::base_cols() const {
  switch (base_kind) {
    case BaseSpecKind::omega_lambda: return lambda;
    case BaseSpecKind::flat_1x1: return 1;
    case BaseSpecKind::single_row: return L;
    case BaseSpecKind::custom_csv: return load_base_matrix_csv(base_csv_path).cols();
  }
  return 1;
}

CodeParams ExperimentConfig::params_for_rate(double rate_nats) const {
  return derive_dimensions(L, M, rate_nats, base_rows(), base_cols(), P, sigma2);
}

ExperimentConfig preset_config(Preset preset, bool full) {
  ExperimentConfig cfg;
  cfg.preset = preset;
  const double ln2 = std::log(2.0);
  switch (preset) {
    case Preset::fig3_wave:
      cfg.L = 2048;
      cfg.M = 512;
      cfg.rates_nats = {1.5 * ln2};
      cfg.omega = 6;
      cfg.lambda = 32;
      cfg.n_trials = full ? 100 : 20;
      cfg.with_exact_se = true;
      break;
    case Preset::fig4_ser_vs_rate:
      cfg.L = 1024;
      cfg.M = 512;
      for (double r = 1.2; r < 1.8 + 1e-9; r += 0.1) cfg.rates_nats.push_back(r * ln2);
      cfg.omega = 6;
      cfg.lambda = 32;
      cfg.n_trials = full ? 10000 : 200;
      break;
    case Preset::fig5_omega_sweep:
      cfg.L = 1024;
      cfg.M = 512;
      for (double r = 1.2; r < 1.8 + 1e-9; r += 0.1) cfg.rates_nats.push_back(r * ln2);
      cfg.omega = 6;  // swept externally over {2,4,6,8}
      cfg.lambda = 32;
      cfg.n_trials = full ? 10000 : 200;
      break;
    case Preset::custom:
      break;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad config line: " + line);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  static const std::set<std::string> known = {
      "preset", "rate", "rates", "rate_unit", "L", "M", "P", "sigma2", "snr",
      "base", "omega", "lambda", "base_csv", "backend", "trials", "seed",
      "max_iter", "stop_tol", "workers", "fixed_operator", "with_exact_se",
      "se_samples", "out"};
  for (const auto& [key, value] : kv)
    if (!known.count(key)) throw std::invalid_argument("unknown config key: " + key);
  if (kv.count("rate") && !kv.count("rates")) kv["rates"] = kv["rate"];

  ExperimentConfig cfg;
  if (kv.count("preset")) cfg = preset_config(parse_preset(kv["preset"]), false);
  RateUnit unit = RateUnit::bits;
  if (kv.count("rate_unit")) unit = parse_rate_unit(kv["rate_unit"]);
  cfg.display_unit = unit;
  if (kv.count("rates")) {
    cfg.rates_nats.clear();
    std::stringstream ss(kv["rates"]);
    std::string cell;
    while (std::getline(ss, cell, ','))
      cfg.rates_nats.push_back(convert_rate(std::stod(cell), unit, RateUnit::nats));
  }
  if (kv.count("L")) cfg.L = std::stoull(kv["L"]);
  if (kv.count("M")) cfg.M = std::stoull(kv["M"]);
  if (kv.count("P")) cfg.P = std::stod(kv["P"]);
  if (kv.count("sigma2")) cfg.sigma2 = std::stod(kv["sigma2"]);
  if (kv.count("snr")) {
    cfg.sigma2 = 1.0;
    cfg.P = std::stod(kv["snr"]);
  }
  if (kv.count("base")) {
    const std::string& b = kv["base"];
    if (b == "omega_lambda") cfg.base_kind = BaseSpecKind::omega_lambda;
    else if (b == "flat") cfg.base_kind = BaseSpecKind::flat_1x1;
    else if (b == "single_row") cfg.base_kind = BaseSpecKind::single_row;
    else if (b == "csv") cfg.base_kind = BaseSpecKind::custom_csv;
    else throw std::invalid_argument("unknown base kind: " + b);
  }
  if (kv.count("omega")) cfg.omega = std::stoull(kv["omega"]);
  if (kv.count("lambda")) cfg.lambda = std::stoull(kv["lambda"]);
  if (kv.count("base_csv")) cfg.base_csv_path = kv["base_csv"];
  if (kv.count("backend")) cfg.backend = parse_backend(kv["backend"]);
  if (kv.count("trials")) cfg.n_trials = std::stoull(kv["trials"]);
  if (kv.count("seed")) cfg.master_seed = std::stoull(kv["seed"]);
  if (kv.count("max_iter")) cfg.max_iter = std::stoull(kv["max_iter"]);
  if (kv.count("stop_tol")) cfg.stop_tol = std::stod(kv["stop_tol"]);
  if (kv.count("workers")) cfg.workers = std::stoull(kv["workers"]);
  if (kv.count("fixed_operator")) cfg.fixed_operator = kv["fixed_operator"] == "true";
  if (kv.count("with_exact_se")) cfg.with_exact_se = kv["with_exact_se"] == "true";
  if (kv.count("se_samples")) cfg.se_samples = std::stoull(kv["se_samples"]);
  if (kv.count("out")) cfg.out_prefix = kv["out"];
  return cfg;
}

namespace {

TrialRecord run_trial(const ExperimentConfig& cfg, const CodeParams& params,
                      const BaseMatrix& base, std::size_t rate_idx, std::size_t trial) {
  const std::uint64_t op_index = cfg.fixed_operator ? 0 : trial;
  const std::uint64_t op_seed = derive_seed(cfg.master_seed, "op", {rate_idx, op_index});
  auto op = sample_operator(cfg.backend, params, base, op_seed);

  const MessageVector msg =
      random_message(cfg.L, cfg.M, derive_seed(cfg.master_seed, "msg", {rate_idx, trial}));
  const std::vector<double> x = encode(msg, *op);
  const std::vector<double> y =
      awgn(x, cfg.sigma2, derive_seed(cfg.master_seed, "noise", {rate_idx, trial}));

  AmpOptions opts;
  if (cfg.max_iter > 0) opts.max_iter = cfg.max_iter;
  opts.stop_tol = cfg.stop_tol;
  const AmpResult res = amp_decode(y, *op, opts, &msg);

  TrialRecord rec;
  rec.trial = trial;
  rec.seed = op_seed;
  rec.iters = res.iterations;
  rec.warn = res.trace.phi_clamped;
  rec.ser = section_error_rate(hard_decision(res.beta, cfg.L, cfg.M), msg);
  rec.nmse_history.reserve(res.trace.records.size());
  for (const auto& it : res.trace.records) rec.nmse_history.push_back(it.nmse);
  rec.nmse_final = rec.nmse_history.empty()
                       ? std::vector<double>(params.L_C, 1.0)
                       : rec.nmse_history.back();

  if (rec.ser > ser_bound_from_nmse(rec.nmse_final) + 1e-12)
    throw std::logic_error("SER exceeds the 4*NMSE bound");
  return rec;
}

}  // namespace

Aggregate run_experiment(const ExperimentConfig& config) {
  config.validate();
  const BaseMatrix base = config.make_base();

  Aggregate agg;
  agg.config = config;

  for (std::size_t rate_idx = 0; rate_idx < config.rates_nats.size(); ++rate_idx) {
    const double rate = config.rates_nats[rate_idx];
    const CodeParams params = config.params_for_rate(rate);

    RatePointAggregate point;
    point.rate_nats = rate;
    point.rate_bits = convert_rate(rate, RateUnit::nats, RateUnit::bits);
    point.n = params.n;
    point.R_eff_nats = params.R_eff;
    point.trials.resize(config.n_trials);

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= config.n_trials) return;
        point.trials[i] = run_trial(config, params, base, rate_idx, i);
        const std::size_t d = done.fetch_add(1) + 1;
        if (config.progress)
          std::fprintf(stderr, "\rrate point %zu/%zu: trial %zu/%zu", rate_idx + 1,
                       config.rates_nats.size(), d, config.n_trials);
      }
    };
    const std::size_t width = std::max<std::size_t>(1, config.workers);
    if (width == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < width; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (config.progress) std::fprintf(stderr, "\n");

    // Aggregation is a plain reduction in trial order.
    double ser_sum = 0.0, ser_sq = 0.0, iter_sum = 0.0;
    std::size_t max_t = 0;
    for (const auto& rec : point.trials) {
      ser_sum += rec.ser;
      ser_sq += rec.ser * rec.ser;
      iter_sum += static_cast<double>(rec.iters);
      max_t = std::max(max_t, rec.nmse_history.size());
    }
    const double nt = static_cast<double>(config.n_trials);
    point.mean_ser = ser_sum / nt;
    const double var = std::max(0.0, ser_sq / nt - point.mean_ser * point.mean_ser);
    point.ser_std_error = std::sqrt(var / nt);
    point.mean_iters = iter_sum / nt;

    point.mean_nmse_history.assign(max_t, std::vector<double>(params.L_C, 0.0));
    for (const auto& rec : point.trials) {
      for (std::size_t t = 0; t < max_t; ++t) {
        const auto& profile =
            t < rec.nmse_history.size() ? rec.nmse_history[t] : rec.nmse_history.back();
        for (std::size_t c = 0; c < params.L_C; ++c)
          point.mean_nmse_history[t][c] += profile[c] / nt;
      }
    }

    if (config.with_exact_se) {
      const SeTrace se =
          se_recursion(base, config.sigma2, params.R_eff, config.M, config.se_max_iter,
                       config.se_samples, derive_seed(config.master_seed, "se", {rate_idx}));
      point.se_psi = se.psi;
    }
    const SeTrace ase = asymptotic_se(base, config.sigma2, params.R_eff);
    point.ase_psi = ase.psi;
    for (std::size_t t = 0; t < ase.psi.size(); ++t) {
      bool all_zero = true;
      for (double v : ase.psi[t]) all_zero &= (v == 0.0);
      if (all_zero) {
        point.ase_first_full_decode = static_cast<long>(t);
        break;
      }
    }

    agg.points.push_back(std::move(point));
  }

  if (!config.out_prefix.empty()) emit_outputs(agg, config.out_prefix);
  return agg;
}

std::vector<PredictPoint> predict(const ExperimentConfig& config) {
  config.validate();
  const BaseMatrix base = config.make_base();
  std::vector<PredictPoint> out;
  for (std::size_t rate_idx = 0; rate_idx < config.rates_nats.size(); ++rate_idx) {
    const double rate = config.rates_nats[rate_idx];
    PredictPoint pt;
    pt.rate_nats = rate;
    pt.rate_bits = convert_rate(rate, RateUnit::nats, RateUnit::bits);
    pt.exact = se_recursion(base, config.sigma2, rate, config.M, config.se_max_iter,
                            config.se_samples, derive_seed(config.master_seed, "se", {rate_idx}));
    if (config.base_kind == BaseSpecKind::omega_lambda)
      pt.asymptotic = asymptotic_se_band(config.omega, config.lambda, config.snr(), rate);
    else
      pt.asymptotic = asymptotic_se(base, config.sigma2, rate);
    if (config.base_kind == BaseSpecKind::omega_lambda ||
        config.base_kind == BaseSpecKind::flat_1x1) {
      const std::size_t om = config.base_kind == BaseSpecKind::flat_1x1 ? 1 : config.omega;
      const std::size_t la = config.base_kind == BaseSpecKind::flat_1x1 ? 1 : config.lambda;
      pt.prop1 = proposition_one(om, la, config.snr(), rate);
      pt.has_prop1 = true;
    }
    out.push_back(std::move(pt));
  }
  return out;
}

namespace {

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void base_params_for_csv(const ExperimentConfig& cfg, std::size_t& omega, std::size_t& lambda) {
  switch (cfg.base_kind) {
    case BaseSpecKind::omega_lambda:
      omega = cfg.omega;
      lambda = cfg.lambda;
      break;
    case BaseSpecKind::flat_1x1:
      omega = 1;
      lambda = 1;
      break;
    default:
      omega = 0;
      lambda = 0;
  }
}

}  // namespace

std::string render_csv(const Aggregate& aggregate) {
  const ExperimentConfig& cfg = aggregate.config;
  std::size_t omega = 0, lambda = 0;
  base_params_for_csv(cfg, omega, lambda);
  const std::size_t L_C = cfg.base_cols();

  std::string out = "preset,rate_bits,rate_nats,omega,lambda,L,M,n,backend,trial,seed,ser,iters";
  for (std::size_t c = 1; c <= L_C; ++c) out += ",nmse_block_" + std::to_string(c);
  out += "\n";

  for (const auto& point : aggregate.points) {
    for (const auto& rec : point.trials) {
      out += preset_name(cfg.preset);
      out += ',' + fmt9(point.rate_bits) + ',' + fmt9(point.rate_nats);
      out += ',' + std::to_string(omega) + ',' + std::to_string(lambda);
      out += ',' + std::to_string(cfg.L) + ',' + std::to_string(cfg.M);
      out += ',' + std::to_string(point.n) + ',' + backend_name(cfg.backend);
      out += ',' + std::to_string(rec.trial) + ',' + std::to_string(rec.seed);
      out += ',' + fmt9(rec.ser) + ',' + std::to_string(rec.iters);
      for (double v : rec.nmse_final) out += ',' + fmt9(v);
      out += '\n';
    }
  }
  return out;
}

std::string render_json(const Aggregate& aggregate) {
  using json = nlohmann::ordered_json;
  const ExperimentConfig& cfg = aggregate.config;
  std::size_t omega = 0, lambda = 0;
  base_params_for_csv(cfg, omega, lambda);

  json j;
  j["preset"] = preset_name(cfg.preset);
  j["config"] = {{"L", cfg.L},
                 {"M", cfg.M},
                 {"P", cfg.P},
                 {"sigma2", cfg.sigma2},
                 {"snr", cfg.snr()},
                 {"omega", omega},
                 {"lambda", lambda},
                 {"backend", backend_name(cfg.backend)},
                 {"trials", cfg.n_trials},
                 {"seed", cfg.master_seed},
                 {"fixed_operator", cfg.fixed_operator}};
  j["points"] = json::array();
  for (const auto& point : aggregate.points) {
    json p;
    p["rate_bits"] = point.rate_bits;
    p["rate_nats"] = point.rate_nats;
    p["rate_effective_nats"] = point.R_eff_nats;
    p["n"] = point.n;
    p["mean_ser"] = point.mean_ser;
    p["ser_std_error"] = point.ser_std_error;
    p["mean_iters"] = point.mean_iters;
    p["amp_nmse"] = point.mean_nmse_history;
    if (!point.se_psi.empty()) p["se_psi"] = point.se_psi;
    p["ase_psi"] = point.ase_psi;
    p["ase_first_full_decode"] = point.ase_first_full_decode;
    j["points"].push_back(std::move(p));
  }
  return j.dump(2) + "\n";
}

void emit_outputs(const Aggregate& aggregate, const std::string& out_prefix) {
  {
    std::ofstream csv(out_prefix + ".csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + out_prefix + ".csv");
    csv << render_csv(aggregate);
  }
  {
    std::ofstream js(out_prefix + ".json", std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + out_prefix + ".json");
    js << render_json(aggregate);
  }
}

}  // namespace scsparc
