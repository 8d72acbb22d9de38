#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scsparc/sim.hpp"

using namespace scsparc;

namespace {
const double ln2 = std::log(2.0);

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.L = 64;
  cfg.M = 32;
  cfg.rates_nats = {1.0 * ln2};
  cfg.omega = 3;
  cfg.lambda = 8;
  cfg.backend = Backend::hadamard;
  cfg.n_trials = 4;
  cfg.master_seed = 5;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("preset configs") {
  const ExperimentConfig f3 = preset_config(Preset::fig3_wave);
  CHECK(f3.L == 2048);
  CHECK(f3.M == 512);
  CHECK(f3.omega == 6);
  CHECK(f3.lambda == 32);
  CHECK(f3.rates_nats.size() == 1);
  CHECK(f3.rates_nats[0] == doctest::Approx(1.5 * ln2));
  CHECK(f3.with_exact_se);
  CHECK(preset_config(Preset::fig3_wave, true).n_trials > f3.n_trials);

  const ExperimentConfig f4 = preset_config(Preset::fig4_ser_vs_rate);
  CHECK(f4.rates_nats.size() >= 4);
  CHECK(f4.rates_nats.front() == doctest::Approx(1.2 * ln2));
  CHECK(f4.rates_nats.back() == doctest::Approx(1.8 * ln2));

  CHECK(parse_preset("fig3_wave") == Preset::fig3_wave);
  CHECK(preset_name(Preset::fig5_omega_sweep) == "fig5_omega_sweep");
  CHECK_THROWS_AS(parse_preset("fig9"), std::invalid_argument);
}

TEST_CASE("experiments are deterministic in the master seed") {
  const ExperimentConfig cfg = tiny_config();
  const Aggregate a = run_experiment(cfg);
  const Aggregate b = run_experiment(cfg);
  CHECK(render_csv(a) == render_csv(b));
  CHECK(render_json(a) == render_json(b));

  ExperimentConfig other = cfg;
  other.master_seed = 6;
  CHECK(render_csv(run_experiment(other)) != render_csv(a));
}

TEST_CASE("worker count does not change the results") {
  ExperimentConfig cfg = tiny_config();
  cfg.n_trials = 6;
  const Aggregate serial = run_experiment(cfg);
  cfg.workers = 4;
  const Aggregate parallel = run_experiment(cfg);
  CHECK(render_csv(serial) == render_csv(parallel));
  CHECK(render_json(serial) == render_json(parallel));
}

TEST_CASE("fixed operator reuses one design matrix") {
  ExperimentConfig cfg = tiny_config();
  cfg.fixed_operator = true;
  const Aggregate agg = run_experiment(cfg);
  const auto& trials = agg.points[0].trials;
  for (const TrialRecord& t : trials) CHECK(t.seed == trials[0].seed);

  cfg.fixed_operator = false;
  const auto& fresh = run_experiment(cfg).points[0].trials;
  CHECK(fresh[0].seed != fresh[1].seed);
}

TEST_CASE("aggregate fields are consistent") {
  ExperimentConfig cfg = tiny_config();
  cfg.rates_nats = {0.8 * ln2, 1.0 * ln2};
  const Aggregate agg = run_experiment(cfg);
  REQUIRE(agg.points.size() == 2);
  for (const RatePointAggregate& pt : agg.points) {
    REQUIRE(pt.trials.size() == cfg.n_trials);
    double acc = 0.0;
    for (const TrialRecord& t : pt.trials) {
      acc += t.ser;
      REQUIRE(t.nmse_final.size() == cfg.lambda);
      for (double v : t.nmse_final) {
        CHECK(v >= 0.0);
        CHECK(v <= 2.0 + 1e-9);
      }
    }
    CHECK(pt.mean_ser == doctest::Approx(acc / static_cast<double>(cfg.n_trials)));
    CHECK(pt.rate_bits == doctest::Approx(pt.rate_nats / ln2));
    CHECK(!pt.mean_nmse_history.empty());
    for (const auto& row : pt.mean_nmse_history) REQUIRE(row.size() == cfg.lambda);
    // asymptotic prediction always attached
    CHECK(!pt.ase_psi.empty());
  }
  // lower rate should not decode worse on this easy code
  CHECK(agg.points[0].mean_ser <= agg.points[1].mean_ser + 1e-12);
}

TEST_CASE("csv rendering") {
  ExperimentConfig cfg = tiny_config();
  cfg.n_trials = 2;
  const Aggregate agg = run_experiment(cfg);
  const std::string csv = render_csv(agg);

  std::istringstream lines(csv);
  std::string header;
  REQUIRE(std::getline(lines, header));
  std::string expected = "preset,rate_bits,rate_nats,omega,lambda,L,M,n,backend,trial,seed,ser,iters";
  for (std::size_t c = 1; c <= cfg.lambda; ++c) expected += ",nmse_block_" + std::to_string(c);
  CHECK(header == expected);

  std::size_t rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    std::size_t commas = 0;
    for (char ch : line) commas += ch == ',';
    CHECK(commas == 12 + cfg.lambda);
  }
  CHECK(rows == cfg.n_trials * agg.points.size());
  CHECK(csv.find("\r") == std::string::npos);
  CHECK(csv.find("\ncustom,") != std::string::npos);  // preset column populated
}

TEST_CASE("emitted files round trip through the csv") {
  ExperimentConfig cfg = tiny_config();
  cfg.n_trials = 2;
  const Aggregate agg = run_experiment(cfg);
  emit_outputs(agg, "test_sim_out");
  CHECK(slurp("test_sim_out.csv") == render_csv(agg));
  CHECK(slurp("test_sim_out.json") == render_json(agg));

  // every ser value printed in the csv matches the aggregate to print precision
  std::istringstream lines(render_csv(agg));
  std::string line;
  std::getline(lines, line);  // header
  std::size_t k = 0;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string f;
    for (int i = 0; i < 12; ++i) std::getline(fields, f, ',');
    CHECK(std::stod(f) == doctest::Approx(agg.points[0].trials[k].ser).epsilon(1e-7));
    ++k;
  }
  std::remove("test_sim_out.csv");
  std::remove("test_sim_out.json");
}

TEST_CASE("prediction-only report") {
  ExperimentConfig cfg = tiny_config();
  cfg.se_samples = 1000;
  cfg.se_max_iter = 8;
  const auto points = predict(cfg);
  REQUIRE(points.size() == 1);
  CHECK(points[0].rate_bits == doctest::Approx(1.0));
  CHECK(points[0].exact.mode == SeMode::exact);
  CHECK(points[0].asymptotic.mode == SeMode::asymptotic);
  CHECK(points[0].has_prop1);  // omega/lambda base
  CHECK(points[0].exact.psi.back().size() == cfg.lambda);
}

TEST_CASE("config file loading") {
  const std::string path = "test_sim_config.cfg";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "L = 128\n"
        << "M=64\n"
        << "rate = 1.25\n"
        << "rate_unit = bits\n"
        << "omega = 2\n"
        << "lambda = 4\n"
        << "backend = gaussian\n"
        << "trials = 3\n"
        << "seed = 99\n";
  }
  const ExperimentConfig cfg = load_config(path);
  CHECK(cfg.L == 128);
  CHECK(cfg.M == 64);
  REQUIRE(cfg.rates_nats.size() == 1);
  CHECK(cfg.rates_nats[0] == doctest::Approx(1.25 * ln2));
  CHECK(cfg.omega == 2);
  CHECK(cfg.lambda == 4);
  CHECK(cfg.backend == Backend::gaussian);
  CHECK(cfg.n_trials == 3);
  CHECK(cfg.master_seed == 99);
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "no_such_key = 1\n";
  }
  CHECK_THROWS_AS(load_config(path), std::invalid_argument);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_config("definitely_missing.cfg"), std::invalid_argument);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = tiny_config();
  cfg.lambda = 3;  // Lambda < 2*omega - 1
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config();
  cfg.L = 63;  // not divisible by lambda
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
  cfg = tiny_config();
  cfg.rates_nats.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
