#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "holod/correctors.hpp"
#include "holod/study.hpp"

using namespace holod;

namespace {

StudyConfig small_config() {
  StudyConfig config;
  config.dimension = 2;
  config.coarse_cells = {2, 4};
  config.degrees = {1};
  config.ells = {0};  // saturating
  config.fine_cells = 16;
  config.model.kind = CoefficientKind::RoughUniform;
  config.model.eps_cells = 8;
  config.model.seed = 5;
  config.rhs = RhsSpec{RhsKind::F1, 1.0, ""};
  config.threads = 2;
  return config;
}

}  // namespace

TEST_SUITE("study") {

TEST_CASE("coefficient generation: constant") {
  ModelSpec spec;
  spec.kind = CoefficientKind::Constant;
  spec.lo = 1.0;
  const Coefficient coeff = generate_coefficient(spec, 2);
  CHECK(coeff.alpha() == 1.0);
  CHECK(coeff.beta() == 1.0);
}

TEST_CASE("coefficient generation: determinism and range statistics") {
  ModelSpec spec;
  spec.kind = CoefficientKind::RoughUniform;
  spec.lo = 0.25;
  spec.hi = 2.5;
  spec.eps_cells = 32;
  spec.seed = 7;
  const Coefficient a = generate_coefficient(spec, 2);
  const Coefficient b = generate_coefficient(spec, 2);
  CHECK((a.values() - b.values()).lpNorm<Eigen::Infinity>() == 0.0);

  spec.seed = 8;
  const Coefficient c = generate_coefficient(spec, 2);
  CHECK((a.values() - c.values()).lpNorm<Eigen::Infinity>() > 0.0);

  CHECK(a.alpha() >= 0.25);
  CHECK(a.beta() <= 2.5);
  // mean of 1024 iid uniform values on [0.25, 2.5]: 3 sigma of the sample
  // mean is 3 * (hi-lo)/sqrt(12)/32
  const double mean = a.values().mean();
  const double three_sigma = 3.0 * (2.5 - 0.25) / std::sqrt(12.0) / 32.0;
  CHECK(std::abs(mean - 1.375) <= three_sigma);

  spec.lo = -1.0;
  CHECK_THROWS_AS(generate_coefficient(spec, 2), ConfigError);
}

TEST_CASE("eoc fitting") {
  const std::vector<double> eocs = fit_eoc({1.0, 1.0 / 16}, {0.5, 0.25});
  REQUIRE(eocs.size() == 1);
  CHECK(eocs[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_eoc({1.0, 0.0}, {0.5, 0.25}), ConfigError);
  CHECK_THROWS_AS(fit_eoc({1.0}, {0.5}), ConfigError);
}

TEST_CASE("decay fitting") {
  std::vector<double> errors;
  std::vector<int> ells;
  for (int ell = 1; ell <= 6; ++ell) {
    errors.push_back(std::exp(-2.0 * ell));
    ells.push_back(ell);
  }
  CHECK(fit_decay(errors, ells) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(fit_decay({0.5, 0.5, 0.5}, {1, 2, 3}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_decay({1.0, -1.0}, {1, 2}), ConfigError);
}

TEST_CASE("phi values") {
  CHECK(phi(1, 1) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
  CHECK(phi(2, 3) == doctest::Approx(1.0 / std::sqrt(720.0)).epsilon(1e-14));
  CHECK(phi(3, 2) == doctest::Approx(std::sqrt(2.0 / 720.0)).epsilon(1e-14));
  CHECK(phi(4, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(phi(1, 3), ConfigError);
}

TEST_CASE("csv round-trip") {
  StudyResult result;
  StudyRow row;
  row.study = "h-sweep";
  row.dim = 2;
  row.H = 0.125;
  row.h = 1.0 / 512;
  row.eps = 1.0 / 128;
  row.p = 3;
  row.ell = 4;
  row.seed = 123456789012345ull;
  row.rel_energy_err = 1.2345678901234567e-5;
  row.rel_l2_err = 9.87e-8;
  row.eoc = std::nullopt;
  row.decay_slope = -2.125;
  row.wall_ms = 15.25;
  result.rows.push_back(row);

  row.eoc = 3.75;
  row.decay_slope = std::nullopt;
  row.rel_energy_err = std::nullopt;
  row.rel_l2_err = std::nullopt;
  result.rows.push_back(row);
  result.stagnated = true;

  const std::string text = serialize_csv(result);
  const StudyResult parsed = parse_csv(text);
  CHECK(parsed == result);
  CHECK(n_failed_rows(parsed) == 1);

  CHECK_THROWS_AS(parse_csv("bogus\n1,2,3\n"), ConfigError);
}

TEST_CASE("timing column stripping") {
  StudyResult result;
  StudyRow row;
  row.study = "single";
  row.wall_ms = 12.5;
  result.rows.push_back(row);
  row.wall_ms = 99.5;
  StudyResult other;
  other.rows.push_back(row);
  CHECK(serialize_csv(result) != serialize_csv(other));
  CHECK(strip_timing_column(serialize_csv(result)) ==
        strip_timing_column(serialize_csv(other)));
}

TEST_CASE("config validation") {
  StudyConfig config = small_config();
  CHECK_NOTHROW(validate_config(config));

  StudyConfig empty = config;
  empty.degrees.clear();
  CHECK_THROWS_AS(validate_config(empty), ConfigError);

  StudyConfig bad_dim = config;
  bad_dim.dimension = 3;
  CHECK_THROWS_AS(validate_config(bad_dim), ConfigError);

  StudyConfig coarse_fine = config;
  coarse_fine.fine_cells = 2;  // finer than eps
  CHECK_THROWS_AS(validate_config(coarse_fine), ConfigError);

  StudyConfig eps_coarser_than_H = config;
  eps_coarser_than_H.model.eps_cells = 1;
  CHECK_THROWS_AS(validate_config(eps_coarser_than_H), ConfigError);

  // constant coefficients are exempt from eps <= H
  StudyConfig constant = config;
  constant.model.kind = CoefficientKind::Constant;
  constant.model.eps_cells = 1;
  constant.model.lo = 1.0;
  CHECK_NOTHROW(validate_config(constant));
}

TEST_CASE("h-sweep produces rows with EOC entries") {
  const StudyConfig config = small_config();
  const StudyResult result = run_h_sweep(config);
  REQUIRE(result.rows.size() == 2);
  CHECK(result.rows[0].study == "h-sweep");
  CHECK(!result.rows[0].eoc.has_value());
  CHECK(result.rows[1].eoc.has_value());
  CHECK(result.rows[0].rel_energy_err.has_value());
  CHECK(*result.rows[0].rel_energy_err >= 0.0);
  // saturating sentinel echoes the effective patch radius
  CHECK(result.rows[0].ell == 2);
  CHECK(result.rows[1].ell == 4);
  CHECK(n_failed_rows(result) == 0);

  // determinism at the byte level, timing excluded
  const StudyResult again = run_h_sweep(config);
  CHECK(strip_timing_column(serialize_csv(result)) ==
        strip_timing_column(serialize_csv(again)));
}

TEST_CASE("h-sweep on a constant coefficient") {
  StudyConfig config;
  config.kind = StudyKind::HSweep;
  config.dimension = 2;
  config.coarse_cells = {2, 4, 8};
  config.degrees = {1};
  config.ells = {0};  // saturating
  config.fine_cells = 64;
  config.model.kind = CoefficientKind::Constant;
  config.model.lo = 1.0;
  config.model.eps_cells = 1;
  config.threads = 2;

  // f = 1 lies in the coarse space, so the unlocalized method reproduces
  // the fine solution exactly: (f, e) = (f, Pi e) = 0 for the error e.
  config.rhs = RhsSpec{RhsKind::Constant, 1.0, ""};
  const StudyResult exact = run_h_sweep(config);
  REQUIRE(exact.rows.size() == 3);
  for (const StudyRow& row : exact.rows) {
    CHECK(*row.rel_energy_err <= 1e-9);
  }

  // a right-hand side outside the coarse space shows the rate between
  // p+1 and p+2
  config.rhs = RhsSpec{RhsKind::F1, 1.0, ""};
  const StudyResult rates = run_h_sweep(config);
  REQUIRE(rates.rows.size() == 3);
  for (size_t i = 1; i < rates.rows.size(); ++i) {
    REQUIRE(rates.rows[i].eoc.has_value());
    CHECK(*rates.rows[i].eoc >= 1.8);
  }
}

TEST_CASE("ell-sweep stagnates once patches saturate") {
  StudyConfig config = small_config();
  config.kind = StudyKind::EllSweep;
  config.coarse_cells = {2};
  config.ells = {2, 3};  // both saturate the 2x2 coarse mesh
  const StudyResult result = run_ell_sweep(config);
  REQUIRE(result.rows.size() == 2);
  CHECK(result.stagnated);
  CHECK(*result.rows[0].rel_energy_err ==
        doctest::Approx(*result.rows[1].rel_energy_err).epsilon(1e-8));
  CHECK(result.rows[0].decay_slope.has_value());
}

TEST_CASE("single run emits one row") {
  StudyConfig config = small_config();
  config.kind = StudyKind::Single;
  const StudyResult result = run_single(config);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].study == "single");
  CHECK(result.rows[0].rel_energy_err.has_value());
}

TEST_CASE("basis cache accelerates reruns without changing results") {
  StudyConfig config = small_config();
  config.kind = StudyKind::Single;
  config.coarse_cells = {4};
  config.basis_cache_dir = ".";
  const StudyResult first = run_single(config);
  const StudyResult second = run_single(config);  // served from cache
  REQUIRE(first.rows.size() == 1);
  REQUIRE(second.rows.size() == 1);
  CHECK(*first.rows[0].rel_energy_err == *second.rows[0].rel_energy_err);
  CHECK(*first.rows[0].rel_l2_err == *second.rows[0].rel_l2_err);

  // the cache file is keyed by coefficient hash and discretization
  const CoarseSpace coarse{TensorMesh(2, 4), 1};
  const FineSpace fine{TensorMesh(2, 16)};
  const Coefficient coeff = generate_coefficient(config.model, 2);
  const uint64_t key = basis_cache_key(coeff, coarse, fine, 4);
  char name[32];
  std::snprintf(name, sizeof(name), "basis_%016llx.bin",
                static_cast<unsigned long long>(key));
  std::ifstream cached(name);
  CHECK(cached.good());
  cached.close();
  std::remove(name);
}

TEST_CASE("decay study rows and slopes") {
  StudyConfig config = small_config();
  config.kind = StudyKind::Decay;
  config.coarse_cells = {8};
  config.degrees = {1};
  config.ells = {1, 2, 3, 0};  // trailing saturating sweep point
  config.fine_cells = 32;
  config.model.eps_cells = 16;
  const StudyResult result = run_decay_study(config);
  // two rows (lowest/highest) per ell
  REQUIRE(result.rows.size() == 8);
  // saturating patches reproduce the ideal basis
  CHECK(*result.rows[6].rel_energy_err <= 1e-9);
  CHECK(*result.rows[7].rel_energy_err <= 1e-9);
  for (const StudyRow& row : result.rows) {
    CHECK((row.study == "decay-lowest" || row.study == "decay-highest"));
    CHECK(row.rel_energy_err.has_value());
    CHECK(row.decay_slope.has_value());
    CHECK(*row.decay_slope <= -1.0);
  }
  // errors decrease monotonically in ell for both tracked functions
  for (int offset : {0, 1}) {
    double previous = std::numeric_limits<double>::infinity();
    for (size_t i = static_cast<size_t>(offset); i < result.rows.size();
         i += 2) {
      CHECK(*result.rows[i].rel_energy_err <= previous * (1.0 + 1e-9));
      previous = *result.rows[i].rel_energy_err;
    }
  }

  StudyConfig capped = config;
  capped.dof_cap = 10;
  CHECK_THROWS_AS(run_decay_study(capped), ConfigError);
}

}  // TEST_SUITE
