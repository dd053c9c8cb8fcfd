#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "weylab/random.hpp"
#include "weylab/spectral.hpp"
#include "weylab/states.hpp"

using namespace weylab;
using Catch::Matchers::ContainsSubstring;

namespace {

StateVector random_state(const GridSpec& grid, std::uint64_t seed) {
  SplitMix64 rng(seed);
  StateVector psi = make_state(grid);
  for (cdouble& a : psi.amp) a = cdouble{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return psi;
}

StateVector plane_wave(const GridSpec& grid, std::size_t bin) {
  StateVector psi = make_state(grid);
  for (std::size_t j = 0; j < grid.n; ++j) psi.amp[j] = std::polar(1.0, grid.k(bin) * grid.x(j));
  return psi;
}

SpectralSymbol symbol_for(const GridSpec& grid, const std::string& text,
                          const std::map<std::string, double>& params = {}) {
  return make_symbol(text, params, -grid.kmax(), grid.kmax(), grid.dk());
}

// unnormalized Gaussian samples, so analytic references share the exact
// normalization constant of the sampled state
StateVector raw_gaussian(const GridSpec& grid, double x0, double sigma, double k0) {
  StateVector psi = make_state(grid);
  for (std::size_t j = 0; j < grid.n; ++j) {
    double x = grid.x(j);
    psi.amp[j] = std::exp(-(x - x0) * (x - x0) / (2.0 * sigma * sigma)) *
                 std::polar(1.0, k0 * x);
  }
  return psi;
}

}  // namespace

TEST_CASE("singular sets exclude margins around their points", "[spectral]") {
  SingularSet z = make_singular_set({3.0, -1.0}, 0.5);
  CHECK(z.points == std::vector<double>{-1.0, 3.0});  // sorted on construction
  CHECK(z.excludes(-1.2));
  CHECK(z.excludes(3.5));
  CHECK_FALSE(z.excludes(0.0));
  CHECK_FALSE(z.excludes(3.51));
  CHECK_THROWS_AS(make_singular_set({0.0}, 0.0), SpectralError);
  CHECK_THROWS_AS(make_singular_set({0.0}, -1.0), SpectralError);
}

TEST_CASE("the default exclusion margin scales with bin spacing", "[spectral]") {
  CHECK(default_margin(make_grid(4096, 200.0)) == 0.5);
  GridSpec coarse = make_grid(64, 10.0);
  CHECK_THAT(default_margin(coarse), Catch::Matchers::WithinRel(4.0 * coarse.dk(), 1e-15));
}

TEST_CASE("multipliers act diagonally in the frequency representation", "[spectral]") {
  GridSpec g = make_grid(128, 20.0);
  SingularSet none = make_singular_set({}, 0.5);

  SECTION("the constant 1 is the identity") {
    MultiplierOp one = make_multiplier(g, none, [](double) { return cdouble{1.0, 0.0}; }, "one");
    StateVector psi = random_state(g, 3);
    CHECK(distance(apply_multiplier(one, psi), psi) <= 1e-13 * norm(psi));
  }
  SECTION("plane waves are eigenvectors") {
    MultiplierOp mom = make_multiplier(g, none, [](double k) { return cdouble{k, 0.0}; }, "k");
    StateVector pw = plane_wave(g, 5);
    StateVector want = scaled(pw, cdouble{g.k(5), 0.0});
    CHECK(distance(apply_multiplier(mom, pw), want) <= 1e-12 * norm(pw));
  }
  SECTION("non-finite values on unmasked bins are rejected") {
    CHECK_THROWS_WITH(
        make_multiplier(g, none, [](double k) { return cdouble{1.0 / k, 0.0}; }, "inv"),
        ContainsSubstring("non-finite value at unmasked bin"));
  }
  SECTION("grid mismatch is rejected") {
    MultiplierOp one = make_multiplier(g, none, [](double) { return cdouble{1.0, 0.0}; }, "one");
    CHECK_THROWS_AS(apply_multiplier(one, random_state(make_grid(64, 20.0), 4)), SpectralError);
  }
}

TEST_CASE("multiplier algebra: products, commutation, self-adjointness", "[spectral]") {
  GridSpec g = make_grid(128, 20.0);
  SingularSet none = make_singular_set({}, 0.5);
  auto f = [](double k) { return cdouble{k * k, 0.0}; };
  auto h = [](double k) { return cdouble{std::sin(k), 0.0}; };
  MultiplierOp mf = make_multiplier(g, none, f, "f");
  MultiplierOp mh = make_multiplier(g, none, h, "h");
  MultiplierOp mfh = make_multiplier(
      g, none, [&](double k) { return f(k) * h(k); }, "fh");
  StateVector psi = random_state(g, 7);

  StateVector chained = apply_multiplier(mf, apply_multiplier(mh, psi));
  CHECK(distance(apply_multiplier(mfh, psi), chained) <= 1e-13 * norm(apply_multiplier(mfh, psi)) + 1e-13);
  StateVector swapped = apply_multiplier(mh, apply_multiplier(mf, psi));
  CHECK(distance(chained, swapped) <= 1e-13 * (norm(chained) + 1.0));

  StateVector phi = random_state(g, 8);
  cdouble lhs = inner(psi, apply_multiplier(mf, phi));
  cdouble rhs = inner(apply_multiplier(mf, psi), phi);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
}

TEST_CASE("derivative multipliers carry the exclusion mask", "[spectral]") {
  GridSpec g = make_grid(4096, 200.0);

  SECTION("identity symbol: derivative and inverse are both one, nothing masked") {
    SpectralSymbol sym = symbol_for(g, "x");
    SingularSet none = make_singular_set({}, 0.5);
    MultiplierOp dg = gprime_op(sym, g, none);
    MultiplierOp dginv = gprime_inv_op(sym, g, none);
    for (std::size_t i = 0; i < g.n; ++i) {
      REQUIRE(dg.masked[i] == 0);
      REQUIRE(dg.values[i] == cdouble{1.0, 0.0});
      REQUIRE(dginv.values[i] == cdouble{1.0, 0.0});
    }
  }
  SECTION("quadratic symbol: derivative is k, masked bins are exactly zero") {
    SpectralSymbol sym = symbol_for(g, "x^2/2");
    SingularSet z = make_singular_set({0.0}, 0.5);
    MultiplierOp dg = gprime_op(sym, g, z);
    MultiplierOp dginv = gprime_inv_op(sym, g, z);
    std::size_t masked = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
      double k = g.k(i);
      if (std::abs(k) <= 0.5) {
        ++masked;
        REQUIRE(dg.masked[i] == 1);
        REQUIRE(dg.values[i] == cdouble{0.0, 0.0});
        REQUIRE(dginv.values[i] == cdouble{0.0, 0.0});
      } else {
        REQUIRE(dg.values[i] == cdouble{k, 0.0});
        REQUIRE(std::abs(dginv.values[i] - cdouble{1.0 / k, 0.0}) <= 1e-15);
      }
    }
    CHECK(masked > 0);
  }
  SECTION("log symbol: the inverse multiplier is k on unmasked bins") {
    SpectralSymbol sym = symbol_for(g, "log(abs(x))");
    SingularSet z = make_singular_set({0.0}, 0.5);
    MultiplierOp dginv = gprime_inv_op(sym, g, z);
    for (std::size_t i = 0; i < g.n; ++i) {
      double k = g.k(i);
      if (std::abs(k) <= 0.5) continue;
      REQUIRE(std::abs(dginv.values[i] - cdouble{k, 0.0}) <= 1e-12 * (1.0 + std::abs(k)));
    }
  }
  SECTION("margins thinner than two bins are rejected") {
    SpectralSymbol sym = symbol_for(g, "x");
    SingularSet thin = make_singular_set({}, 0.5 * g.dk());
    CHECK_THROWS_AS(gprime_op(sym, g, thin), SpectralError);
    CHECK_THROWS_AS(gprime_inv_op(sym, g, thin), SpectralError);
  }
}

TEST_CASE("an exclusion set that misses a derivative zero is a hard error", "[spectral]") {
  GridSpec g = make_grid(4096, 200.0);
  SpectralSymbol sym = symbol_for(g, "x^2/2");  // derivative vanishes at k = 0, a grid bin
  SingularSet wrong = make_singular_set({5.0}, 0.5);
  CHECK_THROWS_WITH(gprime_inv_op(sym, g, wrong),
                    ContainsSubstring("derivative vanishes at unmasked bin"));
}

TEST_CASE("inverse and derivative multipliers cancel off the mask", "[spectral]") {
  GridSpec g = make_grid(4096, 200.0);
  SpectralSymbol sym = symbol_for(g, "x^2/2");
  SingularSet z = make_singular_set({0.0}, 0.5);
  MultiplierOp dg = gprime_op(sym, g, z);
  MultiplierOp dginv = gprime_inv_op(sym, g, z);
  TestVector tv = make_gaussian_test_vector(g, GaussianParams{0.0, 5.0, 3.0},
                                            make_bump(1.0, 5.0), z);
  StateVector round = apply_multiplier(dg, apply_multiplier(dginv, tv.state));
  CHECK(distance(round, tv.state) <= 1e-12 * norm(tv.state));
}

TEST_CASE("masked mass measures spectral weight inside the margins", "[spectral]") {
  GridSpec g = make_grid(128, 20.0);
  SingularSet z = make_singular_set({g.k(5)}, 0.5);
  CHECK(masked_mass(plane_wave(g, 40), z) <= 1e-28);  // transform round-trip noise only
  CHECK(masked_mass(plane_wave(g, 5), z) == 1.0);
  CHECK_THROWS_AS(masked_mass(make_state(g), z), SpectralError);
}

TEST_CASE("evolution phases are unit modulus with singular bins dropped", "[spectral]") {
  GridSpec g = make_grid(128, 20.0);
  SpectralSymbol sym = symbol_for(g, "log(abs(x))");
  std::vector<char> dropped;
  std::vector<cdouble> vals = evolution_values(sym, g, 0.7, &dropped);
  REQUIRE(dropped.size() == g.n);
  CHECK(dropped[0] == 1);  // k = 0 bin: log|0| is not finite
  CHECK(vals[0] == cdouble{0.0, 0.0});
  for (std::size_t i = 1; i < g.n; ++i) {
    CHECK(dropped[i] == 0);
    CHECK(std::abs(std::abs(vals[i]) - 1.0) <= 1e-15);
  }
}

TEST_CASE("evolution is unitary and obeys the group law", "[spectral]") {
  GridSpec g = make_grid(1024, 100.0);
  SpectralSymbol sym = symbol_for(g, "x^2/2");
  StateVector psi = raw_gaussian(g, 0.0, 5.0, 3.0);

  SECTION("zero time is the identity") {
    CHECK(distance(evolve(sym, 0.0, psi), psi) <= 1e-13 * norm(psi));
  }
  SECTION("norm preservation") {
    CHECK(std::abs(norm(evolve(sym, 2.3, psi)) - norm(psi)) <= 1e-12 * norm(psi));
  }
  SECTION("composition of times") {
    StateVector two_steps = evolve(sym, 0.7, evolve(sym, 0.4, psi));
    StateVector one_step = evolve(sym, 1.1, psi);
    CHECK(distance(two_steps, one_step) <= 1e-12 * norm(psi));
  }
  SECTION("inverse direction") {
    CHECK(distance(evolve(sym, -0.9, evolve(sym, 0.9, psi)), psi) <= 1e-12 * norm(psi));
  }
}

TEST_CASE("identity-symbol evolution translates wave packets", "[spectral]") {
  GridSpec g = make_grid(4096, 200.0);
  SpectralSymbol sym = symbol_for(g, "x");
  const double sigma = 5.0, k0 = 3.0, t = 1.0;
  StateVector psi = raw_gaussian(g, 0.0, sigma, k0);
  double n = norm(psi);
  for (cdouble& a : psi.amp) a /= n;

  StateVector moved = evolve(sym, t, psi);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.n; ++j) {
    double x = g.x(j);
    cdouble want = std::exp(-(x - t) * (x - t) / (2.0 * sigma * sigma)) *
                   std::polar(1.0, k0 * (x - t)) / n;
    worst = std::max(worst, std::abs(moved.amp[j] - want));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("quadratic-symbol evolution matches the analytic spreading packet", "[spectral]") {
  GridSpec g = make_grid(4096, 200.0);
  SpectralSymbol sym = symbol_for(g, "x^2/2");
  const double sigma = 5.0, k0 = 3.0, t = 1.0;
  StateVector psi = raw_gaussian(g, 0.0, sigma, k0);
  double n = norm(psi);
  for (cdouble& a : psi.amp) a /= n;

  StateVector evolved = evolve(sym, t, psi);
  const cdouble width{sigma * sigma, t};
  const cdouble prefactor = sigma / std::sqrt(width);
  StateVector want = make_state(g);
  for (std::size_t j = 0; j < g.n; ++j) {
    double x = g.x(j);
    cdouble phase{0.0, k0 * x - 0.5 * t * k0 * k0};
    want.amp[j] =
        prefactor * std::exp(phase - (x - k0 * t) * (x - k0 * t) / (2.0 * width)) / n;
  }
  CHECK(distance(evolved, want) <= 1e-8);
}

TEST_CASE("evolution refuses states with mass on singular bins", "[spectral]") {
  GridSpec g = make_grid(128, 20.0);
  SpectralSymbol sym = symbol_for(g, "log(abs(x))");
  StateVector dc = make_state(g);
  for (cdouble& a : dc.amp) a = cdouble{1.0, 0.0};  // all mass at k = 0
  CHECK_THROWS_WITH(evolve(sym, 0.5, dc), ContainsSubstring("singular"));

  // spectrum safely away from k = 0 evolves fine
  StateVector pw = plane_wave(g, 30);
  CHECK(std::abs(norm(evolve(sym, 0.5, pw)) - norm(pw)) <= 1e-12 * norm(pw));
  CHECK_THROWS_AS(evolve(sym, 0.5, make_state(g)), SpectralError);
}
