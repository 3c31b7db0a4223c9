#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "curecg/errors.hpp"
#include "curecg/initializer.hpp"
#include "curecg/optimizer.hpp"
#include "curecg/simulator.hpp"
#include "oracles.hpp"

using namespace curecg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Relative change with the 1e-8 switch to absolute change, coded separately.
double rel_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = std::abs(b[i]) < 1e-8 ? a[i] - b[i] : (a[i] - b[i]) / b[i];
    s += r * r;
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("projection onto the feasible box", "[optimizer]") {
  const std::vector<double> a{1.5, 0.0, 0.0, -0.2, 0.3};
  CHECK(project(a) == ParamVector{1.0, {0.0, 0.0}, 1e-10, 0.3});
  const std::vector<double> inside{0.4, -2.0, 3.0, 0.7, 0.2};
  CHECK(project(inside).to_flat() == inside);
  const std::vector<double> c{-3.0, 1.0, 5.0, 1e-20};
  CHECK(project(c) == ParamVector{1e-10, {1.0}, 5.0, 1e-10});
  const std::vector<double> bad{0.5, NAN, 1.0, 1.0};
  CHECK_THROWS_AS(project(bad), DomainError);
}

TEST_CASE("Hager-Zhang coefficient", "[optimizer]") {
  const std::vector<double> d{1.0, 0.0}, g{1.0, 0.0}, g1{0.0, 1.0};
  const auto xi = hager_zhang_beta(d, g, g1);
  REQUIRE(xi.has_value());
  CHECK(*xi == -1.0);

  CHECK_FALSE(hager_zhang_beta(d, g, g).has_value());

  std::mt19937_64 rng(42);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> dd(5), gg(5), gg1(5);
    for (int j = 0; j < 5; ++j) {
      dd[j] = n01(rng);
      gg[j] = n01(rng);
      gg1[j] = n01(rng);
    }
    const auto v = hager_zhang_beta(dd, gg, gg1);
    REQUIRE(v.has_value());
    CHECK_THAT(*v, WithinRel(oracle::hz(dd, gg, gg1), 1e-12));
  }
  const std::vector<double> short_vec{1.0};
  CHECK_THROWS_AS(hager_zhang_beta(short_vec, g, g1), DimensionError);
}

TEST_CASE("Armijo backtracking", "[optimizer]") {
  NCGConfig config;  // lambda = 0.1, factor 0.5
  const ParamVector theta{0.5, {1.0}, 1.0, 1.0};

  SECTION("concave quadratic") {
    // l = -b^2 at b = 1 with d = g = -2: sufficient increase iff s <= 1 - lambda = 0.9.
    const ObjectiveFn l = [](const ParamVector& t) { return -t.beta[0] * t.beta[0]; };
    const std::vector<double> g{0.0, -2.0, 0.0, 0.0};
    for (auto [s_init, expected] : {std::pair{1.0, 0.5}, std::pair{0.8, 0.8},
                                    std::pair{3.0, 0.75}, std::pair{0.95, 0.475}}) {
      config.s_init = s_init;
      const auto ls = armijo_line_search(theta, l(theta), g, g, l, config);
      REQUIRE(ls.has_value());
      CHECK_THAT(ls->step, WithinAbs(expected, 1e-15));
      CHECK(ls->value >= l(theta) + config.lambda * ls->step * 4.0);
    }
  }
  SECTION("linear objective accepts the initial step") {
    const ObjectiveFn l = [](const ParamVector& t) { return 3.0 * t.beta[0]; };
    const std::vector<double> g{0.0, 3.0, 0.0, 0.0};
    const auto ls = armijo_line_search(theta, l(theta), g, g, l, config);
    REQUIRE(ls.has_value());
    CHECK(ls->step == 1.0);
    CHECK(ls->backtracks == 0);
  }
  SECTION("barrier objective") {
    const ObjectiveFn l = [](const ParamVector& t) {
      return t.beta[0] > 1.3 ? -std::numeric_limits<double>::infinity() : t.beta[0];
    };
    const std::vector<double> g{0.0, 1.0, 0.0, 0.0};
    const auto ls = armijo_line_search(theta, l(theta), g, g, l, config);
    REQUIRE(ls.has_value());
    CHECK(ls->step == 0.25);
    CHECK(std::isfinite(ls->value));
  }
  SECTION("objective that throws counts as a rejected step") {
    const ObjectiveFn l = [](const ParamVector& t) {
      if (t.beta[0] > 1.1) throw NumericError("out of range");
      return t.beta[0];
    };
    const std::vector<double> g{0.0, 1.0, 0.0, 0.0};
    const auto ls = armijo_line_search(theta, l(theta), g, g, l, config);
    REQUIRE(ls.has_value());
    CHECK(ls->step == 0.0625);
  }
  SECTION("no admissible step") {
    const ObjectiveFn l = [](const ParamVector& t) { return -std::abs(t.beta[0] - 1.0); };
    const std::vector<double> g{0.0, 1.0, 0.0, 0.0};
    config.max_backtracks = 10;
    CHECK_FALSE(armijo_line_search(theta, l(theta), g, g, l, config).has_value());
  }
  SECTION("trial points are projected") {
    const ObjectiveFn l = [](const ParamVector& t) { return t.alpha; };
    const std::vector<double> g{1.0, 0.0, 0.0, 0.0};
    const auto ls = armijo_line_search(theta, l(theta), g, g, l, config);
    REQUIRE(ls.has_value());
    CHECK(ls->theta.alpha <= 1.0);
  }
}

TEST_CASE("relative change norm", "[optimizer]") {
  const ParamVector a{0.5, {1.0, 0.0}, 2.0, 0.1};
  const ParamVector b{0.55, {0.9, 0.02}, 2.2, 0.1};
  CHECK_THAT(relative_change(b, a), WithinRel(rel_oracle(b.to_flat(), a.to_flat()), 1e-14));
  CHECK(relative_change(a, a) == 0.0);
}

TEST_CASE("configuration validation", "[optimizer]") {
  NCGConfig c;
  CHECK_NOTHROW(c.validate());
  c.lambda = 0.7;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = NCGConfig{};
  c.tol = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = NCGConfig{};
  c.k_max = 0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("NCG on concave quadratics", "[optimizer]") {
  const std::vector<double> opt{0.5, 0.3, 0.7, 0.4};
  const std::vector<double> curv{1.0, 2.0, 3.0, 4.0};
  const ObjectiveFn l = [&](const ParamVector& t) {
    const auto f = t.to_flat();
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) s -= curv[i] * (f[i] - opt[i]) * (f[i] - opt[i]);
    return s;
  };
  const GradientFn grad = [&](const ParamVector& t) {
    const auto f = t.to_flat();
    std::vector<double> g(4);
    for (std::size_t i = 0; i < 4; ++i) g[i] = -2.0 * curv[i] * (f[i] - opt[i]);
    return g;
  };

  SECTION("gradient vanishes at the optimum") {
    for (double v : grad(ParamVector::from_flat(opt))) CHECK(v == 0.0);
  }
  for (auto form : {ConjugacyForm::kAscent, ConjugacyForm::kAsWritten}) {
    NCGConfig c;
    c.tol = 1e-12;
    c.conjugacy = form;
    const auto fit = ncg_maximize(l, grad, ParamVector{0.9, {-1.0}, 2.0, 1.5},
                                  ModelVariant::free_alpha(), c);
    CHECK(fit.converged);
    CHECK(fit.iterations < 50);
    const auto f = fit.theta_hat.to_flat();
    for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(f[i], WithinAbs(opt[i], 1e-6));
  }

  SECTION("fixed alpha is held") {
    const auto fit = ncg_maximize(l, grad, ParamVector{0.9, {-1.0}, 2.0, 1.5},
                                  ModelVariant::fixed_alpha(0.2), {});
    for (const auto& t : fit.trace) CHECK(t.loglik >= t.loglik_prev);
    CHECK(fit.theta_hat.alpha == 0.2);
  }
  SECTION("optimum outside the box lands on the bound") {
    const std::vector<double> far{1.7, 0.3, 0.7, 0.4};
    const ObjectiveFn l2 = [&](const ParamVector& t) {
      const auto f = t.to_flat();
      double s = 0.0;
      for (std::size_t i = 0; i < 4; ++i) s -= (f[i] - far[i]) * (f[i] - far[i]);
      return s;
    };
    const GradientFn g2 = [&](const ParamVector& t) {
      const auto f = t.to_flat();
      std::vector<double> g(4);
      for (std::size_t i = 0; i < 4; ++i) g[i] = -2.0 * (f[i] - far[i]);
      return g;
    };
    NCGConfig c;
    c.tol = 1e-7;
    const auto fit = ncg_maximize(l2, g2, ParamVector{0.5, {0.0}, 1.0, 1.0},
                                  ModelVariant::free_alpha(), c);
    CHECK(fit.converged);
    CHECK(fit.theta_hat.alpha == 1.0);
    CHECK_THAT(fit.theta_hat.beta[0], WithinAbs(0.3, 1e-6));
  }
  SECTION("iteration cap") {
    NCGConfig c;
    c.k_max = 1;
    c.tol = 1e-14;
    const auto fit = ncg_maximize(l, grad, ParamVector{0.9, {-1.0}, 2.0, 1.5},
                                  ModelVariant::free_alpha(), c);
    CHECK_FALSE(fit.converged);
    CHECK(fit.status == "max_iterations");
    CHECK(fit.iterations == 1);
  }
  SECTION("infeasible start") {
    CHECK_THROWS_AS(ncg_maximize(l, grad, ParamVector{0.5, {0.0}, -1.0, 1.0},
                                 ModelVariant::free_alpha(), {}),
                    DomainError);
  }
}

TEST_CASE("cure-model fits keep the Armijo and feasibility contracts", "[optimizer]") {
  BinaryDesign design;
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto data = generate_binary(design, SimSeed{seed, 0});
    const auto init = initialize(data, ModelVariant::free_alpha());
    const auto fit = fit_model(data, init.theta0, ModelVariant::free_alpha());
    REQUIRE_FALSE(fit.trace.empty());
    for (const auto& t : fit.trace) {
      CHECK(t.loglik >= t.loglik_prev + 0.1 * t.step * t.directional);
      CHECK(t.directional > 0.0);
      CHECK(t.theta.is_feasible());
    }
    CHECK(fit.theta_hat.is_feasible());
    CHECK(fit.loglik >= init.loglik0);
    CHECK_THAT(fit.loglik, WithinRel(log_likelihood(fit.theta_hat, data), 1e-12));
  }
}

TEST_CASE("mixture data fitted with free alpha stays on the bound", "[optimizer]") {
  BinaryDesign design;
  design.alpha = 1.0;
  design.n1 = 1800;
  design.n2 = 1200;
  const auto data = generate_binary(design, SimSeed{3, 0});
  NCGConfig c;
  c.k_max = 2000;
  c.tol = 1e-8;
  const auto fit = fit_model(data, design.truth(), ModelVariant::free_alpha(), c);
  CHECK(fit.converged);
  CHECK(fit.theta_hat.alpha == 1.0);
  const auto g = gradient(fit.theta_hat, data);
  CHECK(g[0] > 0.0);  // pushing outward, held by the projection
  for (std::size_t j = 1; j < g.size(); ++j) CHECK(std::abs(g[j]) < 1e-2);
}
