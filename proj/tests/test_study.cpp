#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "curecg/errors.hpp"
#include "curecg/study.hpp"

using namespace curecg;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("bias and RMSE", "[study]") {
  const std::vector<double> same{1.5, 1.5, 1.5};
  CHECK(bias_rmse(same, 1.5).bias == 0.0);
  CHECK(bias_rmse(same, 1.5).rmse == 0.0);

  const std::vector<double> spread{0.0, 2.0};
  CHECK(bias_rmse(spread, 1.0).bias == 0.0);
  CHECK(bias_rmse(spread, 1.0).rmse == 1.0);

  const std::vector<double> three{1.0, 2.0, 3.0};
  CHECK_THAT(bias_rmse(three, 2.0).bias, WithinAbs(0.0, 1e-15));
  CHECK_THAT(bias_rmse(three, 2.0).rmse, WithinRel(std::sqrt(2.0 / 3.0), 1e-15));

  SECTION("RMSE^2 = bias^2 + variance") {
    const std::vector<double> v{0.3, 0.9, 1.7, 0.2, 1.1, 0.55};
    const double truth = 0.8;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= v.size();
    const auto br = bias_rmse(v, truth);
    CHECK_THAT(br.rmse * br.rmse, WithinAbs(br.bias * br.bias + var, 1e-12));
    CHECK(br.rmse >= std::abs(br.bias));
  }
  CHECK_THROWS_AS(bias_rmse(std::vector<double>{}, 0.0), DomainError);
}

TEST_CASE("cure rate summary", "[study]") {
  BinaryDesign design;
  const auto truth = design.truth();
  const std::vector<ParamVector> exact(4, truth);
  const auto s = cure_rate_summary(exact, design);
  REQUIRE(s.size() == 2);
  CHECK(s[0].name == "p01");
  CHECK(s[1].name == "p00");
  for (const auto& p : s) {
    CHECK_THAT(p.bias, WithinAbs(0.0, 1e-12));
    CHECK_THAT(p.rmse, WithinAbs(0.0, 1e-12));
  }

  ParamVector off = truth;
  off.beta[0] += 0.2;
  const auto one = cure_rate_summary({off}, design);
  const double dev1 = cure_rate({1.0, 1.0}, off) - design.p01;
  const double dev0 = cure_rate({1.0, 0.0}, off) - design.p00;
  CHECK_THAT(one[0].bias, WithinAbs(dev1, 1e-15));
  CHECK_THAT(one[0].rmse, WithinAbs(std::abs(dev1), 1e-15));
  CHECK_THAT(one[1].bias, WithinAbs(dev0, 1e-15));
  CHECK_THROWS_AS(cure_rate_summary({}, design), DomainError);
}

TEST_CASE("replication seeds", "[study]") {
  const SimSeed master{42, 3};
  CHECK(replication_seed(master, 0).seed == 42);
  CHECK(replication_seed(master, 5).stream == (std::uint64_t{3} << 32) + 5);
  CHECK(replication_seed(master, 5).stream != replication_seed(master, 6).stream);
  CHECK(replication_seed(SimSeed{42, 4}, 0).stream != replication_seed(master, 0).stream);
}

TEST_CASE("Monte Carlo study", "[study]") {
  MCConfig config;
  config.master_seed = SimSeed{7, 0};

  SECTION("a single replication reproduces that fit") {
    config.replications = 1;
    const auto s = run_study(config);
    const auto rep = run_replication(config, 0);
    REQUIRE(s.succeeded == 1);
    REQUIRE(rep.succeeded);
    const auto truth = design_truth(config.design);
    REQUIRE(s.parameters.size() == 5);
    CHECK(s.parameters[0].name == "beta0");
    CHECK(s.parameters[4].name == "alpha");
    CHECK_THAT(s.parameters[0].bias, WithinAbs(rep.fit.theta_hat.beta[0] - truth.beta[0], 1e-15));
    CHECK_THAT(s.parameters[2].rmse, WithinAbs(std::abs(rep.fit.theta_hat.gamma1 - truth.gamma1), 1e-15));
    CHECK_THAT(s.parameters[4].bias, WithinAbs(rep.fit.theta_hat.alpha - truth.alpha, 1e-15));
    REQUIRE(s.cure_rates.size() == 2);
    CHECK_THAT(s.cure_rates[0].bias,
               WithinAbs(cure_rate({1.0, 1.0}, rep.fit.theta_hat) - 0.40, 1e-15));
  }
  SECTION("reproducible regardless of thread count") {
    config.replications = 12;
    config.threads = 1;
    const auto a = run_study(config);
    config.threads = 4;
    const auto b = run_study(config);
    CHECK(a.succeeded + a.failed == a.attempted);
    REQUIRE(a.parameters.size() == b.parameters.size());
    for (std::size_t j = 0; j < a.parameters.size(); ++j) {
      CHECK(a.parameters[j].bias == b.parameters[j].bias);
      CHECK(a.parameters[j].rmse == b.parameters[j].rmse);
      CHECK(a.parameters[j].rmse >= std::abs(a.parameters[j].bias));
    }
    for (std::size_t r = 0; r < a.replications.size(); ++r) {
      CHECK(a.replications[r].index == r);
      CHECK(a.replications[r].fit.loglik == b.replications[r].fit.loglik);
    }
  }
  SECTION("excluded replications do not enter the aggregates") {
    config.replications = 10;
    config.optimizer.k_max = 25;
    const auto s = run_study(config);
    CHECK(s.failed > 0);
    CHECK(s.succeeded > 0);
    std::vector<double> b0;
    for (const auto& rep : s.replications) {
      if (rep.succeeded) b0.push_back(rep.fit.theta_hat.beta[0]);
      else CHECK(rep.failure == "max_iterations");
    }
    CHECK(s.failed == 10 - b0.size());
    if (!b0.empty()) {
      CHECK(s.parameters[0].bias == bias_rmse(b0, design_truth(config.design).beta[0]).bias);
    }
  }
  SECTION("all replications failing is an error") {
    config.replications = 3;
    config.optimizer.k_max = 1;
    config.optimizer.tol = 1e-300;
    CHECK_THROWS_AS(run_study(config), NumericError);
  }
  SECTION("fixed alpha omits the alpha row") {
    config.replications = 2;
    config.variant = ModelVariant::fixed_alpha(1.0);
    BinaryDesign d;
    d.alpha = 1.0;
    config.design = d;
    const auto s = run_study(config);
    REQUIRE(s.parameters.size() == 4);
    CHECK(s.parameters.back().name == "gamma2");
    for (const auto& rep : s.replications) CHECK(rep.fit.theta_hat.alpha == 1.0);
  }
  SECTION("continuous design has no cure-rate rows") {
    config.replications = 2;
    config.design = ContinuousDesign{};
    const auto s = run_study(config);
    CHECK(s.cure_rates.empty());
    CHECK(s.parameters[1].truth == design_truth(config.design).beta[1]);
  }
  SECTION("table layout") {
    config.replications = 3;
    const auto text = format_table(run_study(config));
    CHECK_THAT(text, ContainsSubstring("Parameter"));
    CHECK_THAT(text, ContainsSubstring("Bias"));
    CHECK_THAT(text, ContainsSubstring("RMSE"));
    CHECK_THAT(text, ContainsSubstring("beta0=0.905"));
    CHECK_THAT(text, ContainsSubstring("alpha=0.500"));
    CHECK_THAT(text, ContainsSubstring("p00=0.200"));
    CHECK_THAT(text, ContainsSubstring("3 attempted"));
  }
  SECTION("invalid configuration") {
    config.replications = 0;
    CHECK_THROWS_AS(run_study(config), DomainError);
  }
}
