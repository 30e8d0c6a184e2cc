#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "epictrl/economy.hpp"
#include "epictrl/env.hpp"
#include "epictrl/errors.hpp"
#include "epictrl/rng.hpp"

using namespace epictrl;

namespace {

// Adaptive-oracle day-one states (tests/oracles/seird_oracle.py); the lockdown
// row uses the 0.30 transmission multiplier of the default table.
const Compartments kOracleNone{922.284494217534, 4.872696912970, 69.646745837626, 2.571249422261,
                               0.624813609609};
const Compartments kOracleLockdown{927.702241462734, 1.448245047393, 67.686046084165,
                                   2.545026070562, 0.618441335146};

void check_newest(const Observation& o, const Compartments& c, double tol)
{
    const auto row = o.row(kWindowDays - 1);
    CHECK(std::abs(row[0] - c.s / 1000) <= tol);
    CHECK(std::abs(row[1] - c.e / 1000) <= tol);
    CHECK(std::abs(row[2] - c.i / 1000) <= tol);
    CHECK(std::abs(row[3] - c.r / 1000) <= tol);
    CHECK(std::abs(row[4] - c.d / 1000) <= tol);
}

} // namespace

TEST_CASE("reset repeats the day-zero row")
{
    EpidemicEnv env(EnvConfig{});
    const Observation o = env.reset();
    const double expected[kFeatureCount] = {0.93, 0.0, 0.07, 0.0, 0.0, 0.93, 0.0};
    for (std::size_t t = 0; t < kWindowDays; ++t)
        for (std::size_t f = 0; f < kFeatureCount; ++f)
            CHECK(o.at(t, f) == doctest::Approx(expected[f]).epsilon(1e-15));
    CHECK(env.reset() == o);
    CHECK(env.trajectory().size() == 1);
    CHECK(env.trajectory().days[0].economy == 930.0);
}

TEST_CASE("first step against the oracle")
{
    EpidemicEnv env(EnvConfig{});
    const auto r = env.step(Restriction::NoRestriction);
    check_newest(r.observation, kOracleNone, 1e-9);
    CHECK(r.info.day == 1);
    CHECK_FALSE(r.done);

    const auto& s = r.info.state;
    const double econ = (s.s + s.e + s.r) / 1000;
    CHECK(r.observation.at(kWindowDays - 1, 5) == econ);
    CHECK(r.observation.at(kWindowDays - 1, 6) == 0.0);
    const double expected = econ * std::exp(-10.0 * s.i / 1000) - 7.0 * s.d / 1000;
    CHECK(r.reward == doctest::Approx(expected).epsilon(1e-14));

    env.reset();
    const auto l = env.step(Restriction::Lockdown);
    check_newest(l.observation, kOracleLockdown, 1e-9);
    const auto& ls = l.info.state;
    CHECK(l.observation.at(kWindowDays - 1, 5) == (ls.s + ls.e + ls.r) * 0.5 / 1000);
    CHECK(l.observation.at(kWindowDays - 1, 6) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("window shifts by one row per step")
{
    EpidemicEnv env(EnvConfig{});
    Observation prev = env.observation();
    Rng rng(3);
    for (int k = 0; k < 60; ++k) {
        const auto r = env.step(restriction_from_code(static_cast<int>(rng.below(4))));
        for (std::size_t t = 0; t + 1 < kWindowDays; ++t)
            for (std::size_t f = 0; f < kFeatureCount; ++f)
                CHECK(r.observation.at(t, f) == prev.at(t + 1, f));
        double sum = 0.0;
        for (std::size_t f = 0; f < 5; ++f)
            sum += r.observation.at(kWindowDays - 1, f);
        CHECK(std::abs(sum - 1.0) <= 1e-6);
        prev = r.observation;
    }
}

TEST_CASE("episodes end and stay ended")
{
    EnvConfig cfg;
    cfg.sim.max_days = 40;
    EpidemicEnv env(cfg);
    int steps = 0;
    while (!env.done()) {
        env.step(Restriction::SocialDistancing);
        ++steps;
    }
    CHECK(steps == 40);
    CHECK_THROWS_AS(env.step(Restriction::NoRestriction), EpisodeFinished);

    EnvConfig empty;
    empty.initial_infected_fraction = 0.0;
    EpidemicEnv idle(empty);
    CHECK(idle.step(Restriction::Lockdown).done);

    EpidemicEnv full(EnvConfig{});
    while (!full.done())
        full.step(Restriction::NoRestriction);
    CHECK(full.current_state().i < 1.0);
    CHECK(full.day() <= EnvConfig{}.sim.max_days);
}

TEST_CASE("replaying actions reproduces rewards exactly")
{
    EpidemicEnv env(EnvConfig{});
    Rng rng(17);
    std::vector<Restriction> actions;
    std::vector<double> rewards;
    while (!env.done()) {
        actions.push_back(restriction_from_code(static_cast<int>(rng.below(4))));
        rewards.push_back(env.step(actions.back()).reward);
    }
    env.reset();
    for (std::size_t k = 0; k < actions.size(); ++k)
        CHECK(env.step(actions[k]).reward == rewards[k]);
    CHECK(env.done());
}

TEST_CASE("invalid configs are rejected")
{
    EnvConfig cfg;
    cfg.initial_infected_fraction = 1.5;
    CHECK_THROWS_AS(EpidemicEnv{cfg}, ConfigInvalid);
    cfg = EnvConfig{};
    cfg.sim.max_days = 0;
    CHECK_THROWS_AS(EpidemicEnv{cfg}, ConfigInvalid);
    cfg = EnvConfig{};
    cfg.weights.r = -1;
    CHECK_THROWS_AS(EpidemicEnv{cfg}, ConfigInvalid);
}
