#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "novlab/errors.hpp"
#include "novlab/grid.hpp"
#include "novlab/multipeakon.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace novlab;

namespace {

// Unfactored reference rates, written straight from the interaction sums:
// dq_i as a full double sum squared, dp_i as the explicit triple sum.
MultipeakonRates brute_rates(const MultipeakonState& s) {
    std::size_t n = s.size();
    MultipeakonRates r;
    r.dq.assign(n, 0.0);
    r.dp.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double ui = 0.0;
        for (std::size_t j = 0; j < n; ++j) ui += s.p[j] * std::exp(-std::abs(s.q[i] - s.q[j]));
        r.dq[i] = ui * ui;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                double d = s.q[i] - s.q[j];
                double sg = (d > 0.0) - (d < 0.0);
                acc += s.p[j] * s.p[k] * sg *
                       std::exp(-std::abs(d) - std::abs(s.q[i] - s.q[k]));
            }
        r.dp[i] = s.p[i] * acc;
    }
    return r;
}

} // namespace

TEST_CASE("single peakon has constant momentum and unit-speed-squared motion") {
    MultipeakonState s;
    s.q = {1.5};
    s.p = {std::sqrt(2.0)};
    MultipeakonRates r = mp_rhs(s);
    CHECK(r.dq[0] == doctest::Approx(2.0).epsilon(1e-15)); // (p e^0)^2 = c
    CHECK(r.dp[0] == 0.0);                                 // sgn(0) = 0 exactly

    MpEvolveConfig cfg;
    cfg.t_end = 10.0;
    MpEvolveResult res = mp_evolve(s, cfg);
    REQUIRE(res.status == MpStatus::ok);
    CHECK(std::abs(res.states.back().q[0] - (1.5 + 20.0)) <= 1e-9);
    CHECK(std::abs(res.states.back().p[0] - std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("rates match the unfactored interaction sums") {
    MultipeakonState s;
    s.q = {-6.2, -1.0, 0.4, 3.3, 9.9};
    s.p = {0.7, -0.25, 1.4, 0.9, -0.1};
    MultipeakonRates fast = mp_rhs(s);
    MultipeakonRates ref = brute_rates(s);
    double scale = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        scale = std::max({scale, std::abs(ref.dq[i]), std::abs(ref.dp[i])});
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(fast.dq[i] - ref.dq[i]) <= 1e-12 * scale);
        CHECK(std::abs(fast.dp[i] - ref.dp[i]) <= 1e-12 * scale);
    }
}

TEST_CASE("rates are equivariant under the mirror map") {
    // q -> -reverse(q), p -> reverse(p) flips position rates and keeps
    // amplitude rates reversed-negated; this drives exact time reversal.
    MultipeakonState s;
    s.q = {-4.0, 0.5, 2.0};
    s.p = {1.1, 0.8, 0.6};
    MultipeakonState m;
    m.q = {-2.0, -0.5, 4.0};
    m.p = {0.6, 0.8, 1.1};
    MultipeakonRates rs = mp_rhs(s);
    MultipeakonRates rm = mp_rhs(m);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(rm.dq[i] == doctest::Approx(rs.dq[2 - i]).epsilon(1e-14));
        CHECK(rm.dp[i] == doctest::Approx(-rs.dp[2 - i]).epsilon(1e-14));
    }
}

TEST_CASE("two-peakon exchange conserves the closed-form energy") {
    MultipeakonState s0;
    s0.q = {-5.0, 5.0};
    s0.p = {1.2, 0.8};
    MpEvolveConfig cfg;
    cfg.t_end = 10.0;
    cfg.rtol = 1e-10;
    cfg.sample_every = 0.25;
    MpEvolveResult res = mp_evolve(s0, cfg);
    REQUIRE(res.status == MpStatus::ok);
    double e0 = mp_energy(s0);
    for (const auto& st : res.states) {
        CHECK(std::abs(mp_energy(st) - e0) / e0 <= 1e-8);
        REQUIRE(st.q.size() == 2);
        CHECK(st.q[0] < st.q[1]); // no crossing: fast peak swaps amplitude instead
        CHECK(st.p[0] > 0.0);
        CHECK(st.p[1] > 0.0);
    }
    // the interaction is underway by t=10: amplitude is flowing from the
    // chasing peak to the leading one (measured 1.2 -> 1.067, 0.8 -> 0.902)
    CHECK(res.states.back().p[0] < 1.15);
    CHECK(res.states.back().p[1] > 0.85);

    // halved tolerance changes the endpoint by less than the drift budget
    MpEvolveConfig tight = cfg;
    tight.rtol = 1e-11;
    tight.sample_every = 0.0;
    MpEvolveResult res2 = mp_evolve(s0, tight);
    REQUIRE(res2.status == MpStatus::ok);
    CHECK(std::abs(res2.states.back().q[0] - res.states.back().q[0]) <= 1e-7);
    CHECK(std::abs(res2.states.back().q[1] - res.states.back().q[1]) <= 1e-7);
}

TEST_CASE("mirror evolution runs the exchange backwards") {
    MultipeakonState s0;
    s0.q = {-5.0, 5.0};
    s0.p = {1.2, 0.8};
    MpEvolveConfig cfg;
    cfg.t_end = 5.0;
    cfg.rtol = 1e-10;
    MpEvolveResult fwd = mp_evolve(s0, cfg);
    REQUIRE(fwd.status == MpStatus::ok);

    const MultipeakonState& end = fwd.states.back();
    MultipeakonState mirrored;
    std::size_t n = end.size();
    mirrored.q.resize(n);
    mirrored.p.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        mirrored.q[i] = -end.q[n - 1 - i];
        mirrored.p[i] = end.p[n - 1 - i];
    }
    MpEvolveResult back = mp_evolve(mirrored, cfg);
    REQUIRE(back.status == MpStatus::ok);
    const MultipeakonState& ret = back.states.back();
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(-ret.q[n - 1 - i] - s0.q[i]) <= 1e-7); // measured 1.7e-11
        CHECK(std::abs(ret.p[n - 1 - i] - s0.p[i]) <= 1e-7);
    }
}

TEST_CASE("mixed-sign pair halts with a collision signal") {
    MultipeakonState s0;
    s0.q = {-3.0, 1.0};
    s0.p = {1.0, -0.3};
    MpEvolveConfig cfg;
    cfg.t_end = 10.0;
    MpEvolveResult res = mp_evolve(s0, cfg);
    CHECK(res.status == MpStatus::collision);
    CHECK(res.stop_time > 5.0); // measured 5.43
    CHECK(res.stop_time < 6.0);
    CHECK_FALSE(res.message.empty());
    const MultipeakonState& last = res.states.back();
    CHECK(last.q[1] - last.q[0] <= 1e-3); // stopped on the gap floor
    CHECK(last.q[1] > last.q[0]);
}

TEST_CASE("ordering persists for positive amplitudes") {
    MultipeakonState s0;
    s0.q = {-6.0, -1.0, 4.0};
    s0.p = {1.5, 1.0, 0.5};
    MpEvolveConfig cfg;
    cfg.t_end = 5.0;
    cfg.sample_every = 0.1;
    MpEvolveResult res = mp_evolve(s0, cfg);
    REQUIRE(res.status == MpStatus::ok);
    for (const auto& st : res.states) {
        CHECK(std::is_sorted(st.q.begin(), st.q.end()));
        CHECK(st.q[1] - st.q[0] > 0.0);
        CHECK(st.q[2] - st.q[1] > 0.0);
    }
}

TEST_CASE("dense sampling lands on the requested cadence") {
    MultipeakonState s0;
    s0.q = {-5.0, 5.0};
    s0.p = {1.2, 0.8};
    MpEvolveConfig cfg;
    cfg.t_end = 3.0;
    cfg.sample_every = 0.5;
    MpEvolveResult res = mp_evolve(s0, cfg);
    REQUIRE(res.status == MpStatus::ok);
    REQUIRE(res.states.size() == 7);
    for (std::size_t k = 0; k < res.states.size(); ++k)
        CHECK(std::abs(res.states[k].t - 0.5 * static_cast<double>(k)) <= 1e-9);
}

TEST_CASE("closed-form energy matches its limits") {
    MultipeakonState single;
    single.q = {0.0};
    single.p = {std::sqrt(3.0)};
    CHECK(mp_energy(single) == doctest::Approx(6.0).epsilon(1e-14)); // 2c

    // far-separated pair: energies add up to an e^{-separation} correction
    MultipeakonState pair;
    pair.q = {-10.0, 10.0};
    pair.p = {1.0, 0.7};
    double expect = 2.0 * (1.0 + 0.49);
    CHECK(std::abs(mp_energy(pair) - expect) <= 4.0 * 1.0 * 0.7 * std::exp(-20.0) + 1e-12);

    // discrete H1 norm of the synthesized field approaches it; the crest
    // kinks keep the gap first order in dx
    Grid g = make_grid(-30.0, 0.05, 1201);
    MultipeakonState near;
    near.q = {-2.0, 3.0};
    near.p = {1.0, 0.8};
    Norms nn = norms(mp_field(near, g));
    CHECK(std::abs(nn.h1 * nn.h1 - mp_energy(near)) <= 0.2); // measured 0.095
}

TEST_CASE("field synthesis matches the superposition builder") {
    Grid g = make_grid(-30.0, 0.05, 1201);
    MultipeakonState s;
    s.q = {-4.5, 0.25, 6.0};
    s.p = {0.4, 1.3, 0.9};
    Field a = mp_field(s, g);
    Field b = multipeakon_field(s.q, s.p, g);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("trajectory export writes one row per state") {
    MultipeakonState s0;
    s0.q = {-5.0, 5.0};
    s0.p = {1.2, 0.8};
    MpEvolveConfig cfg;
    cfg.t_end = 1.0;
    cfg.sample_every = 0.25;
    MpEvolveResult res = mp_evolve(s0, cfg);
    REQUIRE(res.status == MpStatus::ok);
    auto path = (std::filesystem::temp_directory_path() / "novlab_traj.csv").string();
    write_trajectory_csv(res.states, path);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line.find("t,") == 0);
    std::size_t rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == res.states.size());
    std::filesystem::remove(path);
}

TEST_CASE("solver rejects malformed states") {
    MultipeakonState bad;
    bad.q = {1.0, 0.0};
    bad.p = {1.0, 1.0};
    MpEvolveConfig cfg;
    CHECK_THROWS_AS(mp_evolve(bad, cfg), PreconditionError);

    MultipeakonState empty;
    CHECK_THROWS_AS(mp_evolve(empty, cfg), InvalidParameter);

    MultipeakonState mismatched;
    mismatched.q = {0.0, 1.0};
    mismatched.p = {1.0};
    CHECK_THROWS_AS(mp_evolve(mismatched, cfg), InvalidParameter);
}
