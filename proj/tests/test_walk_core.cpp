#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>

#include "rrmdqw/ensemble.hpp"
#include "rrmdqw/oracle.hpp"
#include "rrmdqw/policy.hpp"
#include "rrmdqw/walk.hpp"

using namespace rrmdqw;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752;

WalkerState stepped(int n_steps, std::optional<int> x_det = std::nullopt) {
    WalkerState st(0, symmetric_coin(), n_steps + 2);
    for (int k = 0; k < n_steps; ++k) st.step(x_det);
    return st;
}

}  // namespace

TEST_CASE("initial state is a delta at the origin with survival 1") {
    WalkerState st(0, symmetric_coin(), 100);
    CHECK(st.occupation(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(st.survival() == doctest::Approx(1.0).epsilon(1e-14));
    for (int x = -10; x <= 10; ++x)
        if (x != 0) CHECK(st.occupation(x) == 0.0);

    WalkerState off(5, symmetric_coin(), 10);
    CHECK(off.occupation(5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(off.time() == 0);
}

TEST_CASE("a chiral coin leaves the other component empty") {
    WalkerState st(0, Spinor{Amplitude{1.0, 0.0}, Amplitude{0.0, 0.0}}, 4);
    CHECK(st.spinor(0).right == Amplitude{0.0, 0.0});
    CHECK(st.spinor(0).left == Amplitude{1.0, 0.0});
}

TEST_CASE("a non-normalized coin is rejected") {
    CHECK_THROWS_AS(WalkerState(0, Spinor{Amplitude{1.0, 0.0}, Amplitude{1.0, 0.0}}, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(WalkerState(0, Spinor{}, 4), std::invalid_argument);
}

TEST_CASE("coin_step realizes the Hadamard columns") {
    WalkerState l(0, Spinor{Amplitude{1.0, 0.0}, Amplitude{0.0, 0.0}}, 4);
    l.coin_step();
    CHECK(l.spinor(0).left.real() == doctest::Approx(kInvSqrt2).epsilon(1e-15));
    CHECK(l.spinor(0).right.real() == doctest::Approx(kInvSqrt2).epsilon(1e-15));

    WalkerState r(0, Spinor{Amplitude{0.0, 0.0}, Amplitude{1.0, 0.0}}, 4);
    r.coin_step();
    CHECK(r.spinor(0).left.real() == doctest::Approx(kInvSqrt2).epsilon(1e-15));
    CHECK(r.spinor(0).right.real() == doctest::Approx(-kInvSqrt2).epsilon(1e-15));
}

TEST_CASE("coin_step is an involution") {
    WalkerState st = stepped(9);
    WalkerState twice = st;
    twice.coin_step();
    twice.coin_step();
    for (int x = st.active_lo(); x <= st.active_hi(); ++x) {
        CHECK(std::abs(twice.spinor(x).left - st.spinor(x).left) < 1e-14);
        CHECK(std::abs(twice.spinor(x).right - st.spinor(x).right) < 1e-14);
    }
}

TEST_CASE("shift_step moves chirality components in opposite directions") {
    WalkerState st(0, Spinor{Amplitude{0.6, 0.0}, Amplitude{0.0, 0.8}}, 4);
    st.shift_step();
    CHECK(st.spinor(-1).left == Amplitude{0.6, 0.0});
    CHECK(st.spinor(1).right == Amplitude{0.0, 0.8});
    CHECK(st.spinor(0).occupation() == 0.0);
    CHECK(st.time() == 1);
}

TEST_CASE("shift_step preserves the norm of a generic state to 1e-14") {
    WalkerState st = stepped(11);
    const double before = st.survival();
    st.coin_step();
    st.shift_step();
    CHECK(st.survival() == doctest::Approx(before).epsilon(1e-14));
}

TEST_CASE("shift of the zero state stays zero") {
    WalkerState st(0, symmetric_coin(), 6);
    st.absorb(0);  // removes everything
    st.shift_step();
    CHECK(st.survival() == 0.0);
}

TEST_CASE("absorb: absent detector is a no-op") {
    WalkerState st = stepped(3);
    const double before = st.survival();
    const StepOutcome out = st.absorb(std::nullopt);
    CHECK(out.removed_probability == 0.0);
    CHECK(!out.detection_event);
    CHECK(st.survival() == before);
}

TEST_CASE("absorb after one symmetric step removes exactly 1/2 at +1") {
    WalkerState st(0, symmetric_coin(), 4);
    st.unitary_step();
    const StepOutcome out = st.absorb(1);
    CHECK(out.removed_probability == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(out.detection_event);
    CHECK(st.survival() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(st.cumulative_removed() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("absorb outside the light cone removes nothing") {
    WalkerState st(0, symmetric_coin(), 60);
    for (int k = 0; k < 3; ++k) st.step(std::nullopt);
    const StepOutcome out = st.absorb(50);  // inside the lattice, outside |x| <= 3
    CHECK(out.removed_probability == 0.0);
    CHECK(!out.detection_event);
}

TEST_CASE("absorb outside the lattice window is a caller error") {
    WalkerState st = stepped(3);
    CHECK_THROWS_AS(st.absorb(100000), std::out_of_range);
}

TEST_CASE("one and two free steps match the hand enumeration") {
    WalkerState st1 = stepped(1);
    CHECK(st1.occupation(-1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(st1.occupation(1) == doctest::Approx(0.5).epsilon(1e-14));

    WalkerState st2 = stepped(2);
    CHECK(st2.occupation(-2) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(st2.occupation(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(st2.occupation(2) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("fixed detector at +1 halves survival after one step") {
    WalkerState st = stepped(1, 1);
    CHECK(st.survival() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("occupation_profile sums to survival") {
    WalkerState free2 = stepped(2);
    CHECK(free2.occupation_profile().sum() == doctest::Approx(1.0).epsilon(1e-12));

    WalkerState siw = stepped(1, 1);
    CHECK(siw.occupation_profile().sum() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(siw.occupation_profile().sum() == doctest::Approx(siw.survival()).epsilon(1e-14));
}

TEST_CASE("unitarity: free survival stays 1 to 1e-10 out to t = 300") {
    WalkerState st(0, symmetric_coin(), 300);
    for (int t = 1; t <= 300; ++t) {
        st.step(std::nullopt);
        CHECK(std::abs(st.survival() - 1.0) < 1e-10);
    }
}

TEST_CASE("survival is monotone non-increasing under any detector sequence") {
    RngStream rng(99, 0);
    WalkerState st(0, symmetric_coin(), 200);
    double prev = 1.0;
    for (int t = 1; t <= 200; ++t) {
        std::optional<int> det;
        if (rng.uniform_below(3) != 0) det = static_cast<int>(rng.uniform_int(-40, 40));
        st.step(det);
        const double s = st.survival();
        CHECK(s <= prev + 1e-14);
        prev = s;
    }
}

TEST_CASE("parity and light cone hold exactly") {
    RngStream rng(7, 1);
    WalkerState st(0, symmetric_coin(), 64);
    for (int t = 1; t <= 64; ++t) {
        std::optional<int> det;
        if (rng.uniform_below(2) == 0) det = static_cast<int>(rng.uniform_int(1, 30));
        st.step(det);
        for (int x = st.x_min(); x <= st.x_max(); ++x) {
            const bool outside = std::abs(x) > t;
            const bool odd = ((x + t) % 2 + 2) % 2 == 1;
            if (outside || odd) CHECK(st.occupation(x) == 0.0);
        }
    }
}

TEST_CASE("boundary contact is a hard error") {
    WalkerState st(0, symmetric_coin(), 0);  // window is [-2, 2]
    st.step(std::nullopt);
    st.step(std::nullopt);
    CHECK_THROWS_AS(st.step(std::nullopt), std::runtime_error);
}

TEST_CASE("engine matches the path-sum oracle on random fixed trajectories") {
    RngStream rng(2024, 5);
    double worst = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const int t = 3 + static_cast<int>(rng.uniform_below(12));  // 3..14
        std::vector<std::optional<int>> traj(static_cast<size_t>(t));
        for (auto& d : traj)
            if (rng.uniform_below(4) != 0) d = static_cast<int>(rng.uniform_int(-t, t));

        WalkerState st(0, symmetric_coin(), t);
        for (int k = 0; k < t; ++k) st.step(traj[static_cast<size_t>(k)]);

        const Profile exact = oracle::oracle_profile(0, symmetric_coin(), traj, t);
        worst = std::max(worst, oracle::compare(st.occupation_profile(), exact));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("per-site norm is preserved by the coin to 1e-14") {
    WalkerState st = stepped(10);
    std::vector<double> before;
    for (int x = st.active_lo(); x <= st.active_hi(); ++x) before.push_back(st.occupation(x));
    st.coin_step();
    size_t i = 0;
    for (int x = st.active_lo(); x <= st.active_hi(); ++x)
        CHECK(st.occupation(x) == doctest::Approx(before[i++]).epsilon(1e-14));
}
