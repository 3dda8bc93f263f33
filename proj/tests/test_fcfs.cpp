#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aoiss/fcfs.hpp"
#include "aoiss/offline.hpp"
#include "aoiss/rng.hpp"

using namespace aoiss;

namespace {

Instance make_instance(std::vector<std::pair<Time, Bits>> pkts, Time D, Time T,
                       Time initial_aoi = 0.0, Time eps = 1e-3) {
    Instance inst;
    inst.D = D;
    inst.T = T;
    inst.initial_aoi = initial_aoi;
    inst.epsilon = eps;
    int id = 0;
    for (auto [t, w] : pkts) inst.packets.push_back({id++, t, w});
    return inst;
}

Instance two_packet_instance() {
    return make_instance({{0.0, 1.0}, {0.5, 1.0}}, 2.0, 2.4);
}

}  // namespace

TEST_CASE("fcfs deadlines shift by one generation") {
    auto inst = make_instance({{0.0, 1.0}, {0.5, 1.0}, {1.2, 1.0}}, 2.0, 3.0, 0.5);
    const auto dls = fcfs_deadlines(inst);
    REQUIRE(dls.size() == 3);
    CHECK(dls[0] == doctest::Approx(1.5));  // D - initial aoi
    CHECK(dls[1] == doctest::Approx(2.0));  // t_1 + D
    CHECK(dls[2] == doctest::Approx(2.5));  // t_2 + D
}

TEST_CASE("fcfs_speed density examples") {
    FcfsState st;
    CHECK(fcfs_speed(st, 1.0) == 0.0);

    st.remaining = {{0, 1.0}};
    st.deadlines = {{0, 2.0}};
    CHECK(fcfs_speed(st, 0.0) == doctest::Approx(0.5));

    st.remaining = {{0, 0.75}, {1, 1.0}};
    st.deadlines = {{0, 2.0}, {1, 2.0}};
    CHECK(fcfs_speed(st, 0.5) == doctest::Approx(7.0 / 6.0));

    st.deadlines[1] = 0.4;
    CHECK_THROWS(fcfs_speed(st, 0.5));
}

TEST_CASE("single packet runs at constant density") {
    auto inst = make_instance({{0.0, 1.0}}, 2.0, 1.9);
    const auto poly2 = PowerFunction::polynomial(2.0);
    const auto run = run_fcfs(inst, poly2);
    REQUIRE(run.schedule.size() == 1);
    CHECK(run.schedule[0].speed == doctest::Approx(0.5));
    CHECK(run.energy == doctest::Approx(segment_energy(poly2, 1.0, 2.0)));
}

TEST_CASE("two-packet run recomputes speed at the generation") {
    const auto poly2 = PowerFunction::polynomial(2.0);
    const auto run = run_fcfs(two_packet_instance(), poly2);
    // [0, 0.5) at 0.5, then 7/6 through both deliveries
    REQUIRE(run.schedule.size() >= 2);
    CHECK(run.schedule[0].speed == doctest::Approx(0.5));
    CHECK(run.schedule[0].end == doctest::Approx(0.5));
    for (size_t i = 1; i < run.schedule.size(); ++i)
        CHECK(run.schedule[i].speed == doctest::Approx(7.0 / 6.0));
    CHECK(run.energy == doctest::Approx(13.0 / 6.0).epsilon(1e-8));
    // delivery order equals generation order
    REQUIRE(run.deliveries.size() == 2);
    CHECK(run.deliveries[0].packet_id == 0);
    CHECK(run.deliveries[1].packet_id == 1);
}

TEST_CASE("two-packet online/offline ratio stays within alpha^alpha") {
    const auto poly2 = PowerFunction::polynomial(2.0);
    const auto run = run_fcfs(two_packet_instance(), poly2);
    const Energy off = grid_oracle_fcfs(two_packet_instance(), poly2, 4000);
    CHECK(off == doctest::Approx(2.0).epsilon(0.01));  // constant speed 1 on [0, 2)
    CHECK(run.energy <= 4.0 * off);
    CHECK(run.energy / off == doctest::Approx(13.0 / 12.0).epsilon(0.01));
}

TEST_CASE("all deadlines met on random instances, FCFS order, event-aligned speeds") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Rng rng(seed);
        Instance inst;
        inst.D = 3.0;
        inst.epsilon = 0.05;
        const int n = 2 + static_cast<int>(rng.next_u64() % 6);
        Time t = 0.0;
        for (int i = 0; i < n; ++i) {
            t += rng.uniform(0.3, 2.8);
            inst.packets.push_back({i, t, rng.uniform(0.3, 2.0)});
        }
        inst.T = t + rng.uniform(0.5, 2.0);
        if (!validate_instance(inst).ok()) continue;

        const auto run = run_fcfs(inst, PowerFunction::polynomial(2.0));
        const auto dls = fcfs_deadlines(inst);
        REQUIRE(run.deliveries.size() == inst.packets.size());
        Time prev = -1.0;
        for (size_t i = 0; i < run.deliveries.size(); ++i) {
            CHECK(run.deliveries[i].packet_id == static_cast<int>(i));
            CHECK(run.deliveries[i].time <= dls[i] - 0.5 * inst.feas_tol());
            CHECK(run.deliveries[i].time > prev);
            prev = run.deliveries[i].time;
        }
        // speed changes only at events (generations or completions)
        std::vector<Time> events;
        for (const Packet& p : inst.packets) events.push_back(p.gen_time);
        for (const auto& d : run.deliveries) events.push_back(d.time);
        for (size_t i = 1; i < run.schedule.size(); ++i) {
            const Segment& a = run.schedule[i - 1];
            const Segment& b = run.schedule[i];
            if (std::abs(a.end - b.start) > 1e-12) continue;  // idle gap in between
            if (std::abs(a.speed - b.speed) < 1e-12 && a.packet_id == b.packet_id) continue;
            bool at_event = false;
            for (Time e : events)
                if (std::abs(e - b.start) <= 1e-9) at_event = true;
            CHECK(at_event);
        }
    }
}

TEST_CASE("fcfs energy never beats the deliver-all oracle") {
    for (std::uint64_t seed = 50; seed < 70; ++seed) {
        Rng rng(seed);
        Instance inst;
        inst.D = 3.0;
        inst.epsilon = 0.05;
        Time t = 0.0;
        for (int i = 0; i < 4; ++i) {
            t += rng.uniform(0.4, 2.6);
            inst.packets.push_back({i, t, rng.uniform(0.4, 1.5)});
        }
        inst.T = t + 1.0;
        if (!validate_instance(inst).ok()) continue;
        const auto poly2 = PowerFunction::polynomial(2.0);
        const auto run = run_fcfs(inst, poly2);
        const Energy oracle = grid_oracle_fcfs(inst, poly2, 2000);
        CHECK(run.energy >= oracle * (1.0 - 0.02));  // oracle is grid-coarse
        CHECK(run.energy <= 4.0 * oracle);
    }
}
