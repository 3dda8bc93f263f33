#pragma once

#include <vector>

#include "aoiss/model.hpp"

namespace aoiss {

struct GreedyOptions {
    // Algorithm gate is d(t) <= T; set true for the strict d(t) < T variant.
    bool strict_horizon_gate = false;
    // Speed floor numerator: floor = floor_factor * size / D. The canonical
    // policy uses 3; 2 reproduces the known blow-up and exists for tests.
    double floor_factor = 3.0;
};

/// Speed rule for a packet of size w started at time t with current
/// deadline d: max(w / (d - t), 3 w / D).
Speed greedy_speed(Bits w, Time D, Time deadline, Time t, double floor_factor = 3.0);

struct GreedyRun {
    Schedule schedule;
    AoiTrajectory trajectory;
    Energy energy = 0.0;  // filled by run_greedy when a power function is supplied
};

/// Event-driven, non-preemptive greedy policy: whenever the node is idle,
/// the deadline is within the horizon and a fresh packet exists, transmit
/// the latest fresh packet at greedy_speed until done. Simultaneous events
/// are processed completion, then generation, then decision.
GreedyRun run_greedy(const Instance& inst, const GreedyOptions& opts = {});
GreedyRun run_greedy(const Instance& inst, const PowerFunction& p, const GreedyOptions& opts = {});

}  // namespace aoiss
