#pragma once

#include <map>
#include <vector>

#include "aoiss/model.hpp"

namespace aoiss {

/// Online state of the deliver-all FCFS scaler: remaining bits and the
/// per-packet deadline t_{i-1} + D (D - initial_aoi for the first packet).
struct FcfsState {
    Time now = 0.0;
    std::map<int, Bits> remaining;   // pending packet id -> bits left
    std::map<int, Time> deadlines;   // pending packet id -> deadline
};

/// Maximum density over pending deadlines: max_d (bits due by d) / (d - t).
/// Returns 0 when nothing is pending; throws if a pending deadline has
/// already passed.
Speed fcfs_speed(const FcfsState& state, Time t);

struct FcfsRun {
    Schedule schedule;
    std::vector<Delivery> deliveries;  // in generation order
    Energy energy = 0.0;
};

/// Deliver-all FCFS policy: between events (generations, completions) the
/// earliest-deadline pending packet is served at the density speed, which
/// is recomputed at every event.
FcfsRun run_fcfs(const Instance& inst, const PowerFunction& p);

/// Deadline assigned to packet i: gen time of packet i-1 plus D.
std::vector<Time> fcfs_deadlines(const Instance& inst);

}  // namespace aoiss
