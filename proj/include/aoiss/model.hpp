#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aoiss/power.hpp"

namespace aoiss {

struct Packet {
    int id = 0;
    Time gen_time = 0.0;
    Bits size = 0.0;
};

/// One problem instance: a generation trace plus the peak-age budget D,
/// horizon T, initial age and the feasibility margin epsilon.
struct Instance {
    std::vector<Packet> packets;  // strictly increasing gen_time
    Time D = 0.0;
    Time T = 0.0;
    Time initial_aoi = 0.0;
    Time epsilon = 1e-3;

    // Initial age is modelled as a virtual delivery of a packet generated
    // at -initial_aoi, so the age is t - mu(t) from t = 0 on.
    Time mu0() const { return -initial_aoi; }
    Time initial_deadline() const { return D - initial_aoi; }

    // Default absolute slack used wherever strict inequalities of the
    // age process have to be decided numerically.
    Time feas_tol() const { return 1e-12 * D; }

    const Packet& packet(int id) const { return packets.at(static_cast<size_t>(id)); }
};

struct ValidationReport {
    std::vector<std::string> problems;
    bool ok() const { return problems.empty(); }
    std::string to_string() const;
};

/// Checks the structural invariants and the bounded-gap feasibility
/// conditions, then walks the generation trace to confirm a feasible
/// schedule exists at all. Report style: every violation is listed.
ValidationReport validate_instance(const Instance& inst);

struct Delivery {
    Time time = 0.0;
    Time gen_time = 0.0;
    int packet_id = -1;
};

/// Piecewise description of the age process induced by a delivery sequence:
/// age(t) = t - mu(t) where mu(t) is the generation time of the freshest
/// packet delivered at or before t (mu0 before the first delivery).
struct AoiTrajectory {
    std::vector<Delivery> deliveries;  // fresh deliveries only, increasing in time
    Time mu0 = 0.0;
    Time D = 0.0;

    Time mu_at(Time t) const;
    Time aoi_at(Time t) const { return t - mu_at(t); }
};

/// Deadline process d(t) = mu(t) + D, the latest instant by which the next
/// fresh delivery must happen.
Time deadline_at(const AoiTrajectory& traj, Time t);

using Schedule = std::vector<Segment>;

/// Checks schedule well-formedness against an instance: disjoint segments,
/// positive speeds, no transmission before generation, no packet delivered
/// more than its size.
ValidationReport validate_schedule(const Instance& inst, const Schedule& sched);

struct TrajectoryBuild {
    AoiTrajectory trajectory;
    std::vector<Delivery> redundant;  // completed but stale at delivery time
    std::vector<int> incomplete;      // partially transmitted packets (bits wasted)
};

/// Derives the delivery sequence from a schedule. A packet is delivered at
/// the end of its last segment once all of its bits are in; stale deliveries
/// are kept aside and do not move mu.
TrajectoryBuild trajectory_from_schedule(const Instance& inst, const Schedule& sched);

struct FeasibilityResult {
    bool feasible = true;
    std::optional<Time> violation_time;  // where age first reaches D
};

/// True iff age stays below D over [0, T]. The age process is piecewise
/// linear with slope one, so suprema are checked just before deliveries and
/// at T; strictness is decided with absolute slack tol (default 1e-12 * D).
FeasibilityResult check_feasible(const Instance& inst, const Schedule& sched, Time tol = -1.0);
FeasibilityResult check_feasible(const Instance& inst, const AoiTrajectory& traj, Time tol = -1.0);

/// Packets generated at or before t, undelivered, with gen_time > mu(t).
/// While mu still has its initial value, a packet generated exactly at mu0
/// counts as fresh; afterwards staleness is strict.
std::vector<int> fresh_packets(const Instance& inst, const AoiTrajectory& traj, Time t);

}  // namespace aoiss
