#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoiss/model.hpp"

namespace aoiss {

struct Interval {
    Time begin = 0.0;
    Time end = 0.0;
    Time length() const { return end - begin; }
};

/// Structure of an optimal schedule: the transmitted subsequence, the
/// frames [d_{k-1}, d_k) that partition [0, T], and the length-D periods
/// [t_k, t_k + D) anchored at transmitted generations.
struct FrameDecomposition {
    std::vector<int> chosen;         // packet ids, ascending generation time
    std::vector<Time> deadlines;     // d_0 = D - initial_aoi, then t_k + D
    std::vector<Interval> frames;    // frames.size() == chosen.size() + 1
    std::vector<Interval> periods;   // one per chosen packet
};

struct OfflineOptions {
    int max_enum_packets = 14;      // refuse enumeration beyond this
    double descent_tol_rel = 1e-9;  // coordinate-sweep stop, relative to D
    int max_sweeps = 400;
};

struct OfflineResult {
    Schedule schedule;
    FrameDecomposition decomp;
    Energy energy = 0.0;
};

struct CapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleInstance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimum-energy feasible schedule: enumerates candidate transmitted
/// subsequences (pruned by the deadline-chaining condition), optimizes the
/// delivery times of each candidate by projected coordinate descent with
/// golden-section line searches, and returns the cheapest. Start times
/// follow r_k = max(t_k, tau_{k-1}); windows only ever shrink by idling, so
/// idling before a chosen packet is never optimal.
OfflineResult solve_offline(const Instance& inst, const PowerFunction& p,
                            const OfflineOptions& opts = {});

/// Convex timing subproblem for a fixed transmitted subsequence. taus must
/// hold a feasible initialization; returns the optimized energy. Used by
/// solve_offline and by restart-invariance checks.
Energy optimize_delivery_times(const Instance& inst, const PowerFunction& p,
                               const std::vector<int>& chosen, std::vector<Time>& taus,
                               const OfflineOptions& opts = {});

/// Feasible random initialization of delivery times for a subsequence, for
/// restart checks. Returns nullopt if the subsequence cannot be scheduled.
std::optional<std::vector<Time>> random_feasible_taus(const Instance& inst,
                                                      const std::vector<int>& chosen,
                                                      std::uint64_t seed);

/// Brute-force benchmark independent of the solver: delivery times snapped
/// to a uniform grid of grid_n steps over [0, T], subsequence choice by
/// dynamic programming, constant speed per packet. Converges to the exact
/// optimum from above as grid_n grows.
Energy grid_oracle(const Instance& inst, const PowerFunction& p, int grid_n);

/// Same grid search for the deliver-all FCFS variant (every packet must be
/// delivered, in order, by its deadline t_{i-1} + D).
Energy grid_oracle_fcfs(const Instance& inst, const PowerFunction& p, int grid_n);

struct StructureReport {
    std::vector<std::string> violations;
    bool prop5_vacuous = true;  // no period ended within the horizon
    bool prop6_vacuous = true;  // no fast greedy segment to audit
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

/// Audits a solver schedule against the structural facts an optimum must
/// satisfy: constant per-packet speed, no preemption, one delivery per
/// frame (none in the last), non-decreasing speed within frames, at least
/// two complete transmissions in every period that ends within the horizon,
/// and - when a greedy schedule is supplied - one complete transmission at
/// no lower speed inside every greedy segment faster than 3W/D.
StructureReport verify_structure(const Instance& inst, const Schedule& offline_sched,
                                 const FrameDecomposition& decomp,
                                 const Schedule* greedy_sched = nullptr,
                                 Time time_tol = -1.0);

}  // namespace aoiss
