#include "aoiss/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace aoiss {

Speed greedy_speed(Bits w, Time D, Time deadline, Time t, double floor_factor) {
    if (!(deadline > t)) {
        std::ostringstream os;
        os << "greedy_speed: deadline " << deadline << " already passed at t = " << t;
        throw std::runtime_error(os.str());
    }
    return std::max(w / (deadline - t), floor_factor * w / D);
}

GreedyRun run_greedy(const Instance& inst, const GreedyOptions& opts) {
    {
        auto rep = validate_instance(inst);
        if (!rep.ok())
            throw std::invalid_argument("run_greedy: invalid instance: " + rep.to_string());
    }

    GreedyRun run;
    run.trajectory.mu0 = inst.mu0();
    run.trajectory.D = inst.D;

    Time mu = inst.mu0();
    bool any_delivery = false;
    Time now = 0.0;
    size_t next_gen = 0;  // packets are sorted by gen_time
    std::vector<int> pending;

    auto gate_open = [&](Time deadline) {
        return opts.strict_horizon_gate ? deadline < inst.T : deadline <= inst.T;
    };
    auto is_fresh = [&](const Packet& p) {
        return p.gen_time > mu || (!any_delivery && p.gen_time == inst.mu0());
    };

    // latest fresh packet among the pending ones (stale entries dropped)
    auto pick_latest_fresh = [&]() -> std::optional<int> {
        std::erase_if(pending, [&](int id) { return !is_fresh(inst.packet(id)); });
        if (pending.empty()) return std::nullopt;
        return pending.back();
    };

    std::optional<Segment> in_flight;
    while (true) {
        // next event: completion of the current transmission or next generation
        const bool has_gen = next_gen < inst.packets.size() &&
                             inst.packets[next_gen].gen_time < inst.T;
        const Time gen_t = has_gen ? inst.packets[next_gen].gen_time
                                   : std::numeric_limits<Time>::infinity();
        const Time comp_t = in_flight ? in_flight->end : std::numeric_limits<Time>::infinity();
        const Time t = std::min(gen_t, comp_t);

        // while idle the deadline must not pass before the next event
        if (!in_flight) {
            const Time deadline = mu + inst.D;
            if (gate_open(deadline) && t >= deadline) {
                std::ostringstream os;
                os << "run_greedy: no fresh packet before deadline at t = " << deadline;
                throw std::runtime_error(os.str());
            }
        }
        if (!std::isfinite(t)) break;
        now = t;

        if (in_flight && in_flight->end == now) {
            const Packet& p = inst.packet(in_flight->packet_id);
            run.schedule.push_back(*in_flight);
            run.trajectory.deliveries.push_back({now, p.gen_time, p.id});
            mu = std::max(mu, p.gen_time);
            any_delivery = true;
            in_flight.reset();
        }
        while (next_gen < inst.packets.size() && inst.packets[next_gen].gen_time <= now) {
            if (inst.packets[next_gen].gen_time < inst.T)
                pending.push_back(inst.packets[next_gen].id);
            ++next_gen;
        }

        if (!in_flight) {
            const Time deadline = mu + inst.D;
            if (!gate_open(deadline)) break;  // constraint already covered through T
            if (auto id = pick_latest_fresh()) {
                const Packet& p = inst.packet(*id);
                // target the deadline shrunk by the feasibility slack so the
                // delivery lands strictly before the age limit
                const Speed s = greedy_speed(p.size, inst.D, deadline - inst.feas_tol(), now,
                                             opts.floor_factor);
                in_flight = Segment{p.id, now, now + p.size / s, s};
                std::erase(pending, *id);
            }
        }
    }

    return run;
}

GreedyRun run_greedy(const Instance& inst, const PowerFunction& p, const GreedyOptions& opts) {
    GreedyRun run = run_greedy(inst, opts);
    run.energy = schedule_energy(p, run.schedule);
    return run;
}

}  // namespace aoiss
