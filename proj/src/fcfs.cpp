#include "aoiss/fcfs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace aoiss {

std::vector<Time> fcfs_deadlines(const Instance& inst) {
    std::vector<Time> out;
    out.reserve(inst.packets.size());
    Time prev_gen = inst.mu0();
    for (const Packet& p : inst.packets) {
        out.push_back(prev_gen + inst.D);
        prev_gen = p.gen_time;
    }
    return out;
}

Speed fcfs_speed(const FcfsState& state, Time t) {
    if (state.remaining.empty()) return 0.0;
    // gather (deadline, bits) pairs sorted by deadline, then run the density max
    std::vector<std::pair<Time, Bits>> due;
    due.reserve(state.remaining.size());
    for (const auto& [id, bits] : state.remaining) {
        auto it = state.deadlines.find(id);
        if (it == state.deadlines.end())
            throw std::logic_error("fcfs_speed: pending packet without deadline");
        if (it->second <= t) {
            std::ostringstream os;
            os << "fcfs_speed: deadline " << it->second << " of packet " << id
               << " already passed at t = " << t;
            throw std::runtime_error(os.str());
        }
        due.emplace_back(it->second, bits);
    }
    std::sort(due.begin(), due.end());
    Speed best = 0.0;
    Bits cum = 0.0;
    for (size_t i = 0; i < due.size(); ++i) {
        cum += due[i].second;
        if (i + 1 < due.size() && due[i + 1].first == due[i].first) continue;
        best = std::max(best, cum / (due[i].first - t));
    }
    return best;
}

FcfsRun run_fcfs(const Instance& inst, const PowerFunction& p) {
    {
        auto rep = validate_instance(inst);
        if (!rep.ok())
            throw std::invalid_argument("run_fcfs: invalid instance: " + rep.to_string());
    }

    // Deadlines are shrunk by the feasibility slack so completions land
    // strictly before the age limit.
    const Time shrink = inst.feas_tol();
    const std::vector<Time> dls = fcfs_deadlines(inst);

    FcfsRun run;
    FcfsState st;
    size_t next_gen = 0;
    Time now = 0.0;

    auto earliest_pending = [&]() -> int {
        int best = -1;
        for (const auto& [id, bits] : st.remaining) {
            if (best == -1 || st.deadlines[id] < st.deadlines[best] ||
                (st.deadlines[id] == st.deadlines[best] && id < best))
                best = id;
        }
        return best;
    };

    while (true) {
        const bool has_gen = next_gen < inst.packets.size() &&
                             inst.packets[next_gen].gen_time < inst.T;
        const Time gen_t = has_gen ? inst.packets[next_gen].gen_time
                                   : std::numeric_limits<Time>::infinity();

        if (st.remaining.empty()) {
            if (!has_gen) break;
            now = gen_t;
        } else {
            const Speed s = fcfs_speed(st, now);
            const int head = earliest_pending();
            const Time done_t = now + st.remaining[head] / s;
            const Time t = std::min(done_t, gen_t);
            if (t > now) {
                run.schedule.push_back({head, now, t, s});
                st.remaining[head] -= s * (t - now);
            }
            now = t;
            if (done_t <= gen_t) {
                run.deliveries.push_back({now, inst.packet(head).gen_time, head});
                st.remaining.erase(head);
                st.deadlines.erase(head);
            }
        }
        while (next_gen < inst.packets.size() && inst.packets[next_gen].gen_time <= now) {
            const Packet& pk = inst.packets[next_gen];
            if (pk.gen_time < inst.T) {
                st.remaining[pk.id] = pk.size;
                st.deadlines[pk.id] = dls[next_gen] - shrink;
            }
            ++next_gen;
        }
        st.now = now;
    }

    run.energy = schedule_energy(p, run.schedule);
    return run;
}

}  // namespace aoiss
