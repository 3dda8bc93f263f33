#include "aoiss/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace aoiss {

std::string ValidationReport::to_string() const {
    if (problems.empty()) return "valid";
    std::ostringstream os;
    for (size_t i = 0; i < problems.size(); ++i) {
        if (i) os << "; ";
        os << problems[i];
    }
    return os.str();
}

ValidationReport validate_instance(const Instance& inst) {
    ValidationReport rep;
    auto add = [&rep](const std::string& msg) { rep.problems.push_back(msg); };

    if (!(inst.D > 0.0)) add("peak AoI bound D must be positive");
    if (!(inst.T > 0.0)) add("horizon T must be positive");
    if (!(inst.epsilon > 0.0)) add("epsilon margin must be positive");
    if (inst.initial_aoi < 0.0) add("initial AoI must be non-negative");
    if (!rep.ok()) return rep;

    if (!(inst.initial_aoi < inst.D - inst.epsilon))
        add("initial AoI too large: requires initial_aoi < D - epsilon");

    for (size_t i = 0; i < inst.packets.size(); ++i) {
        const Packet& p = inst.packets[i];
        if (!(p.size > 0.0)) {
            std::ostringstream os;
            os << "packet " << i << " has non-positive size";
            add(os.str());
        }
        if (p.gen_time < 0.0) {
            std::ostringstream os;
            os << "packet " << i << " generated before time 0";
            add(os.str());
        }
        if (i > 0) {
            const double gap = p.gen_time - inst.packets[i - 1].gen_time;
            if (!(gap > 0.0)) {
                std::ostringstream os;
                os << "generation times not strictly increasing at packet " << i;
                add(os.str());
            } else if (!(gap < inst.D - inst.epsilon)) {
                std::ostringstream os;
                os << "infeasible gap: X_" << i + 1 << " = " << gap
                   << " is not < D - epsilon = " << inst.D - inst.epsilon;
                add(os.str());
            }
        }
    }
    if (!rep.ok()) return rep;

    // Reachability walk: with unbounded speed a fresh packet generated
    // strictly before the running deadline can always be delivered in time,
    // so feasibility reduces to chaining deadlines past T.
    Time deadline = inst.initial_deadline();
    size_t next = 0;
    while (deadline <= inst.T) {
        // freshest packet generated before the current deadline
        std::optional<size_t> pick;
        while (next < inst.packets.size() && inst.packets[next].gen_time < deadline &&
               inst.packets[next].gen_time < inst.T) {
            pick = next;
            ++next;
        }
        if (!pick) {
            std::ostringstream os;
            os << "infeasible: no fresh packet available before deadline at t = " << deadline;
            add(os.str());
            break;
        }
        deadline = inst.packets[*pick].gen_time + inst.D;
    }
    return rep;
}

Time AoiTrajectory::mu_at(Time t) const {
    // last delivery at or before t
    Time mu = mu0;
    for (const auto& d : deliveries) {
        if (d.time <= t)
            mu = std::max(mu, d.gen_time);
        else
            break;
    }
    return mu;
}

Time deadline_at(const AoiTrajectory& traj, Time t) {
    if (t < 0.0) throw std::domain_error("deadline_at: negative time");
    return traj.mu_at(t) + traj.D;
}

ValidationReport validate_schedule(const Instance& inst, const Schedule& sched) {
    ValidationReport rep;
    auto add = [&rep](const std::string& msg) { rep.problems.push_back(msg); };

    std::vector<const Segment*> order;
    order.reserve(sched.size());
    for (const auto& s : sched) order.push_back(&s);
    std::sort(order.begin(), order.end(),
              [](const Segment* a, const Segment* b) { return a->start < b->start; });

    const double tol = inst.feas_tol();
    const Segment* prev = nullptr;
    std::map<int, Bits> bits;
    for (const Segment* s : order) {
        if (s->packet_id < 0 || s->packet_id >= static_cast<int>(inst.packets.size())) {
            add("segment references unknown packet id " + std::to_string(s->packet_id));
            continue;
        }
        if (!(s->start < s->end)) add("segment with non-positive duration");
        if (!(s->speed > 0.0)) add("segment with non-positive speed");
        const Packet& p = inst.packet(s->packet_id);
        if (s->start < p.gen_time - tol) {
            std::ostringstream os;
            os << "packet " << s->packet_id << " transmitted before its generation time";
            add(os.str());
        }
        if (prev && s->start < prev->end - tol) add("overlapping segments");
        bits[s->packet_id] += s->bits();
        prev = s;
    }
    for (const auto& [id, b] : bits) {
        const Bits size = inst.packet(id).size;
        if (b > size * (1.0 + kEnergyRelTol)) {
            std::ostringstream os;
            os << "packet " << id << " transmitted more bits than its size";
            add(os.str());
        }
    }
    return rep;
}

TrajectoryBuild trajectory_from_schedule(const Instance& inst, const Schedule& sched) {
    auto rep = validate_schedule(inst, sched);
    if (!rep.ok())
        throw std::invalid_argument("trajectory_from_schedule: invalid schedule: " + rep.to_string());

    struct Acc {
        Bits bits = 0.0;
        Time last_end = 0.0;
    };
    std::map<int, Acc> acc;
    for (const auto& s : sched) {
        auto& a = acc[s.packet_id];
        a.bits += s.bits();
        a.last_end = std::max(a.last_end, s.end);
    }

    std::vector<Delivery> complete;
    TrajectoryBuild out;
    for (const auto& [id, a] : acc) {
        const Packet& p = inst.packet(id);
        if (a.bits >= p.size * (1.0 - kEnergyRelTol))
            complete.push_back({a.last_end, p.gen_time, id});
        else
            out.incomplete.push_back(id);
    }
    std::sort(complete.begin(), complete.end(),
              [](const Delivery& x, const Delivery& y) { return x.time < y.time; });

    out.trajectory.mu0 = inst.mu0();
    out.trajectory.D = inst.D;
    Time mu = inst.mu0();
    bool any_fresh = false;
    for (const auto& d : complete) {
        const bool fresh = d.gen_time > mu || (!any_fresh && d.gen_time == inst.mu0());
        if (fresh) {
            out.trajectory.deliveries.push_back(d);
            mu = std::max(mu, d.gen_time);
            any_fresh = true;
        } else {
            out.redundant.push_back(d);
        }
    }
    return out;
}

FeasibilityResult check_feasible(const Instance& inst, const AoiTrajectory& traj, Time tol) {
    if (tol < 0.0) tol = inst.feas_tol();
    // Violation once the age reaches D - tol/2; solver outputs that keep a
    // full tol of margin then verify robustly, exact-deadline deliveries
    // fail robustly.
    const Time limit = inst.D - 0.5 * tol;
    Time mu = traj.mu0;
    for (const auto& d : traj.deliveries) {
        const Time t = std::min(d.time, inst.T);
        if (t - mu >= limit)
            return {false, mu + inst.D};
        if (d.time > inst.T) break;
        mu = std::max(mu, d.gen_time);
    }
    if (inst.T - mu >= limit)
        return {false, mu + inst.D};
    return {true, std::nullopt};
}

FeasibilityResult check_feasible(const Instance& inst, const Schedule& sched, Time tol) {
    return check_feasible(inst, trajectory_from_schedule(inst, sched).trajectory, tol);
}

std::vector<int> fresh_packets(const Instance& inst, const AoiTrajectory& traj, Time t) {
    if (t < 0.0) throw std::domain_error("fresh_packets: negative time");
    Time mu = traj.mu0;
    bool any_delivery = false;
    std::vector<bool> delivered(inst.packets.size(), false);
    for (const auto& d : traj.deliveries) {
        if (d.time > t) break;
        mu = std::max(mu, d.gen_time);
        any_delivery = true;
        if (d.packet_id >= 0 && d.packet_id < static_cast<int>(inst.packets.size()))
            delivered[static_cast<size_t>(d.packet_id)] = true;
    }
    std::vector<int> fresh;
    for (const Packet& p : inst.packets) {
        if (p.gen_time > t) break;
        if (delivered[static_cast<size_t>(p.id)]) continue;
        if (p.gen_time > mu || (!any_delivery && p.gen_time == traj.mu0))
            fresh.push_back(p.id);
    }
    return fresh;
}

}  // namespace aoiss
