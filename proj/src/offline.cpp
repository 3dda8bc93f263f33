#include "aoiss/offline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "aoiss/rng.hpp"

namespace aoiss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidates {
    std::vector<Time> gen;
    std::vector<Bits> size;
    std::vector<int> id;
};

Candidates collect_candidates(const Instance& inst) {
    Candidates c;
    for (const Packet& p : inst.packets) {
        if (p.gen_time < inst.T) {
            c.gen.push_back(p.gen_time);
            c.size.push_back(p.size);
            c.id.push_back(p.id);
        }
    }
    return c;
}

// Timing data of a fixed subsequence: per-position generation time, size,
// and the latest admissible delivery u_k = min(d_{k-1} - tol, T).
struct Chain {
    std::vector<Time> gen;
    std::vector<Bits> size;
    std::vector<Time> latest;
};

Chain make_chain(const Instance& inst, const std::vector<int>& chosen) {
    Chain ch;
    const Time tol = inst.feas_tol();
    Time d_prev = inst.initial_deadline();
    for (int id : chosen) {
        const Packet& p = inst.packet(id);
        ch.gen.push_back(p.gen_time);
        ch.size.push_back(p.size);
        ch.latest.push_back(std::min(d_prev - tol, inst.T));
        d_prev = p.gen_time + inst.D;
    }
    return ch;
}

Energy window_energy(const PowerFunction& p, Bits w, Time y) {
    if (!(y > 0.0)) return kInf;
    return p.eval(w / y) * y;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

}  // namespace

Energy optimize_delivery_times(const Instance& inst, const PowerFunction& p,
                               const std::vector<int>& chosen, std::vector<Time>& taus,
                               const OfflineOptions& opts) {
    const size_t m = chosen.size();
    if (m == 0) return 0.0;
    if (taus.size() != m)
        throw std::invalid_argument("optimize_delivery_times: taus size mismatch");
    const Chain ch = make_chain(inst, chosen);

    auto start_of = [&](size_t k) {
        return std::max(ch.gen[k], k == 0 ? 0.0 : taus[k - 1]);
    };
    auto term = [&](size_t k) { return window_energy(p, ch.size[k], taus[k] - start_of(k)); };

    const double sweep_tol = opts.descent_tol_rel * inst.D;
    const double line_tol = 0.5 * sweep_tol;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        double max_move = 0.0;
        for (size_t k = 0; k < m; ++k) {
            const double lo = start_of(k);
            const double hi = std::min(ch.latest[k], k + 1 < m ? taus[k + 1] : kInf);
            if (!(hi > lo)) continue;
            auto f = [&](double t) {
                double v = window_energy(p, ch.size[k], t - lo);
                if (k + 1 < m)
                    v += window_energy(p, ch.size[k + 1],
                                       taus[k + 1] - std::max(ch.gen[k + 1], t));
                return v;
            };
            const double old_tau = taus[k];
            double t_new = golden_min(f, lo, hi, line_tol);
            // snap onto the upper bound when it is at least as good, so
            // deadline-bound deliveries land exactly on d - tol
            const double f_hi = f(hi);
            if (f_hi <= f(t_new)) t_new = hi;
            taus[k] = t_new;
            max_move = std::max(max_move, std::abs(taus[k] - old_tau));
        }
        if (max_move < sweep_tol) break;
    }

    Energy total = 0.0;
    for (size_t k = 0; k < m; ++k) total += term(k);
    return total;
}

std::optional<std::vector<Time>> random_feasible_taus(const Instance& inst,
                                                      const std::vector<int>& chosen,
                                                      std::uint64_t seed) {
    const Chain ch = make_chain(inst, chosen);
    const Time tol = inst.feas_tol();
    Rng rng(seed);
    std::vector<Time> taus;
    Time prev = 0.0;
    for (size_t k = 0; k < ch.gen.size(); ++k) {
        const Time lo = std::max(ch.gen[k], prev);
        const Time hi = ch.latest[k];
        if (!(hi > lo + tol)) return std::nullopt;
        // keep away from the zero-width edge
        const Time t = lo + (hi - lo) * (0.05 + 0.9 * rng.uniform01());
        taus.push_back(t);
        prev = t;
    }
    return taus;
}

namespace {

// Late-as-possible initialization; keeps windows strictly positive.
std::vector<Time> late_init(const Chain& ch, Time D) {
    const size_t m = ch.gen.size();
    std::vector<Time> taus(m);
    for (size_t i = m; i-- > 0;) {
        if (i + 1 == m) {
            taus[i] = ch.latest[i];
        } else {
            const double stagger = std::min(0.25 * (taus[i + 1] - ch.gen[i]), 1e-6 * D);
            taus[i] = std::min(ch.latest[i], taus[i + 1] - stagger);
        }
    }
    return taus;
}

struct EnumState {
    const Instance* inst;
    const PowerFunction* p;
    const OfflineOptions* opts;
    Candidates cand;
    Time tol;

    Energy best_energy = kInf;
    std::vector<int> best_chosen;
    std::vector<Time> best_taus;
    bool found = false;

    std::vector<int> cur;  // candidate indices (into cand), not packet ids
};

void evaluate_candidate(EnumState& st) {
    std::vector<int> chosen;
    chosen.reserve(st.cur.size());
    for (int idx : st.cur) chosen.push_back(st.cand.id[static_cast<size_t>(idx)]);

    const Chain ch = make_chain(*st.inst, chosen);
    std::vector<Time> taus = late_init(ch, st.inst->D);
    const Energy e = optimize_delivery_times(*st.inst, *st.p, chosen, taus, *st.opts);

    bool accept = !st.found;
    if (st.found) {
        const double near = 1e-12 * std::max(1.0, std::abs(st.best_energy));
        accept = e < st.best_energy - near ||
                 (std::abs(e - st.best_energy) <= near && chosen < st.best_chosen);
    }
    if (accept) {
        st.best_energy = e;
        st.best_chosen = chosen;
        st.best_taus = taus;
        st.found = true;
    }
}

// DFS over transmitted subsequences. d_prev is the running deadline; a
// candidate is complete once d_prev clears the horizon, and is never
// extended past that (extra deliveries only add energy). lb is the sum of
// maximal-window lower bounds of the packets chosen so far.
void enumerate(EnumState& st, int first_next, Time d_prev, Energy lb) {
    const Instance& inst = *st.inst;
    if (d_prev >= inst.T + st.tol) {
        evaluate_candidate(st);
        return;
    }
    const Time cutoff = std::min(d_prev - st.tol, inst.T);
    // latest-first ordering finds cheap candidates early, tightening the bound
    int last = first_next;
    while (last < static_cast<int>(st.cand.gen.size()) &&
           st.cand.gen[static_cast<size_t>(last)] < cutoff)
        ++last;
    for (int i = last - 1; i >= first_next; --i) {
        const auto k = static_cast<size_t>(i);
        const Time max_window = cutoff - st.cand.gen[k];
        if (!(max_window > st.tol)) continue;
        const Energy lb_i = window_energy(*st.p, st.cand.size[k], max_window);
        if (lb + lb_i >= st.best_energy) continue;
        st.cur.push_back(i);
        enumerate(st, i + 1, st.cand.gen[k] + inst.D, lb + lb_i);
        st.cur.pop_back();
    }
}

}  // namespace

OfflineResult solve_offline(const Instance& inst, const PowerFunction& p,
                            const OfflineOptions& opts) {
    {
        auto rep = validate_instance(inst);
        if (!rep.ok())
            throw InfeasibleInstance("solve_offline: invalid instance: " + rep.to_string());
    }
    EnumState st;
    st.inst = &inst;
    st.p = &p;
    st.opts = &opts;
    st.cand = collect_candidates(inst);
    st.tol = inst.feas_tol();

    if (static_cast<int>(st.cand.gen.size()) > opts.max_enum_packets) {
        std::ostringstream os;
        os << "solve_offline: " << st.cand.gen.size() << " packets exceed enumeration cap "
           << opts.max_enum_packets << "; use grid_oracle";
        throw CapExceeded(os.str());
    }

    const Time d0 = inst.initial_deadline();
    enumerate(st, 0, d0, 0.0);
    if (!st.found)
        throw InfeasibleInstance("solve_offline: no feasible transmitted subsequence");

    OfflineResult res;
    res.energy = st.best_energy;
    res.decomp.chosen = st.best_chosen;
    res.decomp.deadlines.push_back(d0);
    Time prev_tau = 0.0;
    for (size_t k = 0; k < st.best_chosen.size(); ++k) {
        const Packet& pk = inst.packet(st.best_chosen[k]);
        const Time r = std::max(pk.gen_time, prev_tau);
        const Time tau = st.best_taus[k];
        res.schedule.push_back({pk.id, r, tau, pk.size / (tau - r)});
        res.decomp.deadlines.push_back(pk.gen_time + inst.D);
        res.decomp.periods.push_back({pk.gen_time, pk.gen_time + inst.D});
        prev_tau = tau;
    }
    Time frame_begin = 0.0;
    for (Time d : res.decomp.deadlines) {
        res.decomp.frames.push_back({frame_begin, d});
        frame_begin = d;
    }
    return res;
}

namespace {

// Shared DP over grid-snapped delivery times. f[i][x] = least energy of a
// feasible prefix whose latest delivery is packet i at grid time x*h.
// Transitions split on whether the previous delivery lands before or after
// the generation of packet i (the start rule r = max(gen, prev delivery)).
struct GridDp {
    const Instance& inst;
    const PowerFunction& p;
    int grid_n;
    Time h = 0.0;
    std::vector<std::vector<Energy>> f;

    GridDp(const Instance& i, const PowerFunction& pf, int g, Time span)
        : inst(i), p(pf), grid_n(g) {
        if (grid_n < 100) throw std::invalid_argument("grid oracle needs grid_n >= 100");
        h = span / grid_n;
    }

    // window energies on exact grid multiples, per packet
    std::vector<Energy> window_table(Bits w, int max_steps) const {
        std::vector<Energy> e(static_cast<size_t>(max_steps) + 1, kInf);
        for (int l = 1; l <= max_steps; ++l) e[static_cast<size_t>(l)] = p.eval(w / (l * h)) * (l * h);
        return e;
    }
};

}  // namespace

Energy grid_oracle(const Instance& inst, const PowerFunction& p, int grid_n) {
    {
        auto rep = validate_instance(inst);
        if (!rep.ok())
            throw InfeasibleInstance("grid_oracle: invalid instance: " + rep.to_string());
    }
    const Candidates cand = collect_candidates(inst);
    const size_t n = cand.gen.size();
    const Time tol = inst.feas_tol();
    const Time d0 = inst.initial_deadline();

    Energy best = kInf;
    if (d0 >= inst.T + tol) best = 0.0;
    if (n == 0) {
        if (best == kInf) throw InfeasibleInstance("grid_oracle: no packets, horizon uncovered");
        return best;
    }

    const Time span = std::min(inst.T, cand.gen.back() + inst.D);
    GridDp dp(inst, p, grid_n, span);
    const Time h = dp.h;
    const int G = grid_n;
    const int d_steps = static_cast<int>(std::ceil(inst.D / h)) + 1;

    dp.f.assign(n, std::vector<Energy>(static_cast<size_t>(G) + 1, kInf));
    std::vector<std::vector<Energy>> prefmin(n);  // prefix minima of f rows

    for (size_t i = 0; i < n; ++i) {
        auto& fi = dp.f[i];
        // packet i as the first delivery
        const Time u_first = std::min(d0 - tol, inst.T);
        for (int x = 1; x <= G; ++x) {
            const Time t = x * h;
            if (t > u_first) break;
            if (t <= cand.gen[i]) continue;
            fi[static_cast<size_t>(x)] = p.eval(cand.size[i] / (t - cand.gen[i])) * (t - cand.gen[i]);
        }
        // packet i after packet j
        const auto ei = dp.window_table(cand.size[i], d_steps);
        for (size_t j = 0; j < i; ++j) {
            const auto& fj = dp.f[j];
            const auto& pj = prefmin[j];
            const Time uj = std::min(cand.gen[j] + inst.D - tol, inst.T);
            const int x_hi = std::min(G, static_cast<int>(std::floor(uj / h)));
            // prev delivery at or before gen_i: free window back to gen_i
            const int y_cap = static_cast<int>(std::floor(cand.gen[i] / h));
            const Energy before = y_cap >= 1 ? pj[static_cast<size_t>(std::min(y_cap, G))] : kInf;
            for (int x = 1; x <= x_hi; ++x) {
                const Time t = x * h;
                Energy v = kInf;
                if (before < kInf && t > cand.gen[i])
                    v = before + p.eval(cand.size[i] / (t - cand.gen[i])) * (t - cand.gen[i]);
                const int y_lo = std::max(y_cap + 1, x - d_steps);
                for (int y = y_lo; y < x; ++y) {
                    const Energy fy = fj[static_cast<size_t>(y)];
                    if (fy < kInf) v = std::min(v, fy + ei[static_cast<size_t>(x - y)]);
                }
                fi[static_cast<size_t>(x)] = std::min(fi[static_cast<size_t>(x)], v);
            }
        }
        prefmin[i].resize(static_cast<size_t>(G) + 1);
        Energy run = kInf;
        for (int x = 0; x <= G; ++x) {
            run = std::min(run, fi[static_cast<size_t>(x)]);
            prefmin[i][static_cast<size_t>(x)] = run;
        }
        // packet i can close the chain if its deadline clears the horizon
        if (cand.gen[i] + inst.D >= inst.T + tol)
            best = std::min(best, prefmin[i][static_cast<size_t>(G)]);
    }
    if (best == kInf) throw InfeasibleInstance("grid_oracle: no feasible grid schedule");
    return best;
}

Energy grid_oracle_fcfs(const Instance& inst, const PowerFunction& p, int grid_n) {
    {
        auto rep = validate_instance(inst);
        if (!rep.ok())
            throw InfeasibleInstance("grid_oracle_fcfs: invalid instance: " + rep.to_string());
    }
    const Candidates cand = collect_candidates(inst);
    const size_t n = cand.gen.size();
    if (n == 0) return 0.0;
    const Time tol = inst.feas_tol();

    std::vector<Time> dls;
    Time prev_gen = inst.mu0();
    for (size_t i = 0; i < n; ++i) {
        dls.push_back(prev_gen + inst.D);
        prev_gen = cand.gen[i];
    }

    const Time span = dls.back();  // deadlines are non-decreasing
    GridDp dp(inst, p, grid_n, span);
    const Time h = dp.h;
    const int G = grid_n;
    const int d_steps = static_cast<int>(std::ceil(inst.D / h)) + 1;

    std::vector<Energy> prev(static_cast<size_t>(G) + 1, kInf);
    for (size_t i = 0; i < n; ++i) {
        std::vector<Energy> cur(static_cast<size_t>(G) + 1, kInf);
        const Time u = dls[i] - tol;
        const int x_hi = std::min(G, static_cast<int>(std::floor(u / h)));
        const auto ei = dp.window_table(cand.size[i], d_steps);
        if (i == 0) {
            for (int x = 1; x <= x_hi; ++x) {
                const Time t = x * h;
                if (t <= cand.gen[i]) continue;
                cur[static_cast<size_t>(x)] =
                    p.eval(cand.size[i] / (t - cand.gen[i])) * (t - cand.gen[i]);
            }
        } else {
            const int y_cap = static_cast<int>(std::floor(cand.gen[i] / h));
            std::vector<Energy> pj(static_cast<size_t>(G) + 1, kInf);
            Energy run = kInf;
            for (int x = 0; x <= G; ++x) {
                run = std::min(run, prev[static_cast<size_t>(x)]);
                pj[static_cast<size_t>(x)] = run;
            }
            const Energy before = y_cap >= 1 ? pj[static_cast<size_t>(std::min(y_cap, G))] : kInf;
            for (int x = 1; x <= x_hi; ++x) {
                const Time t = x * h;
                Energy v = kInf;
                if (before < kInf && t > cand.gen[i])
                    v = before + p.eval(cand.size[i] / (t - cand.gen[i])) * (t - cand.gen[i]);
                const int y_lo = std::max(y_cap + 1, x - d_steps);
                for (int y = y_lo; y < x; ++y) {
                    const Energy fy = prev[static_cast<size_t>(y)];
                    if (fy < kInf) v = std::min(v, fy + ei[static_cast<size_t>(x - y)]);
                }
                cur[static_cast<size_t>(x)] = v;
            }
        }
        prev = std::move(cur);
    }
    const Energy best = *std::min_element(prev.begin(), prev.end());
    if (best == kInf) throw InfeasibleInstance("grid_oracle_fcfs: deadlines unmeetable on grid");
    return best;
}

std::string StructureReport::to_string() const {
    if (violations.empty()) return "all structural properties hold";
    std::ostringstream os;
    for (size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

StructureReport verify_structure(const Instance& inst, const Schedule& offline_sched,
                                 const FrameDecomposition& decomp, const Schedule* greedy_sched,
                                 Time time_tol) {
    if (time_tol < 0.0) time_tol = 1e-9 * inst.D;
    constexpr double speed_rel_tol = 1e-6;
    StructureReport rep;
    auto add = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

    // group segments per packet, ordered in time
    std::map<int, std::vector<const Segment*>> per_packet;
    std::vector<const Segment*> order;
    for (const Segment& s : offline_sched) {
        per_packet[s.packet_id].push_back(&s);
        order.push_back(&s);
    }
    std::sort(order.begin(), order.end(),
              [](const Segment* a, const Segment* b) { return a->start < b->start; });

    struct Tx {
        Time start, end;
        Speed speed;
        Bits bits;
    };
    std::map<int, Tx> tx;
    for (auto& [id, segs] : per_packet) {
        std::sort(segs.begin(), segs.end(),
                  [](const Segment* a, const Segment* b) { return a->start < b->start; });
        Tx t{segs.front()->start, segs.front()->end, segs.front()->speed, 0.0};
        bool constant = true, contiguous = true;
        for (const Segment* s : segs) {
            t.bits += s->bits();
            if (std::abs(s->speed - t.speed) > speed_rel_tol * t.speed) constant = false;
            if (s != segs.front() && std::abs(s->start - t.end) > time_tol) contiguous = false;
            t.end = std::max(t.end, s->end);
        }
        if (!constant)
            add("packet " + std::to_string(id) + " not transmitted at constant speed");
        if (!contiguous)
            add("packet " + std::to_string(id) + " preempted (non-contiguous transmission)");
        tx[id] = t;
    }

    // exactly the chosen packets are transmitted, one delivery per frame
    // 0..m-1 and none in the final frame
    const size_t m = decomp.chosen.size();
    if (tx.size() != m) add("transmitted packet set differs from decomposition");
    for (size_t k = 0; k < m; ++k) {
        auto it = tx.find(decomp.chosen[k]);
        if (it == tx.end()) {
            add("chosen packet " + std::to_string(decomp.chosen[k]) + " missing from schedule");
            continue;
        }
        const Tx& t = it->second;
        const Bits size = inst.packet(decomp.chosen[k]).size;
        if (t.bits < size * (1.0 - kEnergyRelTol))
            add("chosen packet " + std::to_string(decomp.chosen[k]) + " not fully transmitted");
        const Interval& frame = decomp.frames[k];  // packet k+1 delivered in frame k
        if (t.end < frame.begin - time_tol || t.end > frame.end + time_tol) {
            std::ostringstream os;
            os << "delivery " << k << " at " << t.end << " outside its frame [" << frame.begin
               << ", " << frame.end << ")";
            add(os.str());
        }
    }

    // speed never decreases inside a frame: no slower follow-up segment, no
    // idle gap between segments, no transmission stopping short of the
    // frame end. Transitions within tolerance of frame boundaries (or the
    // horizon) are exempt; leading idle at frame entry is an increase.
    for (size_t fi = 0; fi < decomp.frames.size(); ++fi) {
        const Time fb = decomp.frames[fi].begin;
        const Time fe = std::min(decomp.frames[fi].end, inst.T);
        std::vector<const Segment*> in_frame;
        for (const Segment* s : order)
            if (s->end > fb + time_tol && s->start < fe - time_tol) in_frame.push_back(s);
        if (in_frame.empty()) continue;
        for (size_t si = 0; si + 1 < in_frame.size(); ++si) {
            const Segment* a = in_frame[si];
            const Segment* b = in_frame[si + 1];
            if (b->start > a->end + time_tol) {
                std::ostringstream os;
                os << "speed drops to idle inside frame " << fi << " at t = " << a->end;
                add(os.str());
            } else if (b->speed < a->speed * (1.0 - speed_rel_tol)) {
                std::ostringstream os;
                os << "speed decreases inside frame " << fi << " at t = " << b->start;
                add(os.str());
            }
        }
        if (in_frame.back()->end < fe - time_tol) {
            std::ostringstream os;
            os << "transmission stops inside frame " << fi << " at t = " << in_frame.back()->end;
            add(os.str());
        }
    }

    // every period that ends within the horizon holds two complete
    // transmissions
    for (size_t k = 0; k < decomp.periods.size(); ++k) {
        const Interval& period = decomp.periods[k];
        if (period.end > inst.T + time_tol) continue;
        rep.prop5_vacuous = false;
        int complete = 0;
        for (const auto& [id, t] : tx) {
            if (t.start >= period.begin - time_tol && t.end <= period.end + time_tol &&
                t.bits >= inst.packet(id).size * (1.0 - kEnergyRelTol))
                ++complete;
        }
        if (complete < 2) {
            std::ostringstream os;
            os << "period " << k << " [" << period.begin << ", " << period.end << ") holds "
               << complete << " complete transmissions, expected >= 2";
            add(os.str());
        }
    }

    // every fast greedy segment contains a complete transmission at least
    // as fast
    if (greedy_sched) {
        for (const Segment& g : *greedy_sched) {
            const Bits w = inst.packet(g.packet_id).size;
            if (g.speed <= (3.0 * w / inst.D) * (1.0 + 1e-9)) continue;
            rep.prop6_vacuous = false;
            bool found = false;
            for (const auto& [id, t] : tx) {
                if (t.start >= g.start - time_tol && t.end <= g.end + time_tol &&
                    t.bits >= inst.packet(id).size * (1.0 - kEnergyRelTol) &&
                    t.speed >= g.speed * (1.0 - speed_rel_tol)) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                std::ostringstream os;
                os << "no complete transmission at speed >= " << g.speed
                   << " inside fast greedy segment [" << g.start << ", " << g.end << ")";
                add(os.str());
            }
        }
    }
    return rep;
}

}  // namespace aoiss
