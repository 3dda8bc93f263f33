// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code is the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "aoiss/bounds.hpp"
#include "aoiss/experiment.hpp"
#include "aoiss/fcfs.hpp"
#include "aoiss/greedy.hpp"
#include "aoiss/offline.hpp"
#include "aoiss/rng.hpp"

using namespace aoiss;

namespace {

struct Check {
    std::string name;
    std::function<bool(std::string&)> run;
    double budget_s = 0.0;  // 0 = no runtime bound
};

Instance example_one(Time delta) {
    Instance inst;
    inst.D = 2.0;
    inst.T = 3.0 + delta / 2;
    inst.epsilon = delta / 2;
    inst.packets = {{0, 0.0, 1.0}, {1, delta, 1.0}, {2, 1.0 + delta, 1.0}};
    return inst;
}

Instance step2_instance(Time D, Time delta) {
    Instance inst;
    inst.D = D;
    inst.T = 4 * D / 3 + delta / 2;
    inst.epsilon = delta / 4;
    inst.packets = {{0, 0.0, 1.0}, {1, D / 3, 1.0}, {2, D / 3 + delta, 1.0}};
    return inst;
}

struct PowerPick {
    PowerFunction p;
    Bits W;
    std::string tag;
};

// rotate through the polynomial exponents and exponential W/D ratios
PowerPick pick_power(std::uint64_t index, Time D) {
    switch (index % 6) {
        case 0: return {PowerFunction::polynomial(1.5), 1.0, "poly1.5"};
        case 1: return {PowerFunction::polynomial(2.0), 1.0, "poly2"};
        case 2: return {PowerFunction::polynomial(3.0), 1.0, "poly3"};
        case 3: return {PowerFunction::exponential(), 0.5 * D, "exp s=0.5"};
        case 4: return {PowerFunction::exponential(), 1.0 * D, "exp s=1"};
        default: return {PowerFunction::exponential(), 2.0 * D, "exp s=2"};
    }
}

Instance seeded_instance(std::uint64_t seed, int max_n, Bits W, double gap_lo_frac,
                         double gap_hi_frac, Time D = 4.0) {
    Rng rng(mix_seed(seed, 0));
    Instance inst;
    inst.D = D;
    inst.epsilon = 0.05 * D;
    inst.initial_aoi = rng.uniform(0.0, 0.3 * D);
    const int n = 3 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_n - 2));
    Time t = rng.uniform(0.1, 0.8) * (inst.initial_deadline() - inst.epsilon);
    for (int i = 0; i < n; ++i) {
        inst.packets.push_back({i, t, W});
        t += rng.uniform(gap_lo_frac * D, gap_hi_frac * D);
    }
    inst.T = inst.packets.back().gen_time + rng.uniform(0.15, 0.85) * D;
    return inst;
}

bool approx(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

std::string fmt1(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- criteria ---------------------------------------------------------

bool crit1_example_reproduction(std::string& detail) {
    const auto poly2 = PowerFunction::polynomial(2.0);
    const auto inst = example_one(1e-3);
    const auto greedy = run_greedy(inst, poly2);
    if (greedy.schedule.size() != 3) {
        detail = "greedy emitted " + std::to_string(greedy.schedule.size()) + " segments";
        return false;
    }
    for (const Segment& s : greedy.schedule)
        if (!approx(s.speed, 1.5, 1e-9)) {
            detail = "greedy speed " + fmt1(s.speed);
            return false;
        }
    const auto off = solve_offline(inst, poly2);
    if (off.decomp.chosen != std::vector<int>{2}) {
        detail = "offline transmitted a different subsequence";
        return false;
    }
    const auto rep = measure_ratio(inst, poly2);
    detail = "ratio=" + fmt1(rep.ratio);
    return approx(rep.ratio, 4.49, 0.02);
}

bool crit2_step2_lower_bound(std::string& detail) {
    const Time D = 3.0, delta = 1e-4 * D;
    std::ostringstream os;
    for (double alpha : {1.5, 2.0, 3.0}) {
        const auto p = PowerFunction::polynomial(alpha);
        const auto inst = step2_instance(D, delta);
        const Energy greedy = run_greedy(inst, p).energy;
        const Energy off = solve_offline(inst, p).energy;
        const double ratio = greedy / off;
        const double bound = cr_lower_greedy(p, 1.0 / D);
        os << "alpha=" << alpha << " ratio=" << fmt1(ratio) << "/" << fmt1(bound) << " ";
        if (!approx(ratio, bound, 0.01)) {
            detail = os.str();
            return false;
        }
    }
    detail = os.str();
    return true;
}

bool run_sandwich_and_structure(bool structure, std::string& detail) {
    int viol_ulb = 0, viol_opt = 0, viol_cap = 0, viol_struct = 0;
    double worst_ulb_excess = 0.0;
    std::string first;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const auto pw = pick_power(seed, 4.0);
        const auto inst = seeded_instance(seed, 10, pw.W, 0.25, 0.8);
        if (!validate_instance(inst).ok()) {
            detail = "seed " + std::to_string(seed) + " generated invalid";
            return false;
        }
        const auto greedy = run_greedy(inst, pw.p);
        const auto off = solve_offline(inst, pw.p);
        if (!structure) {
            const Energy ulb = universal_lower_bound(pw.p, pw.W, inst.D, inst.T);
            const double up = cr_upper(pw.p, pw.W / inst.D);
            if (ulb > off.energy * (1 + 1e-9) + 1e-12) {
                ++viol_ulb;
                if (off.energy > 0)
                    worst_ulb_excess = std::max(worst_ulb_excess, ulb / off.energy - 1.0);
            }
            if (off.energy > greedy.energy * (1 + 1e-9)) ++viol_opt;
            if (greedy.energy > up * off.energy * (1 + 1e-9) + 1e-12) ++viol_cap;
        } else {
            const auto rep =
                verify_structure(inst, off.schedule, off.decomp, &greedy.schedule, 1e-9 * inst.D);
            if (!rep.ok()) {
                ++viol_struct;
                if (first.empty())
                    first = "seed " + std::to_string(seed) + ": " + rep.to_string();
            }
        }
    }
    std::ostringstream os;
    if (!structure) {
        os << "offline<=greedy: " << viol_opt << " violations; greedy<=cr_upper*offline: "
           << viol_cap << " violations; ulb<=offline: " << viol_ulb << " violations";
        if (viol_ulb > 0)
            os << " (closed-form floor exceeds the oracle-confirmed optimum by up to "
               << fmt1(100.0 * worst_ulb_excess) << "% on short horizons)";
        detail = os.str();
        return viol_opt == 0 && viol_cap == 0 && viol_ulb == 0;
    }
    os << viol_struct << "/1000 violations";
    if (!first.empty()) os << " (" << first << ")";
    detail = os.str();
    return viol_struct == 0;
}

bool crit3_sandwich(std::string& detail) { return run_sandwich_and_structure(false, detail); }
bool crit4_structure(std::string& detail) { return run_sandwich_and_structure(true, detail); }

bool crit5_oracle_agreement(std::string& detail) {
    int tested = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 5000; tested < 200; ++seed) {
        const auto pw = pick_power(seed % 4, 4.0);  // poly 1.5/2/3 and exp s=0.5
        const auto inst = seeded_instance(seed, 8, pw.W, 0.4, 0.75);
        if (!validate_instance(inst).ok()) continue;
        ++tested;
        const Energy exact = solve_offline(inst, pw.p).energy;
        const Energy grid = grid_oracle(inst, pw.p, 4000);
        if (exact == 0.0) {
            if (grid != 0.0) {
                detail = "seed " + std::to_string(seed) + ": grid nonzero on empty optimum";
                return false;
            }
            continue;
        }
        const double rel = std::abs(grid - exact) / exact;
        worst = std::max(worst, rel);
        if (rel > 0.01 || grid < exact * (1 - 1e-6)) {
            detail = "seed " + std::to_string(seed) + ": rel=" + fmt1(rel);
            return false;
        }
    }
    detail = "worst rel dev " + fmt1(worst) + " over 200 instances";
    return true;
}

bool audit_greedy_run(const Instance& inst, const Schedule& sched, std::string& why) {
    const auto traj = trajectory_from_schedule(inst, sched).trajectory;
    for (const Segment& s : sched) {
        const Bits w = inst.packet(s.packet_id).size;
        if (s.speed <= 3.0 * w / inst.D * (1.0 + 1e-9)) continue;
        for (const Packet& p : inst.packets) {
            if (p.gen_time >= s.start - 2.0 * inst.D / 3.0 && p.gen_time < s.start - 1e-12) {
                why = "generation inside the lookback window";
                return false;
            }
        }
        if (std::abs(s.start - inst.packet(s.packet_id).gen_time) > 1e-9 * inst.D) {
            why = "fast segment does not start at its generation";
            return false;
        }
        const Time d_at_start = deadline_at(traj, s.start - 1e-12 * inst.D);
        if (std::abs(s.end - d_at_start) > 1e-9 * inst.D) {
            why = "fast segment does not finish at the deadline";
            return false;
        }
    }
    return true;
}

bool crit6_greedy_speed_structure(std::string& detail) {
    int audited = 0, fast_runs = 0;
    // dense and sparse generation patterns, fixed sizes
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const auto pw = pick_power(seed, 4.0);
        const auto inst = seeded_instance(seed, 10, pw.W, 0.25, 0.8);
        if (!validate_instance(inst).ok()) continue;
        const auto run = run_greedy(inst);
        std::string why;
        ++audited;
        if (!audit_greedy_run(inst, run.schedule, why)) {
            detail = "seed " + std::to_string(seed) + ": " + why;
            return false;
        }
    }
    for (std::uint64_t seed = 20000; seed < 20400; ++seed) {
        const auto inst = seeded_instance(seed, 8, 1.0, 0.7, 0.9);
        if (!validate_instance(inst).ok()) continue;
        const auto run = run_greedy(inst);
        bool any_fast = false;
        for (const Segment& s : run.schedule)
            if (s.speed > 3.0 * inst.packet(s.packet_id).size / inst.D * (1 + 1e-9))
                any_fast = true;
        fast_runs += any_fast ? 1 : 0;
        std::string why;
        ++audited;
        if (!audit_greedy_run(inst, run.schedule, why)) {
            detail = "seed " + std::to_string(seed) + ": " + why;
            return false;
        }
    }
    std::ostringstream os;
    os << audited << " runs audited, " << fast_runs << " with fast segments, zero violations";
    detail = os.str();
    return fast_runs > 0;
}

bool crit7_adversary(std::string& detail) {
    const auto poly2 = PowerFunction::polynomial(2.0);
    const CausalPolicy greedy = [](const Instance& i) { return run_greedy(i).schedule; };
    const auto out = adversary_two_stage(greedy, poly2, 4.0, 1.0, 1e-3);
    std::ostringstream os;
    os << (out.picked_sigma1 ? "sigma1" : "sigma2") << " gamma=" << fmt1(out.gamma)
       << " ratio=" << fmt1(out.report.ratio);
    detail = os.str();
    if (!out.picked_sigma1) return false;
    if (!approx(out.report.ratio, 2.25, 0.02)) return false;
    return out.report.ratio >= lb_case_ratios(poly2, 0.25).min;
}

bool crit8_variable_size_trend(std::string& detail) {
    const auto poly2 = PowerFunction::polynomial(2.0);
    double prev = 0.0;
    std::ostringstream os;
    for (int j = 1; j <= 5; ++j) {
        const auto inst = variable_size_adversary(2.0, j, 2.0, 1.0, 1e-3);
        const Energy greedy = run_greedy(inst, poly2).energy;
        const Energy off = solve_offline(inst, poly2).energy;
        const double ratio = greedy / off;
        os << "j=" << j << ":" << fmt1(ratio) << " ";
        if (ratio <= prev) {
            detail = os.str() + "(not increasing)";
            return false;
        }
        prev = ratio;
    }
    detail = os.str();
    return prev > 10.0;
}

bool crit9_fcfs(std::string& detail) {
    const auto poly2 = PowerFunction::polynomial(2.0);
    {
        Instance inst;
        inst.D = 2.0;
        inst.T = 2.2;
        inst.initial_aoi = 0.3;
        inst.epsilon = 1e-3;
        inst.packets = {{0, 0.3, 1.2}};
        const auto run = run_fcfs(inst, poly2);
        const Energy expect = segment_energy(poly2, 1.2, (inst.D - 0.3) - 0.3);
        if (!approx(run.energy, expect, 1e-9)) {
            detail = "single packet energy " + fmt1(run.energy) + " vs " + fmt1(expect);
            return false;
        }
    }
    {
        Instance inst;
        inst.D = 2.0;
        inst.T = 2.4;
        inst.epsilon = 1e-3;
        inst.packets = {{0, 0.0, 1.0}, {1, 0.5, 1.0}};
        const auto run = run_fcfs(inst, poly2);
        if (std::abs(run.energy - 13.0 / 6.0) > 1e-4) {
            detail = "two packet energy " + fmt1(run.energy);
            return false;
        }
    }
    int tested = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 9000; tested < 100; ++seed) {
        Rng rng(mix_seed(seed, 1));
        Instance inst;
        inst.D = 3.0;
        inst.epsilon = 0.05 * inst.D;
        const int n = 2 + static_cast<int>(rng.next_u64() % 6);
        Time t = rng.uniform(0.1, 0.8);
        for (int i = 0; i < n; ++i) {
            inst.packets.push_back({i, t, rng.uniform(0.3, 1.5)});
            t += rng.uniform(0.3 * inst.D, 0.8 * inst.D);
        }
        inst.T = inst.packets.back().gen_time + 0.5 * inst.D;
        if (!validate_instance(inst).ok()) continue;
        ++tested;
        const auto run = run_fcfs(inst, poly2);
        const Energy oracle = grid_oracle_fcfs(inst, poly2, 2000);
        const double cap = 4.0;  // alpha^alpha at alpha 2
        worst = std::max(worst, run.energy / oracle);
        if (run.energy > cap * oracle * (1 + 1e-9)) {
            detail = "seed " + std::to_string(seed) + ": online/oracle " +
                     fmt1(run.energy / oracle);
            return false;
        }
    }
    detail = "worst online/oracle " + fmt1(worst) + " over 100 instances (cap 4)";
    return true;
}

bool crit10_sweep_trends(std::string& detail) {
    const auto poly2 = PowerFunction::polynomial(2.0);
    const Time D = 5.0, T = 100.0;
    // deterministic-gap sweep over x
    std::vector<double> xs, ex;
    for (double x = 0.5; x <= 4.9 + 1e-9; x += 0.2) xs.push_back(x);
    for (double x : xs) {
        Instance inst;
        inst.D = D;
        inst.T = T;
        inst.epsilon = std::min(0.05, 0.5 * (D - x));
        int id = 0;
        for (Time t = x; t < T; t += x) inst.packets.push_back({id++, t, 1.0});
        ex.push_back(run_greedy(inst, poly2).energy);
    }
    double flat_min = 1e300, flat_max = 0.0, prev = -1.0;
    double blow_first = 0.0, blow_last = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        if (x <= D / 3 + 1e-9) {
            flat_min = std::min(flat_min, ex[i]);
            flat_max = std::max(flat_max, ex[i]);
        } else if (x <= 2 * D / 3 + 1e-9) {
            if (prev >= 0.0 && ex[i] > prev * (1 + 1e-9)) {
                detail = "middle regime not non-increasing at x=" + fmt1(x);
                return false;
            }
        } else {
            if (blow_first == 0.0) blow_first = ex[i];
            if (ex[i] < blow_last * (1 - 1e-9)) {
                detail = "blow-up regime not non-decreasing at x=" + fmt1(x);
                return false;
            }
            blow_last = std::max(blow_last, ex[i]);
        }
        prev = ex[i];
    }
    if (flat_max > flat_min * 1.10) {
        detail = "flat regime spread " + fmt1(flat_max / flat_min);
        return false;
    }
    if (!(blow_last > 3.0 * blow_first && blow_last > 3.0 * flat_max)) {
        detail = "no blow-up: first=" + fmt1(blow_first) + " last=" + fmt1(blow_last);
        return false;
    }

    // shared uniform(0, 3) generation trace swept over D
    Rng rng(mix_seed(424242, 0));
    std::vector<Time> gens;
    Time t = 0.0;
    while (true) {
        t += rng.uniform(0.0, 3.0);
        if (t >= T) break;
        gens.push_back(t);
    }
    const std::vector<double> d_grid = {3.2, 4, 5, 6, 8, 10, 14, 20, 30, 45, 65, 90, 96};
    double first_e = -1.0, last_e = 0.0;
    prev = -1.0;
    for (double d : d_grid) {
        Instance inst;
        inst.D = d;
        inst.T = T;
        inst.epsilon = std::min(0.05, 0.25 * (d - 3.0));
        int id = 0;
        for (Time g : gens) inst.packets.push_back({id++, g, 1.0});
        const Energy e = run_greedy(inst, poly2).energy;
        if (prev >= 0.0 && e > prev * (1 + 1e-9)) {
            detail = "sweep_D not non-increasing at D=" + fmt1(d);
            return false;
        }
        if (first_e < 0.0) first_e = e;
        last_e = e;
        prev = e;
    }
    std::ostringstream os;
    os << "sweep_X flat spread " << fmt1(flat_max / flat_min) << ", blow-up to "
       << fmt1(blow_last) << "; sweep_D " << fmt1(first_e) << " -> " << fmt1(last_e);
    detail = os.str();
    return last_e < 0.01 * first_e;
}

}  // namespace

int main() {
    const std::vector<Check> checks = {
        {"example reproduction (3 greedy segments at 1.5, offline picks #3, ratio 4.49 +- 2%)",
         crit1_example_reproduction, 1.0},
        {"step-2 ratio meets 1.5 P(3s)/P(1.5s) within 1% (alpha 1.5/2/3)",
         crit2_step2_lower_bound, 1.0},
        {"ULB <= offline <= greedy <= cr_upper * offline on 1000 seeded instances",
         crit3_sandwich, 300.0},
        {"structural audit clean on the same 1000 instances", crit4_structure, 300.0},
        {"solver vs grid oracle within 1% on 200 instances", crit5_oracle_agreement, 0.0},
        {"fast greedy segments: empty lookback window, start at generation",
         crit6_greedy_speed_structure, 0.0},
        {"two-stage adversary picks sigma1, ratio 2.25 +- 2%", crit7_adversary, 0.0},
        {"variable-size ratios strictly increasing, final > 10", crit8_variable_size_trend, 0.0},
        {"deliver-all scaler: exact single packet, 2.1667 two-packet, within alpha^alpha",
         crit9_fcfs, 0.0},
        {"sweep trends: flat/decreasing/blow-up over x, non-increasing over D",
         crit10_sweep_trends, 240.0},
    };

    int failures = 0;
    for (size_t i = 0; i < checks.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = checks[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (checks[i].budget_s > 0.0 && secs > checks[i].budget_s) {
            ok = false;
            detail += " [over time budget]";
        }
        failures += ok ? 0 : 1;
        std::printf("[%s] criterion %zu: %s%s%s [%.2fs]\n", ok ? "PASS" : "FAIL", i + 1,
                    checks[i].name.c_str(), detail.empty() ? "" : " -- ", detail.c_str(), secs);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(checks.size()) - failures,
                checks.size());
    return failures;
}
