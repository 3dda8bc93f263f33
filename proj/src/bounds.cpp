#include "aoiss/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aoiss {

double cr_upper(const PowerFunction& p, double s_hat) {
    if (!(s_hat > 0.0)) throw std::domain_error("cr_upper: s_hat must be positive");
    const Energy denom = p.eval(s_hat);
    if (!(denom > 0.0)) throw std::domain_error("cr_upper: P(s_hat) = 0");
    return 2.0 * p.eval(3.0 * s_hat) / denom + 1.0;
}

double cr_lower_greedy(const PowerFunction& p, double s_hat) {
    if (!(s_hat > 0.0)) throw std::domain_error("cr_lower_greedy: s_hat must be positive");
    const Energy denom = p.eval(1.5 * s_hat);
    if (!(denom > 0.0)) throw std::domain_error("cr_lower_greedy: P(1.5 s_hat) = 0");
    return 1.5 * p.eval(3.0 * s_hat) / denom;
}

Energy universal_lower_bound(const PowerFunction& p, Bits W, Time D, Time T) {
    if (!(W > 0.0 && D > 0.0 && T > 0.0))
        throw std::domain_error("universal_lower_bound: W, D, T must be positive");
    return std::max(0.0, p.eval(2.0 * W / D) * (T - D));
}

LbCaseRatios lb_case_ratios(const PowerFunction& p, double s_hat) {
    if (!(s_hat > 0.0)) throw std::domain_error("lb_case_ratios: s_hat must be positive");
    LbCaseRatios r;
    const Energy p2 = p.eval(2.0 * s_hat);
    const Energy p24 = p.eval(2.4 * s_hat);
    r.ratio1 = p.eval(4.0 * s_hat) / (4.0 * p2) + 0.5;
    r.ratio2 = std::min(p.eval(2.14 * s_hat) / p2 + 1.0, 2.5 * p24 / p2);
    r.ratio3 = std::min(2.0 * p.eval(6.0 * s_hat) / (15.0 * p24),
                        3.0 * p.eval(2.57 * s_hat) / (5.0 * p24));
    r.min = std::min({r.ratio1, r.ratio2, r.ratio3});
    return r;
}

double arbitrary_size_cr_upper(const PowerFunction& p, Bits w, Bits W, Time D) {
    if (!(w > 0.0 && W >= w)) throw std::domain_error("arbitrary_size_cr_upper: need 0 < w <= W");
    const double zeta = W / w;
    const double s_tilde = w / D;
    return 2.0 * p.eval(3.0 * zeta * s_tilde) / p.eval(s_tilde) + 1.0;
}

BoundReport make_bound_report(const PowerFunction& p, Bits w, Bits W, Time D, Time T) {
    BoundReport rep;
    rep.s_hat = W / D;
    rep.zeta = W / w;
    rep.cr_upper = w == W ? cr_upper(p, rep.s_hat) : arbitrary_size_cr_upper(p, w, W, D);
    rep.cr_lower_expr = lb_case_ratios(p, rep.s_hat).min;
    rep.ulb = universal_lower_bound(p, W, D, T);
    return rep;
}

RatioReport measure_ratio_for_policy(const CausalPolicy& policy, const Instance& inst,
                                     const PowerFunction& p, Bits W_for_bounds) {
    RatioReport rep;
    rep.s_hat = W_for_bounds / inst.D;
    rep.ulb = universal_lower_bound(p, W_for_bounds, inst.D, inst.T);
    rep.cr_upper_bound = cr_upper(p, rep.s_hat);

    const Schedule sched = policy(inst);
    rep.policy_energy = schedule_energy(p, sched);
    rep.offline_energy = solve_offline(inst, p).energy;

    const auto feas = check_feasible(inst, sched);
    if (!feas.feasible) {
        rep.ratio = std::numeric_limits<double>::infinity();
        rep.violation_time = feas.violation_time;
        return rep;
    }
    rep.ratio = rep.offline_energy > 0.0
                    ? rep.policy_energy / rep.offline_energy
                    : (rep.policy_energy > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    return rep;
}

AdversaryOutcome adversary_two_stage(const CausalPolicy& policy, const PowerFunction& p,
                                     Time D, Bits W, Time delta) {
    if (!(delta > 0.0 && delta < 0.1 * D))
        throw std::domain_error("adversary_two_stage: need 0 < delta << D");

    auto make_instance = [&](Time third_gen) {
        Instance inst;
        inst.D = D;
        inst.T = 1.5 * D - delta;
        inst.initial_aoi = 0.5 * D;
        inst.epsilon = std::min(delta, 1e-3 * D);
        inst.packets = {{0, 0.0, W}, {1, 0.25 * D, W}, {2, third_gen, W}};
        return inst;
    };
    // Both traces agree on [0, D/2); by causality the policy's prefix on
    // sigma_1 is what it would do on sigma_2 as well, so the case split can
    // be read off a sigma_1 run.
    const Schedule prefix = policy(make_instance(0.5 * D));
    const Time probe_end = 0.5 * D;  // initial deadline d(0)
    Bits bits2 = 0.0;
    Time last_end2 = -1.0;
    Bits bits2_total = 0.0;
    for (const Segment& s : prefix) {
        if (s.packet_id != 1) continue;
        bits2_total += s.bits();
        last_end2 = std::max(last_end2, s.end);
        const Time a = std::max(s.start, 0.0);
        const Time b = std::min(s.end, probe_end);
        if (b > a) bits2 += s.speed * (b - a);
    }
    AdversaryOutcome out;
    out.gamma = bits2 / W;
    out.packet2_delivered =
        bits2_total >= W * (1.0 - kEnergyRelTol) && last_end2 <= probe_end;
    out.picked_sigma1 = out.packet2_delivered || out.gamma >= 0.07;

    out.chosen_instance = make_instance(out.picked_sigma1 ? 0.5 * D : 5.0 * D / 6.0);
    out.report = measure_ratio_for_policy(policy, out.chosen_instance, p, W);
    return out;
}

Instance variable_size_adversary(double eta, int j, Time D, Bits W, Time delta) {
    if (!(eta > 1.0)) throw std::domain_error("variable_size_adversary: eta must exceed 1");
    if (j < 0) throw std::domain_error("variable_size_adversary: j must be non-negative");
    Instance inst;
    inst.D = D;
    inst.T = D + 0.5 * delta;
    inst.initial_aoi = 0.0;
    inst.epsilon = std::min(0.5 * delta, 1e-3 * D);
    inst.packets = {{0, delta, W}};
    if (j >= 1) {
        const double scale = std::pow(eta, -j);
        inst.packets.push_back({1, D * (1.0 - scale), W * scale});
    }
    return inst;
}

}  // namespace aoiss
