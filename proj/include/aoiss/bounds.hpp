#pragma once

#include <functional>
#include <optional>

#include "aoiss/model.hpp"
#include "aoiss/offline.hpp"

namespace aoiss {

/// A causal policy as a black box: it maps an instance to a schedule and
/// must only use events up to the current time, i.e. its behaviour on
/// [0, t) is identical across instances that agree on [0, t). The
/// adversaries below rely on exactly that contract.
using CausalPolicy = std::function<Schedule(const Instance&)>;

struct RatioReport {
    Energy policy_energy = 0.0;
    Energy offline_energy = 0.0;
    double ratio = 0.0;  // +inf when the policy was infeasible
    Energy ulb = 0.0;
    double cr_upper_bound = 0.0;
    double s_hat = 0.0;
    std::optional<Time> violation_time;
};

struct BoundReport {
    double cr_upper = 0.0;
    double cr_lower_expr = 0.0;
    Energy ulb = 0.0;
    double s_hat = 0.0;
    double zeta = 1.0;
};

/// Bundles the closed-form bounds that apply to one parameter point; for
/// fixed sizes pass w == W (zeta 1).
BoundReport make_bound_report(const PowerFunction& p, Bits w, Bits W, Time D, Time T);

/// Greedy competitive-ratio upper bound 2 P(3 s_hat) / P(s_hat) + 1.
double cr_upper(const PowerFunction& p, double s_hat);

/// Greedy competitive-ratio lower bound 1.5 P(3 s_hat) / P(1.5 s_hat).
double cr_lower_greedy(const PowerFunction& p, double s_hat);

/// Instance-independent energy floor max{0, P(2W/D) (T - D)}.
Energy universal_lower_bound(const PowerFunction& p, Bits W, Time D, Time T);

struct LbCaseRatios {
    double ratio1 = 0.0;
    double ratio2 = 0.0;
    double ratio3 = 0.0;
    double min = 0.0;
};

/// The three case expressions behind the any-causal-policy lower bound,
/// and their minimum. Case constants are fixed by the construction.
LbCaseRatios lb_case_ratios(const PowerFunction& p, double s_hat);

struct AdversaryOutcome {
    Instance chosen_instance;
    bool picked_sigma1 = false;
    double gamma = 0.0;          // fraction of packet 2 moved by t = D/2
    bool packet2_delivered = false;
    RatioReport report;
};

/// Two-stage adversary: both candidate traces share the prefix {0, D/4}
/// with initial age D/2 and horizon 3D/2 - delta. The policy runs on the
/// common prefix; whatever it has done to packet 2 by the initial deadline
/// D/2 decides which continuation it is handed (third generation at D/2,
/// or at 5D/6). Returns the measured policy/optimal energy ratio.
AdversaryOutcome adversary_two_stage(const CausalPolicy& policy, const PowerFunction& p,
                                     Time D, Bits W, Time delta);

/// Two-packet variable-size trap: a full-size packet just after t = 0 and,
/// for j >= 1, a packet of size W/eta^j generated at D(1 - 1/eta^j);
/// j = 0 is the lone full-size packet. Horizon D + delta/2, zero initial age.
Instance variable_size_adversary(double eta, int j, Time D, Bits W, Time delta);

/// Greedy upper bound for sizes in [w, W]: 2 P(3 zeta w/D) / P(w/D) + 1
/// with zeta = W/w.
double arbitrary_size_cr_upper(const PowerFunction& p, Bits w, Bits W, Time D);

/// Runs a policy and the offline solver on one instance and reports the
/// energy ratio together with the applicable closed-form bounds.
RatioReport measure_ratio_for_policy(const CausalPolicy& policy, const Instance& inst,
                                     const PowerFunction& p, Bits W_for_bounds);

}  // namespace aoiss
