#include "aoiss/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "aoiss/fcfs.hpp"
#include "aoiss/offline.hpp"
#include "aoiss/rng.hpp"

namespace aoiss {

using nlohmann::json;

ExperimentKind experiment_from_string(const std::string& name) {
    static const std::map<std::string, ExperimentKind> table = {
        {"simulate", ExperimentKind::Simulate}, {"oracle", ExperimentKind::Oracle},
        {"ratio", ExperimentKind::Ratio},       {"adversary", ExperimentKind::Adversary},
        {"sweep_X", ExperimentKind::SweepX},    {"sweep_WD", ExperimentKind::SweepWD},
        {"sweep_D", ExperimentKind::SweepD},    {"trace", ExperimentKind::Trace},
        {"validate", ExperimentKind::Validate},
    };
    auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown experiment: " + name);
    return it->second;
}

std::string experiment_to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::Oracle: return "oracle";
        case ExperimentKind::Ratio: return "ratio";
        case ExperimentKind::Adversary: return "adversary";
        case ExperimentKind::SweepX: return "sweep_X";
        case ExperimentKind::SweepWD: return "sweep_WD";
        case ExperimentKind::SweepD: return "sweep_D";
        case ExperimentKind::Trace: return "trace";
        case ExperimentKind::Validate: return "validate";
    }
    return "?";
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad config JSON: " + std::string(e.what()));
    }
    ExperimentConfig cfg;
    try {
        if (j.contains("experiment")) cfg.experiment = experiment_from_string(j["experiment"]);
        if (j.contains("power")) cfg.power_spec = j["power"];
        if (j.contains("D")) cfg.D = j["D"];
        if (j.contains("T")) cfg.T = j["T"];
        if (j.contains("initial_aoi")) cfg.initial_aoi = j["initial_aoi"];
        if (j.contains("epsilon")) cfg.epsilon = j["epsilon"];
        if (j.contains("W")) cfg.W = j["W"];
        if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) cfg.out_dir = j["out"];
        if (j.contains("policy")) cfg.policy = j["policy"];
        if (j.contains("offline_cap")) cfg.offline_cap = j["offline_cap"];
        if (j.contains("grid_n")) cfg.grid_n = j["grid_n"];
        if (j.contains("strict_gate")) cfg.strict_gate = j["strict_gate"];
        if (j.contains("sweep_grid")) cfg.sweep_grid = j["sweep_grid"].get<std::vector<double>>();
        if (j.contains("source")) {
            const json& s = j["source"];
            const std::string kind = s.at("kind");
            if (kind == "explicit") {
                cfg.source.kind = InstanceSource::Kind::Explicit;
                int id = 0;
                for (const auto& pk : s.at("packets"))
                    cfg.source.packets.push_back(
                        {id++, pk.at("t").get<double>(),
                         pk.contains("size") ? pk.at("size").get<double>() : cfg.W});
            } else if (kind == "deterministic_gap") {
                cfg.source.kind = InstanceSource::Kind::DeterministicGap;
                cfg.source.gap_x = s.at("x");
            } else if (kind == "uniform_gap") {
                cfg.source.kind = InstanceSource::Kind::UniformGap;
                cfg.source.gap_lo = s.at("lo");
                cfg.source.gap_hi = s.at("hi");
            } else if (kind == "file") {
                cfg.source.kind = InstanceSource::Kind::File;
                cfg.source.path = s.at("path");
            } else {
                throw ConfigError("unknown instance source kind: " + kind);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("bad config field: " + std::string(e.what()));
    }
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (!(cfg.D > 0.0)) throw ConfigError("D must be positive");
    if (!(cfg.T > 0.0)) throw ConfigError("T must be positive");
    if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(cfg.W > 0.0)) throw ConfigError("W must be positive");
    if (cfg.policy != "greedy" && cfg.policy != "fcfs")
        throw ConfigError("policy must be greedy or fcfs");
    if (cfg.source.kind == InstanceSource::Kind::UniformGap) {
        if (!cfg.seed)
            throw ConfigError("stochastic instance source requires a seed");
        if (!(cfg.source.gap_lo >= 0.0 && cfg.source.gap_hi > cfg.source.gap_lo))
            throw ConfigError("uniform_gap needs 0 <= lo < hi");
        if (!(cfg.source.gap_hi < cfg.D - cfg.epsilon))
            throw ConfigError("uniform_gap hi must be < D - epsilon to keep instances feasible");
    }
    if (cfg.source.kind == InstanceSource::Kind::DeterministicGap &&
        !(cfg.source.gap_x > 0.0 && cfg.source.gap_x < cfg.D - cfg.epsilon))
        throw ConfigError("deterministic gap must lie in (0, D - epsilon)");
    try {
        PowerFunction::parse_spec(cfg.power_spec);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

namespace {

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t stream) {
    Instance inst;
    inst.D = cfg.D;
    inst.T = cfg.T;
    inst.initial_aoi = cfg.initial_aoi;
    inst.epsilon = cfg.epsilon;
    switch (cfg.source.kind) {
        case InstanceSource::Kind::File:
            inst = read_instance_json(cfg.source.path);
            break;
        case InstanceSource::Kind::Explicit:
            inst.packets = cfg.source.packets;
            break;
        case InstanceSource::Kind::DeterministicGap: {
            int id = 0;
            for (Time t = cfg.source.gap_x; t < cfg.T; t += cfg.source.gap_x)
                inst.packets.push_back({id++, t, cfg.W});
            break;
        }
        case InstanceSource::Kind::UniformGap: {
            Rng rng(mix_seed(*cfg.seed, stream));
            int id = 0;
            Time t = 0.0;
            while (true) {
                t += rng.uniform(cfg.source.gap_lo, cfg.source.gap_hi);
                if (t >= cfg.T) break;
                inst.packets.push_back({id++, t, cfg.W});
            }
            break;
        }
    }
    return inst;
}

}  // namespace

Instance gen_instance(const ExperimentConfig& cfg, std::uint64_t stream) {
    Instance inst = build_instance(cfg, stream);
    auto rep = validate_instance(inst);
    if (!rep.ok())
        throw InfeasibleInstance("generated instance invalid: " + rep.to_string());
    return inst;
}

RatioReport measure_ratio(const Instance& inst, const PowerFunction& p, int offline_cap) {
    Bits W = 0.0;
    for (const Packet& pk : inst.packets) W = std::max(W, pk.size);
    OfflineOptions opts;
    opts.max_enum_packets = offline_cap;

    RatioReport rep;
    rep.s_hat = W / inst.D;
    rep.ulb = universal_lower_bound(p, W, inst.D, inst.T);
    rep.cr_upper_bound = cr_upper(p, rep.s_hat);
    const GreedyRun run = run_greedy(inst, p);
    rep.policy_energy = run.energy;
    rep.offline_energy = solve_offline(inst, p, opts).energy;
    rep.ratio = rep.offline_energy > 0.0
                    ? rep.policy_energy / rep.offline_energy
                    : (rep.policy_energy > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    return rep;
}

Instance read_instance_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open instance file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad instance JSON: " + std::string(e.what()));
    }
    Instance inst;
    try {
        inst.D = j.at("D");
        inst.T = j.at("T");
        inst.initial_aoi = j.value("initial_aoi", 0.0);
        inst.epsilon = j.value("epsilon", 1e-3 * inst.D);
        int id = 0;
        for (const auto& pk : j.at("packets"))
            inst.packets.push_back({id++, pk.at("t").get<double>(), pk.at("size").get<double>()});
    } catch (const json::exception& e) {
        throw ConfigError("bad instance field: " + std::string(e.what()));
    }
    return inst;
}

void write_instance_json(const Instance& inst, const std::string& path) {
    json j;
    j["D"] = inst.D;
    j["T"] = inst.T;
    j["initial_aoi"] = inst.initial_aoi;
    j["epsilon"] = inst.epsilon;
    j["packets"] = json::array();
    for (const Packet& p : inst.packets) j["packets"].push_back({{"t", p.gen_time}, {"size", p.size}});
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

}  // namespace

void write_trace_csv(const Instance& inst, const Schedule& sched, const std::string& path) {
    const auto build = trajectory_from_schedule(inst, sched);
    const AoiTrajectory& traj = build.trajectory;

    struct Row {
        Time t;
        int order;  // deliver < gen < start < idle at equal times
        std::string event;
        int packet_id;
        Speed speed;
    };
    std::vector<Row> rows;
    for (const Packet& p : inst.packets)
        if (p.gen_time < inst.T) rows.push_back({p.gen_time, 1, "gen", p.id, 0.0});
    std::map<int, Time> last_end;
    for (const Segment& s : sched) {
        rows.push_back({s.start, 2, "start", s.packet_id, s.speed});
        last_end[s.packet_id] = std::max(last_end[s.packet_id], s.end);
    }
    for (const Delivery& d : traj.deliveries) rows.push_back({d.time, 0, "deliver", d.packet_id, 0.0});
    // idle marks: delivery completed with nothing starting at the same instant
    for (const Delivery& d : traj.deliveries) {
        bool resumed = false;
        for (const Segment& s : sched)
            if (std::abs(s.start - d.time) <= inst.feas_tol()) resumed = true;
        if (!resumed && d.time < inst.T) rows.push_back({d.time, 3, "idle", -1, 0.0});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.t != b.t ? a.t < b.t : a.order < b.order;
    });

    std::ofstream out(path);
    out << "time,aoi,deadline,event,packet_id,speed\n";
    for (const Row& r : rows) {
        out << fmt(r.t) << "," << fmt(traj.aoi_at(r.t)) << "," << fmt(deadline_at(traj, r.t)) << ","
            << r.event << "," << (r.packet_id >= 0 ? std::to_string(r.packet_id) : "") << ","
            << (r.event == "start" ? fmt(r.speed) : "") << "\n";
    }
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    out << "param,e_greedy,e_offline,ratio,ulb,cr_upper,status\n";
    for (const SweepRow& r : rows) {
        out << fmt(r.param) << "," << fmt_opt(r.e_greedy) << "," << fmt_opt(r.e_offline) << ","
            << fmt_opt(r.ratio) << "," << fmt(r.ulb) << "," << fmt(r.cr_upper_bound) << ","
            << r.status << "\n";
    }
}

namespace {

std::vector<double> default_grid(const ExperimentConfig& cfg) {
    std::vector<double> g;
    switch (cfg.experiment) {
        case ExperimentKind::SweepX:
            for (double x = 0.5; x < cfg.D - 0.05; x += 0.2) g.push_back(x);
            break;
        case ExperimentKind::SweepWD:
            for (double w = 0.1 * cfg.D; w <= cfg.D + 1e-9; w += 0.1 * cfg.D) g.push_back(w);
            break;
        case ExperimentKind::SweepD:
            g = {3.2, 4, 5, 6, 8, 10, 14, 20, 30, 45, 65, 90, 96};
            break;
        default:
            break;
    }
    return g;
}

SweepRow sweep_row(const ExperimentConfig& row_cfg, const PowerFunction& p, double param) {
    SweepRow row;
    row.param = param;
    row.ulb = universal_lower_bound(p, row_cfg.W, row_cfg.D, row_cfg.T);
    row.cr_upper_bound = cr_upper(p, row_cfg.W / row_cfg.D);
    try {
        const Instance inst = gen_instance(row_cfg);
        const GreedyRun run =
            run_greedy(inst, p, GreedyOptions{.strict_horizon_gate = row_cfg.strict_gate});
        row.e_greedy = run.energy;
        if (static_cast<int>(inst.packets.size()) <= row_cfg.offline_cap) {
            OfflineOptions oo;
            oo.max_enum_packets = row_cfg.offline_cap;
            row.e_offline = solve_offline(inst, p, oo).energy;
            if (*row.e_offline > 0.0) row.ratio = *row.e_greedy / *row.e_offline;
        }
    } catch (const std::exception&) {
        row.status = "infeasible";
    }
    return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
    const std::vector<double> grid = cfg.sweep_grid ? *cfg.sweep_grid : default_grid(cfg);
    std::vector<SweepRow> rows;
    const PowerFunction p = PowerFunction::parse_spec(cfg.power_spec);
    for (double v : grid) {
        ExperimentConfig rc = cfg;
        switch (cfg.experiment) {
            case ExperimentKind::SweepX:
                rc.source.kind = InstanceSource::Kind::DeterministicGap;
                rc.source.gap_x = v;
                break;
            case ExperimentKind::SweepWD:
                rc.W = v;
                break;
            case ExperimentKind::SweepD:
                rc.D = v;
                rc.epsilon = std::min(cfg.epsilon, 0.25 * (v - rc.source.gap_hi));
                break;
            default:
                throw ConfigError("run_sweep called with a non-sweep experiment");
        }
        rows.push_back(sweep_row(rc, p, v));
    }
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });
    return rows;
}

namespace {

json ratio_report_json(const RatioReport& rep) {
    json j;
    j["policy_energy"] = rep.policy_energy;
    j["offline_energy"] = rep.offline_energy;
    j["ratio"] = std::isfinite(rep.ratio) ? json(rep.ratio) : json("inf");
    j["ulb"] = rep.ulb;
    j["cr_upper"] = rep.cr_upper_bound;
    j["s_hat"] = rep.s_hat;
    if (rep.violation_time) j["violation_time"] = *rep.violation_time;
    return j;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    try {
        validate_config(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    const auto out = [&](const std::string& name) { return (fs::path(cfg.out_dir) / name).string(); };

    try {
        const PowerFunction p = PowerFunction::parse_spec(cfg.power_spec);
        switch (cfg.experiment) {
            case ExperimentKind::Validate: {
                const Instance inst = build_instance(cfg, 0);
                const auto rep = validate_instance(inst);
                std::cout << "instance with " << inst.packets.size()
                          << " packets: " << rep.to_string() << "\n";
                return rep.ok() ? 0 : 3;
            }
            case ExperimentKind::Simulate:
            case ExperimentKind::Trace: {
                const Instance inst = gen_instance(cfg);
                Schedule sched;
                Energy energy = 0.0;
                if (cfg.policy == "fcfs") {
                    auto run = run_fcfs(inst, p);
                    sched = run.schedule;
                    energy = run.energy;
                } else {
                    auto run = run_greedy(inst, p,
                                          GreedyOptions{.strict_horizon_gate = cfg.strict_gate});
                    sched = run.schedule;
                    energy = run.energy;
                }
                write_trace_csv(inst, sched, out("trace.csv"));
                const auto feas = check_feasible(inst, sched);
                std::cout << "policy=" << cfg.policy << " energy=" << fmt(energy)
                          << " feasible=" << (feas.feasible ? "yes" : "no") << " trace="
                          << out("trace.csv") << "\n";
                return feas.feasible ? 0 : 3;
            }
            case ExperimentKind::Oracle: {
                const Instance inst = gen_instance(cfg);
                OfflineOptions oo;
                oo.max_enum_packets = cfg.offline_cap;
                const OfflineResult res = solve_offline(inst, p, oo);
                write_trace_csv(inst, res.schedule, out("schedule.csv"));
                json j;
                j["energy"] = res.energy;
                j["chosen"] = res.decomp.chosen;
                j["frames"] = json::array();
                for (const auto& f : res.decomp.frames) j["frames"].push_back({f.begin, f.end});
                j["periods"] = json::array();
                for (const auto& c : res.decomp.periods) j["periods"].push_back({c.begin, c.end});
                std::ofstream(out("decomposition.json")) << j.dump(2) << "\n";
                std::cout << "offline energy=" << fmt(res.energy) << " chosen="
                          << res.decomp.chosen.size() << " packets\n";
                return 0;
            }
            case ExperimentKind::Ratio: {
                const Instance inst = gen_instance(cfg);
                const RatioReport rep = measure_ratio(inst, p, cfg.offline_cap);
                std::ofstream(out("ratio.json")) << ratio_report_json(rep).dump(2) << "\n";
                std::cout << "greedy=" << fmt(rep.policy_energy)
                          << " offline=" << fmt(rep.offline_energy) << " ratio=" << fmt(rep.ratio)
                          << " cr_upper=" << fmt(rep.cr_upper_bound) << "\n";
                return 0;
            }
            case ExperimentKind::Adversary: {
                CausalPolicy policy;
                if (cfg.policy == "fcfs")
                    policy = [&p](const Instance& i) { return run_fcfs(i, p).schedule; };
                else
                    policy = [](const Instance& i) { return run_greedy(i).schedule; };
                const auto outcome = adversary_two_stage(policy, p, cfg.D, cfg.W, cfg.delta_value());
                write_instance_json(outcome.chosen_instance, out("adversary_instance.json"));
                json j;
                j["picked"] = outcome.picked_sigma1 ? "sigma1" : "sigma2";
                j["gamma"] = outcome.gamma;
                j["packet2_delivered"] = outcome.packet2_delivered;
                j["report"] = ratio_report_json(outcome.report);
                std::ofstream(out("adversary.json")) << j.dump(2) << "\n";
                std::cout << "adversary picked " << (outcome.picked_sigma1 ? "sigma1" : "sigma2")
                          << " gamma=" << fmt(outcome.gamma) << " ratio="
                          << fmt(outcome.report.ratio) << "\n";
                return 0;
            }
            case ExperimentKind::SweepX:
            case ExperimentKind::SweepWD:
            case ExperimentKind::SweepD: {
                const auto rows = run_sweep(cfg);
                write_sweep_csv(rows, out("sweep.csv"));
                // closed-form bounds at each swept point, next to the CSV
                json bounds = json::array();
                for (const SweepRow& r : rows) {
                    const double D = cfg.experiment == ExperimentKind::SweepD ? r.param : cfg.D;
                    const double W = cfg.experiment == ExperimentKind::SweepWD ? r.param : cfg.W;
                    const BoundReport b = make_bound_report(p, W, W, D, cfg.T);
                    bounds.push_back({{"param", r.param},
                                      {"cr_upper", b.cr_upper},
                                      {"cr_lower_expr", b.cr_lower_expr},
                                      {"ulb", b.ulb},
                                      {"s_hat", b.s_hat},
                                      {"zeta", b.zeta}});
                }
                std::ofstream(out("bounds.json")) << bounds.dump(2) << "\n";
                std::cout << "wrote " << rows.size() << " rows to " << out("sweep.csv") << "\n";
                return 0;
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CapExceeded& e) {
        std::cerr << "solver cap exceeded: " << e.what() << "\n";
        return 4;
    } catch (const InfeasibleInstance& e) {
        std::cerr << "infeasible instance: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace aoiss
