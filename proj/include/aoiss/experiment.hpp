#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoiss/bounds.hpp"
#include "aoiss/greedy.hpp"
#include "aoiss/model.hpp"

namespace aoiss {

enum class ExperimentKind {
    Simulate,
    Oracle,
    Ratio,
    Adversary,
    SweepX,
    SweepWD,
    SweepD,
    Trace,
    Validate,
};

ExperimentKind experiment_from_string(const std::string& name);
std::string experiment_to_string(ExperimentKind kind);

struct InstanceSource {
    enum class Kind { Explicit, DeterministicGap, UniformGap, File };
    Kind kind = Kind::DeterministicGap;
    std::vector<Packet> packets;  // Explicit
    double gap_x = 1.0;           // DeterministicGap
    double gap_lo = 0.0;          // UniformGap
    double gap_hi = 1.0;
    std::string path;             // File (instance JSON)
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Simulate;
    InstanceSource source;
    std::string power_spec = "poly:alpha=2";
    Time D = 5.0;
    Time T = 100.0;
    Time initial_aoi = 0.0;
    Time epsilon = 0.05;
    Bits W = 1.0;
    std::optional<Time> delta;  // defaults to 1e-3 * D
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::string policy = "greedy";  // or "fcfs"
    int offline_cap = 14;
    int grid_n = 4000;
    std::optional<std::vector<double>> sweep_grid;
    bool strict_gate = false;

    Time delta_value() const { return delta.value_or(1e-3 * D); }
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses the JSON config file; throws ConfigError on malformed input.
ExperimentConfig load_config(const std::string& path);

/// Validates cross-field constraints (gap bounds vs D, mandatory seed for
/// stochastic sources, ...). Throws ConfigError on violation.
void validate_config(const ExperimentConfig& cfg);

/// Materializes the instance described by the config. Stochastic sources
/// draw gaps from the substream mix_seed(seed, stream); generation stops
/// at T. Throws ConfigError if the drawn instance fails validation.
Instance gen_instance(const ExperimentConfig& cfg, std::uint64_t stream = 0);

/// Greedy-vs-offline energy ratio on one instance plus the closed-form
/// bounds at the instance's W/D.
RatioReport measure_ratio(const Instance& inst, const PowerFunction& p,
                          int offline_cap = 14);

// Instance JSON: {"D":, "T":, "initial_aoi":, "epsilon":, "packets":[{"t":, "size":}]}
Instance read_instance_json(const std::string& path);
void write_instance_json(const Instance& inst, const std::string& path);

// trace.csv: time,aoi,deadline,event,packet_id,speed (events: gen, start,
// deliver, idle)
void write_trace_csv(const Instance& inst, const Schedule& sched, const std::string& path);

struct SweepRow {
    double param = 0.0;
    std::optional<Energy> e_greedy;
    std::optional<Energy> e_offline;
    std::optional<double> ratio;
    Energy ulb = 0.0;
    double cr_upper_bound = 0.0;
    std::string status = "ok";
};

// sweep.csv: param,e_greedy,e_offline,ratio,ulb,cr_upper,status
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

/// Dispatches one experiment, writing its outputs into cfg.out_dir.
/// Returns the process exit code: 0 ok, 2 invalid config, 3 infeasible
/// instance, 4 enumeration cap exceeded.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace aoiss
