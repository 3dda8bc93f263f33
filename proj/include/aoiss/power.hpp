#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aoiss {

using Time = double;
using Bits = double;
using Speed = double;   // bits per unit time
using Energy = double;

// Relative tolerance used throughout when comparing energies.
inline constexpr double kEnergyRelTol = 1e-9;

/// One transmission piece of a schedule: a packet sent at constant speed
/// over the half-open interval [start, end).
struct Segment {
    int packet_id = -1;
    Time start = 0.0;
    Time end = 0.0;
    Speed speed = 0.0;

    Bits bits() const { return speed * (end - start); }
    Time duration() const { return end - start; }
};

/// Convex, non-decreasing rate-to-power map with P(0) = 0.
///
/// Three families: s^alpha (alpha > 1), 2^s - 1, and a user-supplied
/// piecewise-linear table. Tables are validated convex at construction so
/// the bound machinery can be exercised with arbitrary convex shapes, not
/// just the two closed forms.
class PowerFunction {
  public:
    enum class Kind { Polynomial, Exponential, Tabulated };

    static PowerFunction polynomial(double alpha);
    static PowerFunction exponential();
    // breakpoints: (speed, power) pairs, strictly increasing in speed,
    // starting at (0, 0), non-negative, non-decreasing, convex.
    static PowerFunction tabulated(std::vector<std::pair<Speed, Energy>> breakpoints);

    // Accepts "poly:alpha=<float>", "exp", "table:<csv path>".
    static PowerFunction parse_spec(const std::string& spec);

    Energy operator()(Speed s) const { return eval(s); }
    Energy eval(Speed s) const;

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    std::string spec_string() const;

  private:
    PowerFunction() = default;

    Kind kind_ = Kind::Polynomial;
    double alpha_ = 2.0;
    std::vector<std::pair<Speed, Energy>> table_;
    std::string table_path_;
};

/// Minimum energy to move w bits within a window of length y: P(w/y) * y.
Energy segment_energy(const PowerFunction& p, Bits w, Time y);

/// Total energy of a schedule; idle time costs nothing.
/// Throws std::invalid_argument if segments overlap in time.
Energy schedule_energy(const PowerFunction& p, const std::vector<Segment>& segments);

}  // namespace aoiss
