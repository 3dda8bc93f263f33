#include "aoiss/power.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace aoiss {

PowerFunction PowerFunction::polynomial(double alpha) {
    if (!(alpha > 1.0))
        throw std::invalid_argument("polynomial power function requires alpha > 1");
    PowerFunction p;
    p.kind_ = Kind::Polynomial;
    p.alpha_ = alpha;
    return p;
}

PowerFunction PowerFunction::exponential() {
    PowerFunction p;
    p.kind_ = Kind::Exponential;
    return p;
}

PowerFunction PowerFunction::tabulated(std::vector<std::pair<Speed, Energy>> breakpoints) {
    if (breakpoints.size() < 2)
        throw std::invalid_argument("tabulated power function needs at least two breakpoints");
    if (breakpoints.front().first != 0.0 || breakpoints.front().second != 0.0)
        throw std::invalid_argument("tabulated power function must start at (0, 0)");
    double prev_slope = -1.0;
    for (size_t i = 1; i < breakpoints.size(); ++i) {
        const auto& [s0, p0] = breakpoints[i - 1];
        const auto& [s1, p1] = breakpoints[i];
        if (!(s1 > s0))
            throw std::invalid_argument("tabulated breakpoints must be strictly increasing in speed");
        if (p1 < p0)
            throw std::invalid_argument("tabulated power must be non-decreasing");
        if (p1 < 0.0)
            throw std::invalid_argument("tabulated power must be non-negative");
        const double slope = (p1 - p0) / (s1 - s0);
        if (slope < prev_slope - 1e-12 * std::max(1.0, std::abs(prev_slope)))
            throw std::invalid_argument("tabulated power function is not convex");
        prev_slope = std::max(prev_slope, slope);
    }
    PowerFunction p;
    p.kind_ = Kind::Tabulated;
    p.table_ = std::move(breakpoints);
    return p;
}

Energy PowerFunction::eval(Speed s) const {
    if (s < 0.0) throw std::domain_error("power function evaluated at negative speed");
    if (s == 0.0) return 0.0;
    switch (kind_) {
        case Kind::Polynomial:
            return std::pow(s, alpha_);
        case Kind::Exponential:
            return std::exp2(s) - 1.0;
        case Kind::Tabulated: {
            const auto it = std::lower_bound(
                table_.begin(), table_.end(), s,
                [](const std::pair<Speed, Energy>& bp, Speed v) { return bp.first < v; });
            if (it == table_.end()) {
                // extrapolate with the last chord's slope (convex extension)
                const auto& [s0, p0] = table_[table_.size() - 2];
                const auto& [s1, p1] = table_.back();
                return p1 + (p1 - p0) / (s1 - s0) * (s - s1);
            }
            if (it->first == s) return it->second;
            const auto& [s1, p1] = *it;
            const auto& [s0, p0] = *(it - 1);
            const double t = (s - s0) / (s1 - s0);
            return p0 + t * (p1 - p0);
        }
    }
    return 0.0;
}

PowerFunction PowerFunction::parse_spec(const std::string& spec) {
    if (spec == "exp") return exponential();
    if (spec.rfind("poly:alpha=", 0) == 0) {
        const std::string v = spec.substr(std::string("poly:alpha=").size());
        size_t pos = 0;
        const double alpha = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("bad alpha in power spec: " + spec);
        return polynomial(alpha);
    }
    if (spec.rfind("table:", 0) == 0) {
        const std::string path = spec.substr(std::string("table:").size());
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open power table: " + path);
        std::vector<std::pair<Speed, Energy>> bps;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            double s, p;
            if (!(ls >> s >> p))
                throw std::invalid_argument("bad power table row: " + line);
            bps.emplace_back(s, p);
        }
        auto pf = tabulated(std::move(bps));
        pf.table_path_ = path;
        return pf;
    }
    throw std::invalid_argument("unrecognized power spec: " + spec);
}

std::string PowerFunction::spec_string() const {
    switch (kind_) {
        case Kind::Polynomial: {
            std::ostringstream os;
            os << "poly:alpha=" << alpha_;
            return os.str();
        }
        case Kind::Exponential:
            return "exp";
        case Kind::Tabulated:
            return "table:" + table_path_;
    }
    return {};
}

Energy segment_energy(const PowerFunction& p, Bits w, Time y) {
    if (w < 0.0) throw std::domain_error("segment_energy: negative bit count");
    if (!(y > 0.0)) throw std::domain_error("segment_energy: window length must be positive");
    if (w == 0.0) return 0.0;
    return p.eval(w / y) * y;
}

Energy schedule_energy(const PowerFunction& p, const std::vector<Segment>& segments) {
    std::vector<const Segment*> order;
    order.reserve(segments.size());
    for (const auto& s : segments) order.push_back(&s);
    std::sort(order.begin(), order.end(),
              [](const Segment* a, const Segment* b) { return a->start < b->start; });
    Energy total = 0.0;
    const Segment* prev = nullptr;
    for (const Segment* s : order) {
        if (!(s->start < s->end))
            throw std::invalid_argument("schedule_energy: segment with non-positive duration");
        if (prev) {
            const double overlap_tol = 1e-12 * std::max(1.0, std::abs(prev->end));
            if (s->start < prev->end - overlap_tol)
                throw std::invalid_argument("schedule_energy: overlapping segments");
        }
        total += p.eval(s->speed) * s->duration();
        prev = s;
    }
    return total;
}

}  // namespace aoiss
