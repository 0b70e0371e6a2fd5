#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lqineq/cli.hpp"
#include "lqineq/errors.hpp"

namespace lqineq::cli {

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::config, "cannot write '" + tmp + "'");
        out << content;
        if (!out) fail(ErrorCode::config, "short write to '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

json to_json(const ConstantEstimate& e) {
    return {{"name", to_string(e.name)},
            {"q", e.q},
            {"lower", opt(e.lower)},
            {"upper", opt(e.upper)},
            {"provenance_lower", e.provenance_lower},
            {"provenance_upper", e.provenance_upper},
            {"diagnostics", e.diagnostics}};
}

json to_json(const SideIntegral& s) {
    json windows = json::array();
    for (const auto& w : s.windows)
        windows.push_back({{"level", w.level}, {"lo", w.lo}, {"hi", w.hi}, {"log_sum", finite_or_null(w.log_sum)},
                           {"complete", w.complete}});
    return {{"divergent", s.divergent},
            {"log_value", finite_or_null(s.log_value)},
            {"value", s.divergent ? json(nullptr) : json(std::exp(s.log_value))},
            {"quad_rel_error", s.quad_rel_error},
            {"geometric", s.series.geometric},
            {"decay_exponent", s.series.decay_exponent},
            {"log_tail_estimate", finite_or_null(s.series.log_tail_estimate)},
            {"diagnostic", s.series.diagnostic},
            {"windows", windows}};
}

json to_json(const HardyReport& h) {
    return {{"kind", to_string(h.kind)},
            {"q", h.q},
            {"verdict", to_string(h.verdict)},
            {"right", to_json(h.right)},
            {"left", to_json(h.left)}};
}

json to_json(const RateFunction& r) {
    return {{"kind", to_string(r.kind)},
            {"samples", r.s.size()},
            {"s_min_resolved", r.s_min_resolved},
            {"monotone", r.monotone},
            {"envelope_deviation", r.envelope_deviation}};
}

json measure_json(const Measure1D& mu) {
    Interval sp = mu.support(), w = mu.window();
    return {{"family", to_string(mu.family())},
            {"params", mu.params()},
            {"probability", mu.is_probability()},
            {"support", {finite_or_null(sp.lo), finite_or_null(sp.hi)}},
            {"window", {w.lo, w.hi}},
            {"Z", mu.Z()},
            {"median", mu.is_probability() ? json(mu.median()) : json(nullptr)},
            {"truncation_mass", mu.truncation_mass()}};
}

}  // namespace lqineq::cli
