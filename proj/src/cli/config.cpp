#include <algorithm>
#include <cmath>
#include <map>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lqineq/cli.hpp"
#include "lqineq/errors.hpp"
#include "lqineq_schemas.hpp"

namespace lqineq::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const json& schema(const std::string& name) {
    static const std::map<std::string, json> parsed = [] {
        std::map<std::string, json> m;
        for (const auto& [k, v] : embedded_schemas()) m[k] = json::parse(v);
        return m;
    }();
    auto it = parsed.find(name);
    if (it == parsed.end()) fail(ErrorCode::config, "no schema named '" + name + "'");
    return it->second;
}

namespace {

// JSON Schema subset: type, enum, required, properties, additionalProperties, items,
// minItems, maxItems, minimum, maximum, exclusiveMinimum, exclusiveMaximum, $ref
struct Validator {
    std::vector<std::string> errors;

    static bool has_type(const json& v, const std::string& t) {
        if (t == "object") return v.is_object();
        if (t == "array") return v.is_array();
        if (t == "string") return v.is_string();
        if (t == "boolean") return v.is_boolean();
        if (t == "null") return v.is_null();
        if (t == "number") return v.is_number();
        if (t == "integer") return v.is_number_integer() || (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>());
        return false;
    }

    const json& resolve(const std::string& ref) {
        auto hash = ref.find('#');
        std::string file = ref.substr(0, hash);
        std::string name = file.substr(0, file.find(".schema.json"));
        const json* node = &schema(name);
        std::string ptr = hash == std::string::npos ? "" : ref.substr(hash + 1);
        return ptr.empty() ? *node : node->at(json::json_pointer(ptr));
    }

    void check(const json& s, const json& v, const std::string& path) {
        if (s.contains("$ref")) return check(resolve(s["$ref"].get<std::string>()), v, path);
        const std::string where = path.empty() ? "<root>" : path;
        if (s.contains("type")) {
            bool ok = false;
            if (s["type"].is_array()) {
                for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
            } else {
                ok = has_type(v, s["type"].get<std::string>());
            }
            if (!ok) {
                errors.push_back(where + ": expected type " + s["type"].dump());
                return;
            }
        }
        if (s.contains("enum")) {
            bool ok = false;
            for (const auto& e : s["enum"]) ok = ok || e == v;
            if (!ok) errors.push_back(where + ": value " + v.dump() + " not in " + s["enum"].dump());
        }
        if (v.is_number()) {
            double x = v.get<double>();
            if (s.contains("minimum") && x < s["minimum"].get<double>()) errors.push_back(where + ": below minimum");
            if (s.contains("maximum") && x > s["maximum"].get<double>()) errors.push_back(where + ": above maximum");
            if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>())
                errors.push_back(where + ": must exceed " + s["exclusiveMinimum"].dump());
            if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>())
                errors.push_back(where + ": must be below " + s["exclusiveMaximum"].dump());
        }
        if (v.is_array()) {
            if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
                errors.push_back(where + ": too few items");
            if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
                errors.push_back(where + ": too many items");
            if (s.contains("items"))
                for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], path + "[" + std::to_string(i) + "]");
        }
        if (v.is_object()) {
            if (s.contains("required"))
                for (const auto& r : s["required"])
                    if (!v.contains(r.get<std::string>())) errors.push_back(where + ": missing '" + r.get<std::string>() + "'");
            const json props = s.value("properties", json::object());
            bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
            for (const auto& [k, sub] : v.items()) {
                if (props.contains(k)) check(props[k], sub, path + "/" + k);
                else if (closed) errors.push_back(where + ": unknown key '" + k + "'");
            }
        }
    }
};

}  // namespace

std::vector<std::string> validate(const std::string& schema_name, const json& doc) {
    Validator v;
    v.check(schema(schema_name), doc, "");
    return v.errors;
}

namespace {

// replaces a "csv" reference by the x/density columns it names, so the config hash covers the data
void inline_tabulated(json& spec, const std::filesystem::path& base) {
    if (!spec.is_object() || !spec.contains("csv") || !spec["csv"].is_string()) return;
    std::filesystem::path p = spec["csv"].get<std::string>();
    if (p.is_relative()) p = base / p;
    std::ifstream in(p);
    if (!in) fail(ErrorCode::config, "cannot read density table '" + p.string() + "'");
    std::vector<double> x, d;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        for (char& c : line)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream ls(line);
        double a, b;
        if (!(ls >> a >> b)) {
            if (x.empty()) continue;  // header row
            fail(ErrorCode::config, "bad row in density table '" + p.string() + "': " + line);
        }
        x.push_back(a);
        d.push_back(b);
    }
    spec.erase("csv");
    spec["x"] = x;
    spec["density"] = d;
}

}  // namespace

json load_config(const std::string& path, const std::string& command) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::config, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        fail(ErrorCode::config, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) fail(ErrorCode::config, "config must be a JSON object");
    if (!doc.contains("command")) doc["command"] = command;
    if (doc["command"] != command)
        fail(ErrorCode::config, "config is for '" + doc["command"].dump() + "', not '" + command + "'");
    auto errs = validate(command, doc);
    if (errs.empty()) {
        auto base = std::filesystem::path(path).parent_path();
        for (const char* k : {"measure", "reference"})
            if (doc.contains(k)) inline_tabulated(doc[k], base);
    }
    if (!errs.empty()) {
        std::string msg = "config violates the " + command + " schema:";
        for (const auto& e : errs) msg += "\n  " + e;
        fail(ErrorCode::config, msg);
    }
    return doc;
}

QuadratureConfig tolerances_from(const json& cfg) {
    QuadratureConfig q;
    if (!cfg.contains("tolerances")) return q;
    const json& t = cfg["tolerances"];
    q.abs_tol = t.value("abs_tol", q.abs_tol);
    q.rel_tol = t.value("rel_tol", q.rel_tol);
    q.window_step = t.value("window_step", q.window_step);
    q.far_step = t.value("far_step", q.far_step);
    q.window_cutoff = t.value("window_cutoff", q.window_cutoff);
    q.finite_cells = t.value("finite_cells", q.finite_cells);
    return q;
}

Measure1D measure_from(const json& spec, const QuadratureConfig& qc) {
    Family f = family_from_string(spec["family"].get<std::string>());
    TruncationSpec tr;
    if (spec.contains("truncation")) tr.bound = spec["truncation"].get<double>();
    if (spec.contains("truncate")) tr.bound = spec["truncate"].get<double>();
    // parameters either as a list or by name
    static const std::map<Family, std::vector<const char*>> names{
        {Family::gaussian, {"sigma"}},        {Family::exp_power, {"p"}},     {Family::heavy_tail, {"alpha"}},
        {Family::bertrand, {"alpha", "beta"}}, {Family::uniform, {"a", "b"}}, {Family::lebesgue, {"a", "b"}}};
    std::vector<double> params = spec.value("params", std::vector<double>{});
    if (auto it = names.find(f); it != names.end()) {
        std::vector<double> named;
        for (const char* n : it->second)
            if (spec.contains(n)) named.push_back(spec[n].get<double>());
        if (!named.empty()) {
            if (spec.contains("params")) fail(ErrorCode::config, "give measure parameters as a list or by name, not both");
            if (named.size() != it->second.size()) fail(ErrorCode::config, "missing a named parameter of " + spec["family"].get<std::string>());
            params = named;
        }
    }
    for (const char* n : {"sigma", "p", "alpha", "beta", "a", "b"})
        if (spec.contains(n) && (names.count(f) == 0 || std::find_if(names.at(f).begin(), names.at(f).end(), [&](const char* m) {
                                                            return std::string(m) == n;
                                                        }) == names.at(f).end()))
            fail(ErrorCode::config, std::string("'") + n + "' is not a parameter of " + spec["family"].get<std::string>());
    try {
        if (f == Family::custom_tabulated) {
            if (!spec.contains("x") || !spec.contains("density"))
                fail(ErrorCode::config, "custom_tabulated needs 'x' and 'density'");
            return Measure1D::tabulated(spec["x"].get<std::vector<double>>(), spec["density"].get<std::vector<double>>(),
                                        true, qc);
        }
        return Measure1D::build(f, params, tr, qc);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::bad_params) fail(ErrorCode::config, e.what());
        throw;
    }
}

TrialSet trials_from(const json& cfg) {
    TrialSet t;
    if (!cfg.contains("trials")) return t;
    const json& j = cfg["trials"];
    t.multistarts = j.value("multistarts", t.multistarts);
    t.max_sweeps = j.value("max_sweeps", t.max_sweeps);
    if (j.contains("families")) {
        t.families = 0;
        for (const auto& f : j["families"]) {
            std::string n = f.get<std::string>();
            if (n == "ramp_right") t.families |= trial_ramp_right;
            else if (n == "ramp_left") t.families |= trial_ramp_left;
            else if (n == "tent") t.families |= trial_tent;
            else if (n == "plateau") t.families |= trial_plateau;
            else if (n == "exponential") t.families |= trial_exponential;
        }
    }
    return t;
}

std::string canonical(const json& cfg) { return cfg.dump(); }
std::string config_hash(const json& cfg) { return hex64(fnv1a64(canonical(cfg))); }

}  // namespace lqineq::cli
