#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lqineq/criteria.hpp"
#include "lqineq/measure.hpp"

namespace lqineq::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode { exit_ok = 0, exit_config = 2, exit_divergent = 3, exit_solver = 4 };

struct Options {
    std::string command;
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 0;  // 0: LQINEQ_THREADS, then hardware concurrency
    bool strict = false;
};

// ---------------------------------------------------------------- config

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// validates doc against the named schema (analyze, simulate, sweep, capacity, hardy);
// returns the list of violations, empty when valid
std::vector<std::string> validate(const std::string& schema_name, const json& doc);
const json& schema(const std::string& name);

// reads, parses and validates; throws Error(config) with every violation listed
json load_config(const std::string& path, const std::string& command);

QuadratureConfig tolerances_from(const json& cfg);
Measure1D measure_from(const json& spec, const QuadratureConfig& qc);
TrialSet trials_from(const json& cfg);

// canonical serialization of the effective config (seed applied) and its hash
std::string canonical(const json& cfg);
std::string config_hash(const json& cfg);

// ---------------------------------------------------------------- reports

json to_json(const ConstantEstimate& e);
json to_json(const SideIntegral& s);
json to_json(const HardyReport& h);
json to_json(const RateFunction& r);
json measure_json(const Measure1D& mu);

// %.17g, with inf / -inf / nan spelled out
std::string num(double v);
// writes through a temporary file and renames it into place
void write_file_atomic(const std::string& path, const std::string& content);
std::string dump(const json& j);

// ---------------------------------------------------------------- commands

int run(const Options& opt);
int main_entry(int argc, char** argv);
int resolve_threads(int requested);

}  // namespace lqineq::cli
