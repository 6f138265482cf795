#pragma once

#include "invbench/hybrid.hpp"
#include "invbench/objective.hpp"
#include "invbench/optimizers.hpp"
#include "invbench/suite.hpp"
#include "invbench/transforms.hpp"

#include <json.hpp>

#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace invbench {

inline constexpr int kSchemaVersion = 1;

struct AlgorithmEntry {
    AlgorithmId id = AlgorithmId::shade;
    bool hybrid = false;
    AlgorithmParams params;
};

/// Display name used in tables: SHADE, hSHADE, PSO2011, ...
std::string algorithm_label(AlgorithmId id, bool hybrid);

struct RunConfig {
    std::vector<int> dims{10, 30, 50, 100};
    long budget_fes = 100000;
    int agents = 20;
    int runs = 30;
    std::uint64_t master_seed = 0;
    std::uint64_t suite_seed = 0;
    int checkpoints = 100;
    std::vector<int> functions;  // empty: the whole suite
    std::vector<AlgorithmEntry> algorithms;
    std::vector<TransformSpec> transformations{TransformSpec{}};
    HybridConfig hybrid;

    void validate() const;
    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

RunConfig load_config(const std::filesystem::path& path);

struct RunKey {
    std::string algorithm;  // base algorithm id, e.g. "shade"
    bool hybrid = false;
    int function = 0;
    std::string transform;  // transformation kind name
    int dim = 0;
    int run = 0;

    auto operator<=>(const RunKey&) const = default;
    bool operator==(const RunKey&) const = default;
    std::string to_string() const;
};

struct RunRecord {
    RunKey key;
    std::uint64_t seed = 0;
    std::vector<long> checkpoint_evals;
    std::vector<double> trajectory;      // best-so-far error
    std::vector<double> raw_trajectory;  // best-so-far objective value
    double final_error = 0;
    double final_value = 0;
    double optimum_value = 0;
    long evaluations_used = 0;
    long init_evals = 0;
    long step_evals = 0;
    long inject_evals = 0;
    long generations = 0;
    long short_injections = 0;  // generations whose injection stopped short of g
    bool out_of_reach = false;
    bool failed = false;

    std::string flags() const;
};

struct ResultSet {
    int schema_version = kSchemaVersion;
    nlohmann::json config;
    std::vector<RunRecord> records;
};

/// Stable 64-bit seed for a run.
///
/// FNV-1a over the byte string
///   u64 master_seed | str algorithm | u32 function | str transform | u32 dim | u32 run
/// (integers little-endian, str = u32 length + bytes), finished with splitmix64.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view algorithm, int function,
                          std::string_view transform, int dim, int run_index);

/// Checkpoint evaluation counts: multiples of ⌈budget / checkpoints⌉, the last one at budget.
std::vector<long> checkpoint_schedule(long budget, int checkpoints);

struct RunTask {
    AlgorithmEntry algorithm;
    std::shared_ptr<const ObjectiveFunction<double>> function;
    TransformSpec transform;
    int dim = 0;
    int run = 0;
    std::uint64_t seed = 0;
    std::uint64_t master_seed = 0;  // rotation matrices derive from it unless the spec pins one
    long budget = 0;
    int agents = 20;
    int checkpoints = 100;
    HybridConfig hybrid;
};

/// Optional instrumentation for a single run.
struct RunTrace {
    std::vector<Vector<double>> points;  // every evaluated point, in order
    std::vector<long> injected_per_generation;
};

RunRecord execute_run(const RunTask& task, RunTrace* trace = nullptr);

/// Expands a config into tasks (suites are built once per dim and shared).
std::vector<RunTask> plan(const RunConfig& config);

/// Worker count: INVBENCH_THREADS if set, otherwise hardware concurrency.
int default_threads();

ResultSet execute(const RunConfig& config, int threads = 0);

void write_results(const ResultSet& rs, const std::filesystem::path& dir);
ResultSet read_results(const std::filesystem::path& dir);

/// JSON manifest of a suite: id, category, formula, bias and seed per function.
nlohmann::json suite_manifest(const Suite<double>& suite);

}  // namespace invbench
