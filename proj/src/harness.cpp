#include "invbench/harness.hpp"

#include "invbench/csv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace invbench {

namespace fs = std::filesystem;
using nlohmann::json;

std::string algorithm_label(AlgorithmId id, bool hybrid) {
    std::string base;
    switch (id) {
        case AlgorithmId::random_search: base = "RS"; break;
        case AlgorithmId::de_rand_1_bin: base = "DE"; break;
        case AlgorithmId::shade: base = "SHADE"; break;
        case AlgorithmId::pso2011: base = "PSO2011"; break;
    }
    return hybrid ? "h" + base : base;
}

// ---------------------------------------------------------------------------
// config

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw InvalidConfig(std::string("config key '") + key + "': " + e.what());
    }
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw InvalidConfig("unknown key '" + it.key() + "' in " + std::string(where));
}

AlgorithmParams parse_overrides(AlgorithmId id, const json& o) {
    AlgorithmParams p;
    if (!o.is_object()) throw InvalidConfig("algorithm overrides must be an object");
    switch (id) {
        case AlgorithmId::de_rand_1_bin:
            reject_unknown(o, {"F", "CR"}, "de_rand_1_bin overrides");
            p.de_f = get_or(o, "F", p.de_f);
            p.de_cr = get_or(o, "CR", p.de_cr);
            break;
        case AlgorithmId::shade:
            reject_unknown(o, {"memory", "p"}, "shade overrides");
            p.shade_memory = get_or(o, "memory", p.shade_memory);
            p.shade_p = get_or(o, "p", p.shade_p);
            break;
        case AlgorithmId::pso2011:
            reject_unknown(o, {"w", "c", "informants"}, "pso2011 overrides");
            p.pso_w = get_or(o, "w", p.pso_w);
            p.pso_c = get_or(o, "c", p.pso_c);
            p.pso_informants = get_or(o, "informants", p.pso_informants);
            break;
        case AlgorithmId::random_search:
            reject_unknown(o, {}, "random_search overrides");
            break;
    }
    return p;
}

json overrides_json(const AlgorithmEntry& a) {
    const AlgorithmParams& p = a.params;
    switch (a.id) {
        case AlgorithmId::de_rand_1_bin: return {{"F", p.de_f}, {"CR", p.de_cr}};
        case AlgorithmId::shade: return {{"memory", p.shade_memory}, {"p", p.shade_p}};
        case AlgorithmId::pso2011: return {{"w", p.pso_w}, {"c", p.pso_c}, {"informants", p.pso_informants}};
        case AlgorithmId::random_search: return json::object();
    }
    return json::object();
}

}  // namespace

void RunConfig::validate() const {
    if (dims.empty()) throw InvalidConfig("dims must not be empty");
    for (int d : dims)
        if (d < 2) throw InvalidConfig("every dim must be >= 2");
    if (agents < 1) throw InvalidConfig("agents must be positive");
    if (budget_fes < agents) throw InvalidConfig("budget_fes must be >= agents");
    if (checkpoints < 2) throw InvalidConfig("checkpoints must be >= 2");
    if (runs < 1) throw InvalidConfig("runs must be >= 1");
    if (algorithms.empty()) throw InvalidConfig("algorithms must not be empty");
    if (transformations.empty()) throw InvalidConfig("transformations must not be empty");

    std::set<std::pair<AlgorithmId, bool>> seen_alg;
    for (const auto& a : algorithms) {
        if (!seen_alg.insert({a.id, a.hybrid}).second)
            throw InvalidConfig("duplicate algorithm entry " + algorithm_label(a.id, a.hybrid));
        if ((a.id == AlgorithmId::de_rand_1_bin || a.id == AlgorithmId::shade) && agents < 4)
            throw InvalidConfig("DE variants need at least 4 agents");
        if (a.hybrid) hybrid.replacement_count(agents);
    }
    std::set<TransformKind> seen_t;
    for (const auto& t : transformations) {
        if (!seen_t.insert(t.kind).second)
            throw InvalidConfig("duplicate transformation kind " + std::string(to_string(t.kind)));
        if (t.kind == TransformKind::scale && t.alpha == 0.0) throw InvalidConfig("scale alpha must be non-zero");
    }
    std::set<int> seen_f;
    for (int f : functions) {
        if (f < 1 || f > kSuiteSize) throw InvalidConfig("function id out of range: " + std::to_string(f));
        if (!seen_f.insert(f).second) throw InvalidConfig("duplicate function id " + std::to_string(f));
    }
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw InvalidConfig("config must be a JSON object");
    reject_unknown(j,
                   {"dims", "budget_fes", "agents", "runs", "master_seed", "suite_seed", "checkpoints", "functions",
                    "algorithms", "transformations", "hybrid"},
                   "config");
    RunConfig c;
    c.dims = get_or(j, "dims", c.dims);
    c.budget_fes = get_or(j, "budget_fes", c.budget_fes);
    c.agents = get_or(j, "agents", c.agents);
    c.runs = get_or(j, "runs", c.runs);
    c.master_seed = get_or(j, "master_seed", c.master_seed);
    c.suite_seed = get_or(j, "suite_seed", c.suite_seed);
    c.checkpoints = get_or(j, "checkpoints", c.checkpoints);
    c.functions = get_or(j, "functions", c.functions);

    bool hybrid_default = false;
    if (auto it = j.find("hybrid"); it != j.end()) {
        reject_unknown(*it, {"enabled", "fraction", "gamma", "sigma"}, "hybrid");
        hybrid_default = get_or(*it, "enabled", false);
        c.hybrid.replacement_fraction = get_or(*it, "fraction", c.hybrid.replacement_fraction);
        c.hybrid.gamma = get_or(*it, "gamma", c.hybrid.gamma);
        c.hybrid.perturbation_sigma = get_or(*it, "sigma", c.hybrid.perturbation_sigma);
    }

    if (auto it = j.find("algorithms"); it != j.end()) {
        if (!it->is_array()) throw InvalidConfig("algorithms must be an array");
        for (const auto& a : *it) {
            AlgorithmEntry e;
            if (a.is_string()) {
                e.id = parse_algorithm(a.get<std::string>());
                e.hybrid = hybrid_default;
            } else if (a.is_object()) {
                reject_unknown(a, {"id", "hybrid", "overrides"}, "algorithm entry");
                e.id = parse_algorithm(get_or<std::string>(a, "id", ""));
                e.hybrid = get_or(a, "hybrid", hybrid_default);
                if (auto o = a.find("overrides"); o != a.end()) e.params = parse_overrides(e.id, *o);
            } else {
                throw InvalidConfig("algorithm entries must be strings or objects");
            }
            c.algorithms.push_back(e);
        }
    }

    if (auto it = j.find("transformations"); it != j.end()) {
        if (!it->is_array()) throw InvalidConfig("transformations must be an array");
        c.transformations.clear();
        for (const auto& t : *it) {
            if (!t.is_object()) throw InvalidConfig("transformation entries must be objects");
            reject_unknown(t, {"kind", "a", "alpha", "c", "rotation_seed"}, "transformation");
            TransformSpec s;
            s.kind = parse_transform_kind(get_or<std::string>(t, "kind", ""));
            s.a = get_or(t, "a", s.a);
            s.alpha = get_or(t, "alpha", s.alpha);
            s.c = get_or(t, "c", s.c);
            if (t.contains("rotation_seed")) s.rotation_seed = get_or<std::uint64_t>(t, "rotation_seed", 0);
            c.transformations.push_back(s);
        }
    }
    c.validate();
    return c;
}

json RunConfig::to_json() const {
    json algs = json::array();
    for (const auto& a : algorithms)
        algs.push_back({{"id", std::string(to_string(a.id))}, {"hybrid", a.hybrid}, {"overrides", overrides_json(a)}});
    json ts = json::array();
    for (const auto& t : transformations) {
        json o = {{"kind", std::string(to_string(t.kind))}};
        switch (t.kind) {
            case TransformKind::translate: o["a"] = t.a; break;
            case TransformKind::scale: o["alpha"] = t.alpha; break;
            case TransformKind::vshift: o["c"] = t.c; break;
            case TransformKind::rotate:
                if (t.rotation_seed) o["rotation_seed"] = *t.rotation_seed;
                break;
            case TransformKind::baseline: break;
        }
        ts.push_back(o);
    }
    return {
        {"dims", dims},
        {"budget_fes", budget_fes},
        {"agents", agents},
        {"runs", runs},
        {"master_seed", master_seed},
        {"suite_seed", suite_seed},
        {"checkpoints", checkpoints},
        {"functions", functions},
        {"algorithms", algs},
        {"transformations", ts},
        {"hybrid",
         {{"fraction", hybrid.replacement_fraction}, {"gamma", hybrid.gamma}, {"sigma", hybrid.perturbation_sigma}}},
    };
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidConfig("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return RunConfig::from_json(j);
}

// ---------------------------------------------------------------------------
// keys and seeds

std::string RunKey::to_string() const {
    std::ostringstream s;
    s << algorithm << '|' << (hybrid ? 1 : 0) << '|' << function << '|' << transform << '|' << dim << '|' << run;
    return s.str();
}

std::string RunRecord::flags() const {
    std::string f;
    if (out_of_reach) f = "out_of_reach";
    if (failed) f += f.empty() ? "failed" : "|failed";
    return f;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view algorithm, int function,
                          std::string_view transform, int dim, int run_index) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto byte = [&](unsigned char b) {
        h ^= b;
        h *= 0x100000001b3ULL;
    };
    auto u64 = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));
    };
    auto u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));
    };
    auto str = [&](std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        for (char c : s) byte(static_cast<unsigned char>(c));
    };
    u64(master_seed);
    str(algorithm);
    u32(static_cast<std::uint32_t>(function));
    str(transform);
    u32(static_cast<std::uint32_t>(dim));
    u32(static_cast<std::uint32_t>(run_index));
    return mix_seed(h, 0);
}

std::vector<long> checkpoint_schedule(long budget, int checkpoints) {
    if (budget < 1 || checkpoints < 1) throw std::invalid_argument("checkpoint_schedule: non-positive input");
    const long interval = (budget + checkpoints - 1) / checkpoints;
    std::vector<long> out;
    for (long e = interval; e < budget; e += interval) out.push_back(e);
    out.push_back(budget);
    return out;
}

// ---------------------------------------------------------------------------
// single run

namespace {

/// Counts evaluations, tracks best-so-far and samples it at checkpoints.
class EvaluationMeter {
public:
    EvaluationMeter(Objective<double> inner, long budget, std::vector<long> schedule, RunTrace* trace)
        : inner_(std::move(inner)), budget_(budget), schedule_(std::move(schedule)), trace_(trace) {
        samples_.reserve(schedule_.size());
    }

    Objective<double> objective() {
        return Objective<double>(inner_.dim(), [this](const Vector<double>& x) { return call(x); });
    }

    long count() const { return count_; }
    long remaining() const { return budget_ - count_; }
    double best() const { return best_; }
    const std::vector<long>& schedule() const { return schedule_; }
    const std::vector<double>& samples() const { return samples_; }

private:
    double call(const Vector<double>& x) {
        if (count_ >= budget_) throw std::logic_error("evaluation requested beyond the budget");
        const double v = inner_(x);
        if (!std::isfinite(v)) throw NonFiniteObjective("objective returned a non-finite value");
        ++count_;
        if (trace_) trace_->points.push_back(x);
        if (count_ == 1 || v < best_) best_ = v;
        if (next_ < schedule_.size() && count_ == schedule_[next_]) {
            samples_.push_back(best_);
            ++next_;
        }
        return v;
    }

    Objective<double> inner_;
    long budget_;
    std::vector<long> schedule_;
    RunTrace* trace_;
    std::vector<double> samples_;
    std::size_t next_ = 0;
    long count_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

RunRecord execute_run(const RunTask& task, RunTrace* trace) {
    if (!task.function) throw std::invalid_argument("run task has no objective");
    if (task.budget < task.agents) throw InvalidConfig("budget must cover the initial population");
    const auto& f = *task.function;

    RunRecord rec;
    rec.key = {std::string(to_string(task.algorithm.id)), task.algorithm.hybrid, f.id(),
               std::string(to_string(task.transform.kind)), task.dim, task.run};
    rec.seed = task.seed;

    const auto t = task.transform.materialize<double>(f.id(), f.dim(), task.master_seed);
    const auto target = transformed_optimum(t, f);
    rec.optimum_value = target.value;
    rec.out_of_reach = target.out_of_bounds;

    EvaluationMeter meter(wrap(t, f), task.budget, checkpoint_schedule(task.budget, task.checkpoints), trace);
    const Objective<double> obj = meter.objective();

    const Index g = task.algorithm.hybrid ? task.hybrid.replacement_count(task.agents) : 0;
    auto opt = make_optimizer<double>(task.algorithm.id, f.bounds(), f.dim(), task.agents, task.seed,
                                      task.algorithm.params);
    try {
        rec.init_evals = opt->initialize(obj);
        while (meter.remaining() > 0) {
            rec.step_evals += opt->step(obj, meter.remaining());
            ++rec.generations;
            if (!task.algorithm.hybrid) continue;
            const long used = meter.remaining() > 0 ? inject(*opt, obj, task.hybrid, meter.remaining()).evaluations_used : 0;
            rec.inject_evals += used;
            if (used < g) ++rec.short_injections;
            if (trace) trace->injected_per_generation.push_back(used);
        }
    } catch (const NonFiniteObjective&) {
        rec.failed = true;
    }

    rec.evaluations_used = meter.count();
    rec.checkpoint_evals = meter.schedule();
    rec.raw_trajectory = meter.samples();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    // A failed run keeps the checkpoints it reached; the rest are NaN.
    rec.raw_trajectory.resize(rec.checkpoint_evals.size(), nan);
    rec.trajectory.resize(rec.raw_trajectory.size());
    for (std::size_t i = 0; i < rec.raw_trajectory.size(); ++i)
        rec.trajectory[i] = rec.raw_trajectory[i] - rec.optimum_value;
    rec.final_value = rec.failed ? nan : meter.best();
    rec.final_error = rec.failed ? nan : rec.trajectory.back();
    return rec;
}

// ---------------------------------------------------------------------------
// grid

std::vector<RunTask> plan(const RunConfig& config) {
    config.validate();
    std::vector<RunTask> tasks;
    for (int dim : config.dims) {
        auto suite = make_suite<double>(config.suite_seed, dim);
        std::vector<std::shared_ptr<const ObjectiveFunction<double>>> fns;
        if (config.functions.empty()) {
            for (const auto& f : suite.functions) fns.push_back(std::make_shared<const ObjectiveFunction<double>>(f));
        } else {
            for (int id : config.functions) fns.push_back(std::make_shared<const ObjectiveFunction<double>>(suite.by_id(id)));
        }
        for (const auto& alg : config.algorithms)
            for (const auto& fn : fns)
                for (const auto& t : config.transformations)
                    for (int run = 0; run < config.runs; ++run) {
                        RunTask task;
                        task.algorithm = alg;
                        task.function = fn;
                        task.transform = t;
                        task.dim = dim;
                        task.run = run;
                        task.seed = derive_seed(config.master_seed, to_string(alg.id), fn->id(), to_string(t.kind),
                                                dim, run);
                        task.master_seed = config.master_seed;
                        task.budget = config.budget_fes;
                        task.agents = config.agents;
                        task.checkpoints = config.checkpoints;
                        task.hybrid = config.hybrid;
                        tasks.push_back(std::move(task));
                    }
    }
    return tasks;
}

int default_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("INVBENCH_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) return std::min(cap, hw);
    }
    return hw;
}

ResultSet execute(const RunConfig& config, int threads) {
    const auto tasks = plan(config);
    ResultSet rs;
    rs.config = config.to_json();
    rs.records.resize(tasks.size());

    const int workers = std::max(1, std::min<int>(threads > 0 ? threads : default_threads(), int(tasks.size())));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                rs.records[i] = execute_run(tasks[i]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = tasks.size();
                return;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);

    std::sort(rs.records.begin(), rs.records.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.key < b.key; });
    return rs;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

const std::vector<std::string> kCsvHeader = {"algorithm", "hybrid", "function", "transform", "dim", "run",
                                             "seed",      "final_error", "final_value", "evals", "flags"};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_number_or_null(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace

void write_results(const ResultSet& rs, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    std::ostringstream csv_out;
    csv::write_row(csv_out, kCsvHeader);
    for (const auto& r : rs.records) {
        csv::write_row(csv_out, {r.key.algorithm, r.key.hybrid ? "1" : "0", std::to_string(r.key.function),
                                 r.key.transform, std::to_string(r.key.dim), std::to_string(r.key.run),
                                 std::to_string(r.seed), csv::format_double(r.final_error),
                                 csv::format_double(r.final_value), std::to_string(r.evaluations_used), r.flags()});
    }
    write_file(dir / "results.csv", csv_out.str());

    json records = json::array();
    for (const auto& r : rs.records) {
        json err = json::array(), raw = json::array();
        for (double v : r.trajectory) err.push_back(number_or_null(v));
        for (double v : r.raw_trajectory) raw.push_back(number_or_null(v));
        records.push_back({
            {"key", r.key.to_string()},
            {"checkpoint_evals", r.checkpoint_evals},
            {"error", err},
            {"value", raw},
            {"optimum_value", r.optimum_value},
            {"accounting",
             {{"init", r.init_evals},
              {"step", r.step_evals},
              {"inject", r.inject_evals},
              {"generations", r.generations},
              {"short_injections", r.short_injections}}},
        });
    }
    const json doc = {{"schema_version", rs.schema_version}, {"config", rs.config}, {"records", records}};
    write_file(dir / "trajectories.json", doc.dump(1) + "\n");
}

ResultSet read_results(const fs::path& dir) {
    std::ifstream csv_in(dir / "results.csv", std::ios::binary);
    if (!csv_in) throw IoError("cannot open " + (dir / "results.csv").string());
    std::ifstream json_in(dir / "trajectories.json");
    if (!json_in) throw IoError("cannot open " + (dir / "trajectories.json").string());

    const auto rows = csv::parse(csv_in);
    if (rows.empty() || rows.front() != kCsvHeader) throw IoError("results.csv has an unexpected header");

    json doc;
    try {
        doc = json::parse(json_in);
    } catch (const json::exception& e) {
        throw IoError(std::string("trajectories.json is not valid JSON: ") + e.what());
    }

    ResultSet rs;
    rs.schema_version = doc.value("schema_version", 0);
    if (rs.schema_version != kSchemaVersion)
        throw IoError("unsupported result schema version " + std::to_string(rs.schema_version));
    rs.config = doc.at("config");

    std::map<std::string, const json*> by_key;
    for (const auto& r : doc.at("records")) by_key[r.at("key").get<std::string>()] = &r;

    try {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() != kCsvHeader.size()) throw IoError("results.csv row " + std::to_string(i) + " is malformed");
            RunRecord r;
            r.key = {row[0], row[1] == "1", std::stoi(row[2]), row[3], std::stoi(row[4]), std::stoi(row[5])};
            r.seed = std::stoull(row[6]);
            r.final_error = std::stod(row[7]);
            r.final_value = std::stod(row[8]);
            r.evaluations_used = std::stol(row[9]);
            r.out_of_reach = row[10].find("out_of_reach") != std::string::npos;
            r.failed = row[10].find("failed") != std::string::npos;

            auto it = by_key.find(r.key.to_string());
            if (it == by_key.end()) throw IoError("no trajectory for run " + r.key.to_string());
            const json& t = *it->second;
            r.checkpoint_evals = t.at("checkpoint_evals").get<std::vector<long>>();
            for (const auto& v : t.at("error")) r.trajectory.push_back(from_number_or_null(v));
            for (const auto& v : t.at("value")) r.raw_trajectory.push_back(from_number_or_null(v));
            r.optimum_value = t.at("optimum_value").get<double>();
            const json& acc = t.at("accounting");
            r.init_evals = acc.at("init").get<long>();
            r.step_evals = acc.at("step").get<long>();
            r.inject_evals = acc.at("inject").get<long>();
            r.generations = acc.at("generations").get<long>();
            r.short_injections = acc.at("short_injections").get<long>();
            rs.records.push_back(std::move(r));
        }
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {  // stoi/stod and json type errors
        throw IoError(std::string("malformed result files: ") + e.what());
    }
    return rs;
}

json suite_manifest(const Suite<double>& suite) {
    json fns = json::array();
    for (const auto& f : suite.functions)
        fns.push_back({{"id", f.id()},
                       {"category", std::string(to_string(f.category()))},
                       {"formula", f.formula()},
                       {"bias", f.bias()},
                       {"seed", suite.seed}});
    return {{"seed", suite.seed}, {"dim", suite.dim}, {"functions", fns}};
}

}  // namespace invbench
