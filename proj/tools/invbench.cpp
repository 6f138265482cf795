// invbench: run the benchmark grid, analyse results, print report tables.

#include "invbench/harness.hpp"
#include "invbench/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace invbench;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void write_table(const fs::path& dir, const report::Table& t) {
    const fs::path path = dir / (t.name + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    report::write_csv(out, t);
    if (!out) throw IoError("failed while writing " + path.string());
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir) {
    const RunConfig config = load_config(config_path);
    const int threads = default_threads();
    std::cerr << "invbench: " << plan(config).size() << " runs on " << threads << " thread(s)\n";
    const ResultSet rs = execute(config, threads);
    write_results(rs, out_dir);
    for (int dim : config.dims) {
        const auto suite = make_suite<double>(config.suite_seed, dim);
        const fs::path path = out_dir / ("suite_manifest_dim" + std::to_string(dim) + ".json");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out << suite_manifest(suite).dump(1) << "\n";
    }
    std::cerr << "invbench: wrote " << rs.records.size() << " records to " << out_dir.string() << "\n";
    return 0;
}

int cmd_analyze(const fs::path& in_dir, const fs::path& out_dir, const report::AnalyzeOptions& opt) {
    const ResultSet rs = read_results(in_dir);
    const auto tables = report::analyze(rs, opt);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    for (const auto& t : tables) write_table(out_dir, t);
    std::cerr << "invbench: wrote " << tables.size() << " tables to " << out_dir.string() << "\n";
    return 0;
}

std::vector<report::Table> tables_from_results(const ResultSet& rs, const std::string& which,
                                               const report::AnalyzeOptions& opt, std::optional<int> function) {
    std::vector<report::Table> out;
    const std::vector<int> dims = opt.dim ? std::vector<int>{*opt.dim} : report::dims_in(rs);
    for (int dim : dims) {
        const report::Selection sel{dim, opt.transform};
        const std::string suffix = "_dim" + std::to_string(dim);
        const auto cube = report::collect(rs, sel);
        report::Table t;
        if (which == "summary") {
            t = report::summary_csv_table(report::summary_table(cube));
        } else if (which == "cd") {
            t = report::cd_table(report::cd_diagram_data(stats::rank_algorithms(cube.medians()), cube.labels));
        } else if (which == "bayes") {
            t = report::bayes_table(report::bayes_heatmap_data(cube, opt.rope, opt.mc_samples, opt.seed));
        } else if (which == "boxplot") {
            t = report::boxplot_table(cube);
        } else {
            for (int fn : cube.functions) {
                if (function && fn != *function) continue;
                auto c = report::convergence_table(report::convergence_data(rs, fn, sel));
                c.name += suffix + "_f" + std::to_string(fn);
                out.push_back(std::move(c));
            }
            continue;
        }
        t.name += suffix;
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<report::Table> tables_from_analysis(const fs::path& dir, const std::string& which) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() == ".csv" && name.rfind(which + "_dim", 0) == 0) files.push_back(entry.path());
    }
    if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
    if (files.empty()) throw IoError("no " + which + " tables in " + dir.string());
    std::sort(files.begin(), files.end());
    std::vector<report::Table> out;
    for (const auto& f : files) out.push_back(report::read_csv_table(f));
    return out;
}

int cmd_report(const fs::path& in_dir, const std::string& format, const std::string& which,
               const report::AnalyzeOptions& opt, std::optional<int> function) {
    const auto tables = fs::exists(in_dir / "results.csv")
                            ? tables_from_results(read_results(in_dir), which, opt, function)
                            : tables_from_analysis(in_dir, which);
    for (const auto& t : tables) {
        if (format == "md") {
            report::write_markdown(std::cout, t);
        } else {
            if (tables.size() > 1) std::cout << "# " << t.name << "\n";
            report::write_csv(std::cout, t);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"invbench: transformation-invariance benchmark for metaheuristics"};
    app.require_subcommand(1);

    fs::path config_path, run_out;
    auto* run = app.add_subcommand("run", "execute the benchmark grid described by a config");
    run->add_option("--config", config_path, "config JSON")->required();
    run->add_option("--out", run_out, "output directory")->required();

    fs::path an_in, an_out;
    report::AnalyzeOptions an_opt;
    auto* analyze = app.add_subcommand("analyze", "write summary, ranking, Bayesian, boxplot and convergence CSVs");
    analyze->add_option("--in", an_in, "directory holding results.csv")->required();
    analyze->add_option("--out", an_out, "output directory")->required();
    analyze->add_option("--dim", an_opt.dim, "restrict to one dimension");
    analyze->add_option("--rope", an_opt.rope, "region of practical equivalence")->check(CLI::NonNegativeNumber);
    analyze->add_option("--transform", an_opt.transform, "restrict to one transformation");

    fs::path rep_in;
    std::string format = "csv", which = "summary";
    report::AnalyzeOptions rep_opt;
    std::optional<int> function;
    auto* rep = app.add_subcommand("report", "print one table as CSV or Markdown");
    rep->add_option("--in", rep_in, "results or analysis directory")->required();
    rep->add_option("--format", format)->check(CLI::IsMember({"csv", "md"}));
    rep->add_option("--table", which)->check(CLI::IsMember({"summary", "cd", "bayes", "boxplot", "convergence"}));
    rep->add_option("--dim", rep_opt.dim);
    rep->add_option("--rope", rep_opt.rope)->check(CLI::NonNegativeNumber);
    rep->add_option("--transform", rep_opt.transform);
    rep->add_option("--function", function, "convergence table for one function only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(config_path, run_out);
        if (*analyze) return cmd_analyze(an_in, an_out, an_opt);
        return cmd_report(rep_in, format, which, rep_opt, function);
    } catch (const IoError& e) {
        std::cerr << "invbench: I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invbench: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NotFound& e) {
        std::cerr << "invbench: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UnsupportedK& e) {
        std::cerr << "invbench: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "invbench: error: " << e.what() << "\n";
        return 1;
    }
}
