// Acceptance checks, one per criterion. `acceptance N` runs criterion N,
// `acceptance` runs all of them. Each prints a PASS/FAIL line; the exit code
// is non-zero if any selected check fails.

#include "invbench/harness.hpp"
#include "invbench/report.hpp"
#include "invbench/rotation.hpp"
#include "invbench/stats.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

using namespace invbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome nemenyi() {
    Outcome o;
    const double cd19 = stats::nemenyi_cd(19, 29);
    const double cd18 = stats::nemenyi_cd(18, 29);
    o.require(cd19 >= 5.09 && cd19 <= 5.13, "CD(19,29) = " + num(cd19) + " outside [5.09, 5.13]");
    o.require(cd18 >= 4.79 && cd18 <= 4.83, "CD(18,29) = " + num(cd18) + " outside [4.79, 4.83]");
    if (!o.pass)
        o.detail += " (for reference CD(19,30) = " + num(stats::nemenyi_cd(19, 30)) +
                    ", CD(18,30) = " + num(stats::nemenyi_cd(18, 30)) + ")";
    else
        o.detail = "CD(19,29) = " + num(cd19) + ", CD(18,29) = " + num(cd18);
    return o;
}

double enumerate_p(const std::vector<double>& ranks, double w_plus) {
    const std::size_t n = ranks.size();
    double total = 0;
    for (double r : ranks) total += r;
    const double dev = std::abs(w_plus - total / 2.0);
    std::uint64_t hits = 0;
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << n); ++m) {
        double w = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (m >> i & 1) w += ranks[i];
        if (std::abs(w - total / 2.0) >= dev - 1e-9) ++hits;
    }
    return std::min(1.0, double(hits) / double(std::uint64_t(1) << n));
}

Outcome wilcoxon() {
    Outcome o;
    long checked = 0;
    for (int n : {6, 8, 10}) {
        std::vector<std::vector<double>> magnitude_sets;
        std::vector<double> distinct, tied;
        for (int i = 0; i < n; ++i) {
            distinct.push_back(0.7 * double(i + 1));
            tied.push_back(double(1 + i / 3));
        }
        magnitude_sets = {distinct, tied};
        for (const auto& mags : magnitude_sets) {
            const auto ranks = stats::average_ranks(mags);
            for (std::uint64_t s = 0; s < (std::uint64_t(1) << n); ++s) {
                const auto len = static_cast<std::size_t>(n);
                std::vector<double> x(len), y(len, 0.0);
                for (int i = 0; i < n; ++i) x[std::size_t(i)] = (s >> i & 1) ? mags[std::size_t(i)] : -mags[std::size_t(i)];
                const auto r = stats::wilcoxon_signed_rank(x, y);
                const double oracle = enumerate_p(ranks, r.w_plus);
                if (r.p_two_sided != oracle) {
                    o.require(false, "n=" + std::to_string(n) + " pattern " + std::to_string(s) + ": " +
                                         num(r.p_two_sided) + " vs " + num(oracle));
                    return o;
                }
                ++checked;
            }
        }
    }
    o.detail = std::to_string(checked) + " sign patterns matched exactly";
    return o;
}

Outcome friedman() {
    Outcome o;
    Eigen::MatrixXd m(10, 3);
    for (Index i = 0; i < 10; ++i) m.row(i) << 0.5, 7.0, 9.0;
    const auto fr = stats::friedman(stats::rank_algorithms(m));
    o.require(std::abs(fr.chi2 - 20.0) <= 1e-9, "chi2 = " + num(fr.chi2));
    o.require(std::abs(fr.p - 4.54e-5) <= 1e-7, "p = " + num(fr.p));
    const auto tied = stats::friedman(stats::rank_algorithms(Eigen::MatrixXd::Constant(10, 3, 4.0)));
    o.require(tied.chi2 == 0.0 && tied.p == 1.0, "tied gives (" + num(tied.chi2) + ", " + num(tied.p) + ")");
    if (o.pass) o.detail = "chi2 = " + num(fr.chi2) + ", p = " + num(fr.p) + "; tied (0, 1)";
    return o;
}

Outcome vshift_invariance() {
    Outcome o;
    constexpr int dim = 10;
    constexpr long budget = 20000;
    const auto suite = make_suite<double>(1, dim);
    TransformSpec base, shifted;
    shifted.kind = TransformKind::vshift;
    shifted.c = 6.0;

    int pairs = 0;
    double worst_offset = 0, worst_err = 0;
    for (AlgorithmId id : {AlgorithmId::shade, AlgorithmId::pso2011}) {
        for (int fn : {1, 4, 11}) {
            for (int run = 0; run < 3; ++run) {
                RunTask t;
                t.algorithm = AlgorithmEntry{id, true, {}};
                t.function = std::make_shared<const ObjectiveFunction<double>>(suite.by_id(fn));
                t.dim = dim;
                t.run = run;
                t.seed = derive_seed(1, to_string(id), fn, "baseline", dim, run);
                t.master_seed = 1;
                t.budget = budget;
                t.transform = base;
                RunTask u = t;
                u.transform = shifted;

                RunTrace ta, tb;
                const auto a = execute_run(t, &ta);
                const auto b = execute_run(u, &tb);
                const std::string tag = algorithm_label(id, true) + " f" + std::to_string(fn) + " run " + std::to_string(run);
                std::size_t first_diff = 0;
                while (first_diff < std::min(ta.points.size(), tb.points.size()) &&
                       ta.points[first_diff] == tb.points[first_diff])
                    ++first_diff;
                const bool same = ta.points.size() == tb.points.size() && first_diff == ta.points.size();
                o.require(same, tag + ": point sequences diverge at evaluation " + std::to_string(first_diff));
                worst_err = std::max(worst_err, std::abs(a.final_error - b.final_error));
                o.require(std::abs(a.final_error - b.final_error) <= 1e-9,
                          tag + ": final errors differ by " + num(std::abs(a.final_error - b.final_error)));
                for (std::size_t c = 0; c < a.raw_trajectory.size(); ++c) {
                    const double off = std::abs(b.raw_trajectory[c] - a.raw_trajectory[c] - 6.0);
                    worst_offset = std::max(worst_offset, off);
                }
                ++pairs;
            }
        }
    }
    o.require(worst_offset <= 1e-9, "raw curve offset deviates from 6 by " + num(worst_offset));
    if (o.pass)
        o.detail = std::to_string(pairs) + " matched pairs identical; max |offset - 6| = " + num(worst_offset) +
                   ", max final error gap = " + num(worst_err);
    return o;
}

Outcome rotation_legality() {
    Outcome o;
    double worst = 0;
    for (Index dim : {2, 10, 30})
        for (std::uint64_t seed = 0; seed < 100; ++seed)
            worst = std::max(worst, orthonormality_error(random_rotation<double>(seed, dim)));
    o.require(worst < 1e-10, "max orthonormality error " + num(worst));
    o.detail = "max ||M^T M - I||_inf = " + num(worst);
    return o;
}

Outcome optimum_coherence() {
    Outcome o;
    const auto suite = make_suite<double>(1, 10);
    int checked = 0, skipped = 0;
    double worst = 0;
    for (TransformKind kind : {TransformKind::baseline, TransformKind::translate, TransformKind::scale,
                               TransformKind::rotate, TransformKind::vshift}) {
        TransformSpec spec;
        spec.kind = kind;
        for (const auto& f : suite.functions) {
            const auto t = spec.materialize<double>(f.id(), 10, 1);
            const auto target = transformed_optimum(t, f);
            if (target.out_of_bounds) {
                ++skipped;
                continue;
            }
            const double got = wrap(t, f)(target.location);
            const double gap = std::abs(got - target.value);
            worst = std::max(worst, gap);
            o.require(gap <= 1e-9, std::string(to_string(kind)) + " f" + std::to_string(f.id()) + " off by " + num(gap));
            ++checked;
        }
    }
    o.detail = std::to_string(checked) + " cases checked, " + std::to_string(skipped) +
               " out-of-bounds skipped, max gap " + num(worst) + (o.pass ? "" : "; " + o.detail);
    return o;
}

RunConfig grid_config() {
    RunConfig c;
    c.dims = {10};
    c.budget_fes = 20000;
    c.agents = 20;
    c.runs = 10;
    c.master_seed = 1;
    c.suite_seed = 1;
    c.checkpoints = 100;
    c.functions = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    c.algorithms = {AlgorithmEntry{AlgorithmId::shade, false, {}}, AlgorithmEntry{AlgorithmId::shade, true, {}},
                    AlgorithmEntry{AlgorithmId::pso2011, false, {}}, AlgorithmEntry{AlgorithmId::pso2011, true, {}},
                    AlgorithmEntry{AlgorithmId::random_search, false, {}}};
    TransformSpec rot;
    rot.kind = TransformKind::rotate;
    c.transformations = {TransformSpec{}, rot};
    return c;
}

Outcome qualitative() {
    Outcome o;
    const auto rs = execute(grid_config());
    std::ostringstream info;
    for (const char* tr : {"baseline", "rotate"}) {
        const auto cube = report::collect(rs, report::Selection{10, std::string(tr)});
        const auto ranks = stats::rank_algorithms(cube.medians());
        const auto fr = stats::friedman(ranks);
        const Eigen::VectorXd sum = ranks.sum_ranks();
        std::map<std::string, double> sr;
        for (std::size_t i = 0; i < cube.labels.size(); ++i) sr[cube.labels[i]] = sum(Index(i));

        info << tr << ": Friedman p = " << num(fr.p) << ", sum ranks";
        for (const auto& [l, s] : sr) info << ' ' << l << '=' << s;
        info << ". ";
        o.require(fr.p < 0.05, std::string(tr) + " Friedman p = " + num(fr.p));
        for (const auto& [l, s] : sr)
            if (l != "RS") o.require(s < sr.at("RS"), std::string(tr) + ": " + l + " does not beat RS on sum rank");
        if (std::string(tr) == "rotate")
            o.require(sr.at("hSHADE") < sr.at("hPSO2011"), "rotate: hSHADE mean rank not below hPSO2011");
    }
    o.detail = info.str() + (o.pass ? "" : "| " + o.detail);
    return o;
}

Outcome accounting() {
    Outcome o;
    const RunConfig c = grid_config();
    long runs = 0, generations = 0, truncated_last = 0;
    for (const auto& task : plan(c)) {
        RunTrace trace;
        const auto r = execute_run(task, &trace);
        ++runs;
        o.require(r.evaluations_used == c.budget_fes,
                  r.key.to_string() + " used " + std::to_string(r.evaluations_used) + " evaluations");
        o.require(r.init_evals + r.step_evals + r.inject_evals == c.budget_fes, r.key.to_string() + " accounting mismatch");
        if (!task.algorithm.hybrid) continue;
        const auto& inj = trace.injected_per_generation;
        // every generation injects g = 2; only the one that hits the budget can stop short
        for (std::size_t gi = 0; gi + 1 < inj.size(); ++gi)
            o.require(inj[gi] == 2, r.key.to_string() + " generation " + std::to_string(gi) + " injected " +
                                        std::to_string(inj[gi]));
        if (!inj.empty() && inj.back() != 2) ++truncated_last;
        generations += long(inj.size());
    }
    o.detail = std::to_string(runs) + " runs at exactly " + std::to_string(c.budget_fes) + " evaluations; " +
               std::to_string(generations) + " hybrid generations, " + std::to_string(truncated_last) +
               " final generations truncated by the budget" + (o.pass ? "" : "; " + o.detail);
    return o;
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        out[e.path().filename().string()] = s.str();
    }
    return out;
}

Outcome replay() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "invbench_acceptance_replay";
    fs::remove_all(root);
    for (int pass = 0; pass < 2; ++pass) {
        const auto rs = execute(grid_config(), pass == 0 ? 0 : 1);
        write_results(rs, root / ("raw" + std::to_string(pass)));
        const auto tables = report::analyze(read_results(root / ("raw" + std::to_string(pass))), {});
        const fs::path an = root / ("analysis" + std::to_string(pass));
        fs::create_directories(an);
        for (const auto& t : tables) {
            std::ofstream out(an / (t.name + ".csv"), std::ios::binary);
            report::write_csv(out, t);
        }
    }
    const auto raw0 = directory_bytes(root / "raw0"), raw1 = directory_bytes(root / "raw1");
    const auto an0 = directory_bytes(root / "analysis0"), an1 = directory_bytes(root / "analysis1");
    o.require(raw0.at("results.csv") == raw1.at("results.csv"), "results.csv differs");
    o.require(raw0 == raw1, "raw output files differ");
    o.require(an0 == an1, "analysis CSVs differ");
    o.detail = std::to_string(raw0.size()) + " raw and " + std::to_string(an0.size()) + " analysis files compared" +
               (o.pass ? ", all byte-identical" : "; " + o.detail);
    return o;
}

Outcome bayes() {
    Outcome o;
    const std::vector<double> up(29, 100.0), zero(29, 0.0);
    const auto a = stats::bayes_signed_rank(up, 10.0);
    const auto b = stats::bayes_signed_rank(zero, 10.0);
    o.require(a.p_right >= 0.99, "all +100 gives p_right = " + num(a.p_right));
    o.require(b.p_rope >= 0.99, "all 0 gives p_rope = " + num(b.p_rope));
    for (const auto& r : {a, b})
        o.require(std::abs(r.p_left + r.p_rope + r.p_right - 1.0) <= 1e-9, "probabilities do not sum to 1");
    if (o.pass) o.detail = "p_right = " + num(a.p_right) + ", p_rope = " + num(b.p_rope);
    return o;
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>> kCriteria = {
    {1, {"Nemenyi critical difference", nemenyi}},
    {2, {"Wilcoxon exact enumeration", wilcoxon}},
    {3, {"Friedman closed form", friedman}},
    {4, {"vertical-shift invariance", vshift_invariance}},
    {5, {"rotation legality", rotation_legality}},
    {6, {"transformed-optimum coherence", optimum_coherence}},
    {7, {"desk-scale qualitative ranking", qualitative}},
    {8, {"hybrid-operator accounting", accounting}},
    {9, {"replay determinism", replay}},
    {10, {"Bayesian sanity", bayes}},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (const auto& [k, v] : kCriteria) selected.push_back(k);

    int failures = 0;
    for (int k : selected) {
        auto it = kCriteria.find(k);
        if (it == kCriteria.end()) {
            std::cerr << "unknown criterion " << k << "\n";
            return 2;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = it->second.second();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << it->second.first << ", "
                  << num(secs) << " s): " << out.detail << std::endl;
        failures += !out.pass;
    }
    return failures ? 1 : 0;
}
