#include "invbench/report.hpp"

#include "invbench/csv.hpp"
#include "invbench/suite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace invbench::report {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string entry_label(const RunKey& k, const Selection& sel) {
    std::string label = algorithm_label(parse_algorithm(k.algorithm), k.hybrid);
    if (!sel.transform && k.transform != "baseline") label += "_" + k.transform;
    return label;
}

bool selected(const RunKey& k, const Selection& sel) {
    return k.dim == sel.dim && (!sel.transform || k.transform == *sel.transform);
}

void require_dim(const ResultSet& rs, const Selection& sel) {
    const bool any = std::any_of(rs.records.begin(), rs.records.end(),
                                 [&](const RunRecord& r) { return selected(r.key, sel); });
    if (!any) {
        std::string what = "no records for dim " + std::to_string(sel.dim);
        if (sel.transform) what += " and transform " + *sel.transform;
        throw NotFound(what);
    }
}

std::vector<double> finite_only(const std::vector<double>& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v)
        if (std::isfinite(x)) out.push_back(x);
    return out;
}

double median_or_nan(const std::vector<double>& v) {
    const auto f = finite_only(v);
    return f.empty() ? kNaN : stats::median(f);
}

std::string fmt(double v) { return csv::format_double(v); }

}  // namespace

Eigen::MatrixXd ErrorCube::medians() const {
    Eigen::MatrixXd m(Index(functions.size()), Index(labels.size()));
    for (std::size_t e = 0; e < labels.size(); ++e)
        for (std::size_t f = 0; f < functions.size(); ++f) m(Index(f), Index(e)) = median_or_nan(errors[e][f]);
    return m;
}

std::vector<int> dims_in(const ResultSet& rs) {
    std::set<int> dims;
    for (const auto& r : rs.records) dims.insert(r.key.dim);
    return {dims.begin(), dims.end()};
}

ErrorCube collect(const ResultSet& rs, const Selection& sel) {
    require_dim(rs, sel);
    // label -> function -> run -> error; std::map keeps everything ordered
    std::map<std::string, std::map<int, std::map<int, double>>> grouped;
    std::set<int> fns;
    for (const auto& r : rs.records) {
        if (!selected(r.key, sel)) continue;
        fns.insert(r.key.function);
        grouped[entry_label(r.key, sel)][r.key.function][r.key.run] = r.failed ? kNaN : r.final_error;
    }

    ErrorCube cube;
    cube.functions.assign(fns.begin(), fns.end());
    for (const auto& [label, by_fn] : grouped) {
        cube.labels.push_back(label);
        auto& per_fn = cube.errors.emplace_back();
        for (int fn : cube.functions) {
            auto& runs = per_fn.emplace_back();
            auto it = by_fn.find(fn);
            if (it == by_fn.end()) continue;
            for (const auto& [run, err] : it->second) runs.push_back(err);
        }
    }
    return cube;
}

// ---------------------------------------------------------------------------
// summary

std::vector<SummaryRow> summary_table(const ResultSet& rs, const Selection& sel) {
    return summary_table(collect(rs, sel));
}

std::vector<SummaryRow> summary_table(const ErrorCube& cube) {
    const std::size_t k = cube.labels.size();
    const std::size_t n = cube.functions.size();
    const Eigen::MatrixXd med = cube.medians();

    Eigen::VectorXd sum_ranks;
    if (k >= 2) {
        sum_ranks = stats::rank_algorithms(med).sum_ranks();
    } else {
        sum_ranks = Eigen::VectorXd::Constant(Index(k), double(n));
    }

    std::vector<SummaryRow> rows(k);
    for (std::size_t e = 0; e < k; ++e) {
        SummaryRow& row = rows[e];
        row.label = cube.labels[e];
        std::vector<double> fn_means, fn_medians;
        for (std::size_t f = 0; f < n; ++f) {
            const auto runs = finite_only(cube.errors[e][f]);
            if (runs.empty()) continue;
            const auto d = stats::descriptive(runs);
            fn_means.push_back(d.mean);
            fn_medians.push_back(d.median);
        }
        if (!fn_means.empty()) {
            const auto over_means = stats::descriptive(fn_means);
            row.mean = over_means.mean;
            row.std = over_means.std;
            row.median = stats::median(fn_medians);
        } else {
            row.mean = row.median = row.std = kNaN;
        }
        row.sum_rank = sum_ranks(Index(e));
        row.mean_rank = n ? row.sum_rank / double(n) : 0.0;

        std::vector<double> pvals;
        for (std::size_t o = 0; o < k; ++o) {
            if (o == e) continue;
            for (std::size_t f = 0; f < n; ++f) {
                // pair runs by index; failed runs drop the pair
                const auto& a = cube.errors[e][f];
                const auto& b = cube.errors[o][f];
                std::vector<double> x, y;
                for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
                    if (std::isfinite(a[i]) && std::isfinite(b[i])) {
                        x.push_back(a[i]);
                        y.push_back(b[i]);
                    }
                }
                const auto w = stats::wilcoxon_signed_rank(x, y);
                if (w.p_two_sided < kSignificance) {
                    if (w.direction() < 0) ++row.wins;
                    if (w.direction() > 0) ++row.losses;
                }
            }
            std::vector<double> x, y;
            for (std::size_t f = 0; f < n; ++f) {
                if (std::isfinite(med(Index(f), Index(e))) && std::isfinite(med(Index(f), Index(o)))) {
                    x.push_back(med(Index(f), Index(e)));
                    y.push_back(med(Index(f), Index(o)));
                }
            }
            pvals.push_back(stats::wilcoxon_signed_rank(x, y).p_two_sided);
        }
        row.p_summary = pvals.empty() ? 1.0 : stats::median(pvals);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// critical difference

CdGroupData cd_diagram_data(const stats::RankMatrix& ranks, const std::vector<std::string>& labels) {
    const Index k = ranks.k();
    if (Index(labels.size()) != k) throw std::invalid_argument("label count does not match rank matrix");
    CdGroupData out;
    out.cd = stats::nemenyi_cd(int(k), int(ranks.n()));

    const Eigen::VectorXd mr = ranks.mean_ranks();
    for (Index i = 0; i < k; ++i) out.ranking.emplace_back(labels[std::size_t(i)], mr(i));
    std::stable_sort(out.ranking.begin(), out.ranking.end(), [](const auto& a, const auto& b) {
        return a.second < b.second || (a.second == b.second && a.first < b.first);
    });

    constexpr double tol = 1e-12;
    std::size_t last_end = 0;
    bool have_group = false;
    for (std::size_t i = 0; i < out.ranking.size(); ++i) {
        std::size_t j = i;
        while (j + 1 < out.ranking.size() && out.ranking[j + 1].second - out.ranking[i].second <= out.cd + tol) ++j;
        if (have_group && j <= last_end) continue;
        std::vector<std::string> group;
        for (std::size_t m = i; m <= j; ++m) group.push_back(out.ranking[m].first);
        out.groups.push_back(std::move(group));
        last_end = j;
        have_group = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// bayes

BayesMatrix bayes_heatmap_data(const ResultSet& rs, const Selection& sel, double rope, int mc_samples,
                               std::uint64_t seed) {
    return bayes_heatmap_data(collect(rs, sel), rope, mc_samples, seed);
}

BayesMatrix bayes_heatmap_data(const ErrorCube& cube, double rope, int mc_samples, std::uint64_t seed) {
    const std::size_t k = cube.labels.size();
    if (k < 2) throw std::invalid_argument("Bayesian comparison needs at least two entries");
    const Eigen::MatrixXd med = cube.medians();

    BayesMatrix out;
    out.labels = cube.labels;
    out.cells.assign(k, std::vector<std::optional<stats::BayesResult>>(k));
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            // positive diff: a has the lower error
            std::vector<double> diffs;
            for (Index f = 0; f < med.rows(); ++f) {
                const double d = med(f, Index(b)) - med(f, Index(a));
                if (std::isfinite(d)) diffs.push_back(d);
            }
            const auto r = stats::bayes_signed_rank(diffs, rope, mc_samples, mix_seed(seed, a * k + b));
            out.cells[a][b] = r;
            stats::BayesResult mirrored = r;
            std::swap(mirrored.p_left, mirrored.p_right);
            out.cells[b][a] = mirrored;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// boxplot / convergence

BoxplotData boxplot_data(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("boxplot needs at least one sample");
    BoxplotData b;
    b.median = stats::quantile(samples, 0.5);
    b.q1 = stats::quantile(samples, 0.25);
    b.q3 = stats::quantile(samples, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    bool low_set = false;
    for (double v : sorted) {
        if (v < lo_fence || v > hi_fence) {
            b.outliers.push_back(v);
            continue;
        }
        if (!low_set) {
            b.whisker_low = v;
            low_set = true;
        }
        b.whisker_high = v;
    }
    return b;
}

std::vector<ConvergenceSeries> convergence_data(const ResultSet& rs, int function, const Selection& sel,
                                                bool raw_values) {
    require_dim(rs, sel);
    std::map<std::string, std::vector<const RunRecord*>> grouped;
    for (const auto& r : rs.records)
        if (selected(r.key, sel) && r.key.function == function) grouped[entry_label(r.key, sel)].push_back(&r);
    if (grouped.empty()) throw NotFound("no records for function " + std::to_string(function));

    std::vector<ConvergenceSeries> out;
    for (const auto& [label, recs] : grouped) {
        ConvergenceSeries s;
        s.label = label;
        s.checkpoint_evals = recs.front()->checkpoint_evals;
        for (std::size_t c = 0; c < s.checkpoint_evals.size(); ++c) {
            std::vector<double> vals;
            for (const RunRecord* r : recs) {
                const auto& traj = raw_values ? r->raw_trajectory : r->trajectory;
                if (c < traj.size()) vals.push_back(traj[c]);
            }
            s.median.push_back(median_or_nan(vals));
        }
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// tables

Table summary_csv_table(const std::vector<SummaryRow>& rows) {
    Table t{"summary",
            {"algorithm", "Mean", "Med", "Std", "SumRank", "MeanRank", "wins", "losses", "p_median_pairwise"},
            {}};
    for (const auto& r : rows)
        t.rows.push_back({r.label, fmt(r.mean), fmt(r.median), fmt(r.std), fmt(r.sum_rank), fmt(r.mean_rank),
                          std::to_string(r.wins), std::to_string(r.losses), fmt(r.p_summary)});
    return t;
}

Table friedman_table(const ErrorCube& cube) {
    Table t{"friedman", {"k", "N", "chi2", "p", "cd"}, {}};
    const auto k = cube.labels.size();
    const auto n = cube.functions.size();
    if (k < 2) return t;
    const auto ranks = stats::rank_algorithms(cube.medians());
    const auto fr = stats::friedman(ranks);
    std::string cd = "";
    if (k <= 20) cd = fmt(stats::nemenyi_cd(int(k), int(n)));
    t.rows.push_back({std::to_string(k), std::to_string(n), fmt(fr.chi2), fmt(fr.p), cd});
    return t;
}

Table cd_table(const CdGroupData& cd) {
    Table t{"cd", {"algorithm", "mean_rank", "groups"}, {}};
    for (const auto& [label, rank] : cd.ranking) {
        std::string groups;
        for (std::size_t g = 0; g < cd.groups.size(); ++g) {
            if (std::find(cd.groups[g].begin(), cd.groups[g].end(), label) == cd.groups[g].end()) continue;
            if (!groups.empty()) groups += ';';
            groups += std::to_string(g + 1);
        }
        t.rows.push_back({label, fmt(rank), groups});
    }
    return t;
}

Table bayes_table(const BayesMatrix& m) {
    Table t{"bayes", {"algorithm_a", "algorithm_b", "p_left", "p_rope", "p_right", "rope", "low_sample"}, {}};
    for (std::size_t a = 0; a < m.labels.size(); ++a)
        for (std::size_t b = 0; b < m.labels.size(); ++b) {
            const auto& c = m.cells[a][b];
            if (!c) continue;
            t.rows.push_back({m.labels[a], m.labels[b], fmt(c->p_left), fmt(c->p_rope), fmt(c->p_right), fmt(c->rope),
                              c->low_sample_warning ? "1" : "0"});
        }
    return t;
}

Table boxplot_table(const ErrorCube& cube) {
    Table t{"boxplot",
            {"algorithm", "function", "median", "q1", "q3", "whisker_low", "whisker_high", "outliers"},
            {}};
    for (std::size_t e = 0; e < cube.labels.size(); ++e)
        for (std::size_t f = 0; f < cube.functions.size(); ++f) {
            const auto runs = finite_only(cube.errors[e][f]);
            if (runs.empty()) continue;
            const auto b = boxplot_data(runs);
            std::string outliers;
            for (double v : b.outliers) {
                if (!outliers.empty()) outliers += ';';
                outliers += fmt(v);
            }
            t.rows.push_back({cube.labels[e], std::to_string(cube.functions[f]), fmt(b.median), fmt(b.q1), fmt(b.q3),
                              fmt(b.whisker_low), fmt(b.whisker_high), outliers});
        }
    return t;
}

Table convergence_table(const std::vector<ConvergenceSeries>& series) {
    Table t{"convergence", {"algorithm", "checkpoint_evals", "median_error"}, {}};
    for (const auto& s : series)
        for (std::size_t c = 0; c < s.checkpoint_evals.size(); ++c)
            t.rows.push_back({s.label, std::to_string(s.checkpoint_evals[c]), fmt(s.median[c])});
    return t;
}

void write_csv(std::ostream& out, const Table& t) {
    csv::write_row(out, t.header);
    for (const auto& row : t.rows) csv::write_row(out, row);
}

void write_markdown(std::ostream& out, const Table& t) {
    auto cell = [](const std::string& s) {
        std::string r;
        for (char ch : s) {
            if (ch == '|') r += '\\';
            r += ch;
        }
        return r;
    };
    out << "### " << t.name << "\n\n|";
    for (const auto& h : t.header) out << ' ' << cell(h) << " |";
    out << "\n|";
    for (std::size_t i = 0; i < t.header.size(); ++i) out << " --- |";
    out << '\n';
    for (const auto& row : t.rows) {
        out << '|';
        for (const auto& c : row) out << ' ' << cell(c) << " |";
        out << '\n';
    }
    out << '\n';
}

Table read_csv_table(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    auto rows = csv::parse(in);
    Table t;
    t.name = path.stem().string();
    if (rows.empty()) return t;
    t.header = std::move(rows.front());
    t.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
    return t;
}

std::vector<Table> analyze(const ResultSet& rs, const AnalyzeOptions& opt) {
    std::vector<int> dims = opt.dim ? std::vector<int>{*opt.dim} : dims_in(rs);
    std::vector<Table> out;
    for (int dim : dims) {
        const Selection sel{dim, opt.transform};
        const ErrorCube cube = collect(rs, sel);
        const std::string suffix = "_dim" + std::to_string(dim);
        auto push = [&](Table t) {
            t.name += suffix;
            out.push_back(std::move(t));
        };

        push(summary_csv_table(summary_table(cube)));
        push(friedman_table(cube));
        if (cube.labels.size() >= 2) {
            const auto ranks = stats::rank_algorithms(cube.medians());
            if (cube.labels.size() <= 20) push(cd_table(cd_diagram_data(ranks, cube.labels)));
            push(bayes_table(bayes_heatmap_data(cube, opt.rope, opt.mc_samples, opt.seed)));
        }
        push(boxplot_table(cube));
        for (int fn : cube.functions) {
            Table t = convergence_table(convergence_data(rs, fn, sel));
            t.name += suffix + "_f" + std::to_string(fn);
            out.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace invbench::report
