#include "invbench/report.hpp"

#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

using namespace invbench;
using namespace invbench::report;

namespace {

// Synthetic result set: error = level(algorithm) * function + run noise.
ResultSet synthetic(const std::vector<std::pair<std::string, double>>& algs, int functions, int runs, int dim = 10) {
    ResultSet rs;
    for (const auto& [alg, level] : algs) {
        for (int fn = 1; fn <= functions; ++fn) {
            for (int run = 0; run < runs; ++run) {
                RunRecord r;
                r.key = {alg, false, fn, "baseline", dim, run};
                r.final_error = level * double(fn) + 0.01 * double(run);
                r.optimum_value = 100.0 * fn;
                r.final_value = r.final_error + r.optimum_value;
                r.checkpoint_evals = {100, 200, 300};
                r.trajectory = {r.final_error + 2.0 + double(run), r.final_error + 1.0, r.final_error};
                r.raw_trajectory = r.trajectory;
                for (double& v : r.raw_trajectory) v += r.optimum_value;
                rs.records.push_back(r);
            }
        }
    }
    return rs;
}

}  // namespace

TEST_CASE("summary table ranks and counts") {
    const auto rs = synthetic({{"shade", 1.0}, {"pso2011", 2.0}, {"random_search", 50.0}}, 8, 10);
    const auto rows = summary_table(rs, Selection{10, {}});
    REQUIRE(rows.size() == 3);
    // labels sort alphabetically: PSO2011, RS, SHADE
    CHECK(rows[0].label == "PSO2011");
    CHECK(rows[1].label == "RS");
    CHECK(rows[2].label == "SHADE");
    CHECK(rows[2].sum_rank == 8.0);
    CHECK(rows[1].sum_rank == 24.0);
    for (const auto& r : rows) {
        CHECK(r.mean_rank == doctest::Approx(r.sum_rank / 8.0).epsilon(1e-12));
        CHECK(r.sum_rank >= 8.0);
        CHECK(r.sum_rank <= 24.0);
        CHECK(r.wins + r.losses <= 2 * 8);
    }
    CHECK(rows[2].wins == 16);
    CHECK(rows[2].losses == 0);
    CHECK(rows[1].losses == 16);
    // mean of per-function means: 1 * mean(1..8) + mean run noise
    CHECK(rows[2].mean == doctest::Approx(4.5 + 0.045));
    CHECK(rows[2].p_summary < 0.05);

    CHECK_THROWS_AS(summary_table(rs, Selection{30, {}}), NotFound);
}

TEST_CASE("single algorithm summary") {
    const auto rows = summary_table(synthetic({{"shade", 1.0}}, 6, 5), Selection{10, {}});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].sum_rank == 6.0);
    CHECK(rows[0].wins == 0);
    CHECK(rows[0].losses == 0);
    CHECK(rows[0].p_summary == 1.0);
}

TEST_CASE("transforms become separate entries unless filtered") {
    auto rs = synthetic({{"shade", 1.0}}, 5, 5);
    auto rotated = rs.records;
    for (auto& r : rotated) {
        r.key.transform = "rotate";
        r.final_error *= 3;
    }
    rs.records.insert(rs.records.end(), rotated.begin(), rotated.end());
    const auto cube = collect(rs, Selection{10, {}});
    CHECK(cube.labels == std::vector<std::string>{"SHADE", "SHADE_rotate"});
    const auto only = collect(rs, Selection{10, std::string("rotate")});
    CHECK(only.labels == std::vector<std::string>{"SHADE"});
    CHECK(only.errors[0][0][0] == doctest::Approx(3.0));
}

TEST_CASE("critical difference groups") {
    stats::RankMatrix apart;
    apart.values.resize(29, 2);
    for (Index i = 0; i < 29; ++i) apart.values.row(i) << 1.0, 2.0;
    const auto g = cd_diagram_data(apart, {"A", "B"});
    CHECK(g.cd == doctest::Approx(0.364).epsilon(1e-3));
    CHECK(g.groups == std::vector<std::vector<std::string>>{{"A"}, {"B"}});

    stats::RankMatrix tied;
    tied.values = Eigen::MatrixXd::Constant(10, 4, 2.5);
    const auto t = cd_diagram_data(tied, {"D", "C", "B", "A"});
    REQUIRE(t.groups.size() == 1);
    CHECK(t.groups[0].size() == 4);
    CHECK(t.ranking.front().first == "A");

    // chained: a-b close, b-c close, a-c apart
    stats::RankMatrix chain;
    chain.values.resize(1, 3);
    chain.values << 1.0, 2.0, 3.0;
    const auto c = cd_diagram_data(chain, {"a", "b", "c"});  // CD(3, 1) ≈ 3.3
    CHECK(c.groups.size() == 1);
    CHECK_THROWS_AS(cd_diagram_data(stats::RankMatrix{Eigen::MatrixXd::Ones(3, 21)}, std::vector<std::string>(21, "x")),
                    UnsupportedK);
}

TEST_CASE("cd groups cover every entry and respect the spread") {
    Rng rng(3);
    Eigen::MatrixXd med(12, 7);
    for (Index i = 0; i < 12; ++i)
        for (Index j = 0; j < 7; ++j) med(i, j) = rng.uniform() + 0.15 * double(j);
    const auto ranks = stats::rank_algorithms(med);
    const std::vector<std::string> labels{"a", "b", "c", "d", "e", "f", "g"};
    const auto cd = cd_diagram_data(ranks, labels);
    std::map<std::string, double> rank;
    for (const auto& [l, r] : cd.ranking) rank[l] = r;
    std::set<std::string> covered;
    for (const auto& group : cd.groups) {
        double lo = 1e9, hi = -1e9;
        for (const auto& l : group) {
            covered.insert(l);
            lo = std::min(lo, rank[l]);
            hi = std::max(hi, rank[l]);
        }
        CHECK(hi - lo <= cd.cd + 1e-12);
        // order-consistent: nothing outside the group sits strictly inside its span
        for (const auto& [l, r] : rank)
            if (std::find(group.begin(), group.end(), l) == group.end()) CHECK_FALSE((r > lo && r < hi));
    }
    CHECK(covered.size() == labels.size());
}

TEST_CASE("bayes heatmap") {
    const auto rs = synthetic({{"shade", 1.0}, {"pso2011", 40.0}, {"random_search", 41.0}}, 10, 3);
    const auto m = bayes_heatmap_data(rs, Selection{10, {}}, 10.0, 20000, 7);
    REQUIRE(m.labels == std::vector<std::string>{"PSO2011", "RS", "SHADE"});
    for (std::size_t i = 0; i < 3; ++i) CHECK_FALSE(m.cells[i][i].has_value());
    // SHADE has far lower errors than PSO2011 on every function
    CHECK(m.cells[2][0]->p_right >= 0.99);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) {
            if (a == b) continue;
            CHECK(std::abs(m.cells[a][b]->p_left - m.cells[b][a]->p_right) <= 0.02);
            const auto& c = *m.cells[a][b];
            CHECK(c.p_left + c.p_rope + c.p_right == doctest::Approx(1.0).epsilon(1e-9));
        }
    CHECK_THROWS(bayes_heatmap_data(synthetic({{"shade", 1.0}}, 5, 2), Selection{10, {}}));
}

TEST_CASE("boxplot") {
    const auto b = boxplot_data(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(b.median == 5);
    CHECK(b.q1 == 3);
    CHECK(b.q3 == 7);
    CHECK(b.whisker_low == 1);
    CHECK(b.whisker_high == 9);
    CHECK(b.outliers.empty());

    const auto c = boxplot_data(std::vector<double>{4, 4, 4});
    CHECK((c.median == 4 && c.q1 == 4 && c.q3 == 4 && c.whisker_low == 4 && c.whisker_high == 4));
    CHECK(c.outliers.empty());

    // q1 = 2, q3 = 4, upper fence 7
    const auto o = boxplot_data(std::vector<double>{1, 2, 3, 4, 100});
    CHECK(o.outliers == std::vector<double>{100});
    CHECK(o.whisker_high == 4);
    CHECK(o.whisker_low == 1);
    CHECK_THROWS(boxplot_data(std::vector<double>{}));
}

TEST_CASE("convergence medians") {
    const auto rs = synthetic({{"shade", 1.0}, {"pso2011", 2.0}}, 3, 5);
    const auto series = convergence_data(rs, 2, Selection{10, {}});
    REQUIRE(series.size() == 2);
    for (const auto& s : series) {
        CHECK(s.checkpoint_evals == std::vector<long>{100, 200, 300});
        CHECK(std::is_sorted(s.median.rbegin(), s.median.rend()));
    }
    const auto raw = convergence_data(rs, 2, Selection{10, {}}, true);
    for (std::size_t i = 0; i < 3; ++i) CHECK(raw[0].median[i] - series[0].median[i] == doctest::Approx(200.0));

    const auto single = synthetic({{"shade", 1.0}}, 1, 1);
    const auto one = convergence_data(single, 1, Selection{10, {}});
    CHECK(one[0].median == single.records[0].trajectory);
    CHECK_THROWS_AS(convergence_data(rs, 9, Selection{10, {}}), NotFound);
}

TEST_CASE("tables render deterministically") {
    const auto rs = synthetic({{"shade", 1.0}, {"pso2011", 2.0}, {"random_search", 5.0}}, 6, 6);
    AnalyzeOptions opt;
    opt.mc_samples = 2000;
    const auto a = analyze(rs, opt);
    const auto b = analyze(rs, opt);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::ostringstream x, y;
        write_csv(x, a[i]);
        write_csv(y, b[i]);
        CHECK(x.str() == y.str());
    }
    std::vector<std::string> names;
    for (const auto& t : a) names.push_back(t.name);
    CHECK(std::find(names.begin(), names.end(), "summary_dim10") != names.end());
    CHECK(std::find(names.begin(), names.end(), "cd_dim10") != names.end());
    CHECK(std::find(names.begin(), names.end(), "convergence_dim10_f3") != names.end());

    std::ostringstream md;
    write_markdown(md, a.front());
    CHECK(md.str().find("| algorithm | Mean |") != std::string::npos);
    CHECK(a.front().header.back() == "p_median_pairwise");
}
