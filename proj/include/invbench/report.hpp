#pragma once

#include "invbench/harness.hpp"
#include "invbench/stats.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace invbench::report {

inline constexpr double kSignificance = 0.05;

/// Which records enter an analysis. Without a transform filter every
/// transformation present becomes its own entry, labelled e.g. "hSHADE_rotate".
struct Selection {
    int dim = 0;
    std::optional<std::string> transform;
};

/// Final errors arranged entry × function × run.
struct ErrorCube {
    std::vector<std::string> labels;  // k entries, sorted
    std::vector<int> functions;       // N function ids, ascending
    std::vector<std::vector<std::vector<double>>> errors;  // [entry][function][run], failed runs dropped

    Eigen::MatrixXd medians() const;  // N × k
};

ErrorCube collect(const ResultSet& rs, const Selection& sel);

std::vector<int> dims_in(const ResultSet& rs);

struct SummaryRow {
    std::string label;
    double mean = 0;  // mean over functions of per-function means
    double median = 0;
    double std = 0;  // spread of per-function means
    double sum_rank = 0;
    double mean_rank = 0;
    int wins = 0;
    int losses = 0;
    double p_summary = 1;  // median of pairwise p-values against every other entry
};

std::vector<SummaryRow> summary_table(const ResultSet& rs, const Selection& sel);
std::vector<SummaryRow> summary_table(const ErrorCube& cube);

struct CdGroupData {
    std::vector<std::pair<std::string, double>> ranking;  // ascending mean rank
    double cd = 0;
    std::vector<std::vector<std::string>> groups;  // maximal runs with spread <= cd
};

CdGroupData cd_diagram_data(const stats::RankMatrix& ranks, const std::vector<std::string>& labels);

struct BayesMatrix {
    std::vector<std::string> labels;
    /// cells[a][b]: p_right is the probability that a beats b by more than the rope.
    std::vector<std::vector<std::optional<stats::BayesResult>>> cells;
};

BayesMatrix bayes_heatmap_data(const ResultSet& rs, const Selection& sel, double rope = stats::kDefaultRope,
                               int mc_samples = stats::kDefaultMcSamples, std::uint64_t seed = 0);
BayesMatrix bayes_heatmap_data(const ErrorCube& cube, double rope = stats::kDefaultRope,
                               int mc_samples = stats::kDefaultMcSamples, std::uint64_t seed = 0);

struct BoxplotData {
    double median = 0;
    double q1 = 0;
    double q3 = 0;
    double whisker_low = 0;
    double whisker_high = 0;
    std::vector<double> outliers;
};

BoxplotData boxplot_data(std::span<const double> samples);

struct ConvergenceSeries {
    std::string label;
    std::vector<long> checkpoint_evals;
    std::vector<double> median;
};

/// Per entry, the median best-so-far error (or raw value) at each checkpoint.
std::vector<ConvergenceSeries> convergence_data(const ResultSet& rs, int function, const Selection& sel,
                                                bool raw_values = false);

// ---------------------------------------------------------------------------
// tabular output

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table summary_csv_table(const std::vector<SummaryRow>& rows);
Table friedman_table(const ErrorCube& cube);
Table cd_table(const CdGroupData& cd);
Table bayes_table(const BayesMatrix& m);
Table boxplot_table(const ErrorCube& cube);
Table convergence_table(const std::vector<ConvergenceSeries>& series);

void write_csv(std::ostream& out, const Table& t);
void write_markdown(std::ostream& out, const Table& t);
Table read_csv_table(const std::filesystem::path& path);

struct AnalyzeOptions {
    std::optional<int> dim;
    std::optional<std::string> transform;
    double rope = stats::kDefaultRope;
    int mc_samples = stats::kDefaultMcSamples;
    std::uint64_t seed = 0;
};

/// Every analysis table for the requested dims, named like "summary_dim10".
std::vector<Table> analyze(const ResultSet& rs, const AnalyzeOptions& opt);

}  // namespace invbench::report
