#pragma once

#include "invbench/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace invbench::stats {

struct Descriptive {
    double mean = 0;
    double median = 0;
    double std = 0;  // n − 1 denominator, 0 for a single sample
};

Descriptive descriptive(std::span<const double> samples);

double median(std::span<const double> samples);

/// Linear-interpolation quantile between order statistics (R type 7).
double quantile(std::span<const double> samples, double p);

/// Ranks per row (N functions × k algorithms); ties share the average rank.
struct RankMatrix {
    Eigen::MatrixXd values;

    Index k() const { return values.cols(); }
    Index n() const { return values.rows(); }
    Eigen::VectorXd sum_ranks() const { return values.colwise().sum().transpose(); }
    Eigen::VectorXd mean_ranks() const { return sum_ranks() / double(n()); }
};

/// Ascending average ranks of one sample (1-based).
std::vector<double> average_ranks(std::span<const double> values);

RankMatrix rank_algorithms(const Eigen::MatrixXd& medians);

struct PairwiseResult {
    double statistic = 0;  // min(W+, W−)
    double w_plus = 0;     // rank sum of positive x − y
    double w_minus = 0;
    double p_two_sided = 1;
    int n_effective = 0;
    bool exact = false;
    bool degenerate = false;  // fewer than the minimum number of non-zero differences

    /// −1 when x tends to be smaller than y, +1 when larger, 0 when balanced.
    int direction() const { return w_plus < w_minus ? -1 : (w_plus > w_minus ? 1 : 0); }
};

inline constexpr int kWilcoxonMinPairs = 5;
inline constexpr int kWilcoxonExactLimit = 20;

/// Paired two-sided signed-rank test. Exact null distribution up to
/// n_effective = 20, normal approximation with tie and continuity
/// corrections above.
PairwiseResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

/// Two-sided exact p for given absolute ranks and observed W+, by counting
/// sign assignments. Ranks must be multiples of 0.5.
double wilcoxon_exact_p(std::span<const double> abs_ranks, double w_plus);

struct FriedmanResult {
    double chi2 = 0;
    double p = 1;
};

FriedmanResult friedman(const RankMatrix& ranks);

/// Regularised upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// P(χ²_dof > x).
double chi2_upper_tail(double x, double dof);

/// Nemenyi critical value q_0.05 for k algorithms, 2 <= k <= 20.
double nemenyi_q(int k);

/// CD = q_α · sqrt(k(k+1) / 6N).
double nemenyi_cd(int k, int n, double alpha = 0.05);

struct BayesResult {
    double p_left = 0;
    double p_rope = 0;
    double p_right = 0;
    double rope = 10;
    bool low_sample_warning = false;  // fewer than kWilcoxonMinPairs differences
};

inline constexpr double kDefaultRope = 10.0;
inline constexpr int kDefaultMcSamples = 50000;

/// Monte Carlo Bayesian signed-rank test on paired differences.
///
/// Differences are augmented with one pseudo-observation at zero; each sample
/// draws Dirichlet(1, ..., 1) weights and measures the weighted mass of pair
/// midpoints (d_i + d_j)/2 below −rope, inside [−rope, rope] and above rope.
/// The reported probabilities are the fractions of samples in which each
/// region carries the largest mass (ties split evenly).
BayesResult bayes_signed_rank(std::span<const double> diffs, double rope = kDefaultRope,
                              int mc_samples = kDefaultMcSamples, std::uint64_t seed = 0);

}  // namespace invbench::stats
