#include "invbench/stats.hpp"

#include "invbench/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace invbench::stats {

double median(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("median of an empty sample");
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile(std::span<const double> samples, double p) {
    if (samples.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    const double h = p * double(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - double(lo)) * (v[hi] - v[lo]);
}

Descriptive descriptive(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("descriptive statistics of an empty sample");
    Descriptive d;
    const double n = double(samples.size());
    d.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    d.median = median(samples);
    if (samples.size() > 1) {
        double ss = 0;
        for (double s : samples) ss += (s - d.mean) * (s - d.mean);
        d.std = std::sqrt(ss / (n - 1));
    }
    return d;
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double r = 0.5 * double(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
        i = j + 1;
    }
    return ranks;
}

RankMatrix rank_algorithms(const Eigen::MatrixXd& medians) {
    if (medians.rows() < 1 || medians.cols() < 2)
        throw std::invalid_argument("rank_algorithms needs at least one function and two algorithms");
    if (medians.hasNaN()) throw std::invalid_argument("rank_algorithms: NaN median");
    RankMatrix out;
    out.values.resize(medians.rows(), medians.cols());
    std::vector<double> row(std::size_t(medians.cols()));
    for (Index i = 0; i < medians.rows(); ++i) {
        for (Index j = 0; j < medians.cols(); ++j) row[std::size_t(j)] = medians(i, j);
        const auto r = average_ranks(row);
        for (Index j = 0; j < medians.cols(); ++j) out.values(i, j) = r[std::size_t(j)];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wilcoxon

double wilcoxon_exact_p(std::span<const double> abs_ranks, double w_plus) {
    const std::size_t n = abs_ranks.size();
    if (n > 62) throw std::invalid_argument("exact signed-rank distribution limited to 62 pairs");
    // Doubled ranks are integers; count subsets by doubled rank sum.
    std::vector<long> doubled(n);
    long total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        doubled[i] = std::lround(2.0 * abs_ranks[i]);
        total += doubled[i];
    }
    std::vector<std::uint64_t> count(std::size_t(total) + 1, 0);
    count[0] = 1;
    long reach = 0;
    for (long r : doubled) {
        for (long s = reach; s >= 0; --s) count[std::size_t(s + r)] += count[std::size_t(s)];
        reach += r;
    }
    const long obs = std::lround(2.0 * w_plus);
    std::uint64_t le = 0, ge = 0;
    for (long s = 0; s <= total; ++s) {
        if (s <= obs) le += count[std::size_t(s)];
        if (s >= obs) ge += count[std::size_t(s)];
    }
    const double cases = std::ldexp(1.0, int(n));
    return std::min(1.0, 2.0 * double(std::min(le, ge)) / cases);
}

PairwiseResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("wilcoxon_signed_rank: samples differ in length");
    std::vector<double> d;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double di = x[i] - y[i];
        if (std::isnan(di)) throw std::invalid_argument("wilcoxon_signed_rank: NaN difference");
        if (di != 0.0) d.push_back(di);
    }
    PairwiseResult r;
    r.n_effective = int(d.size());
    std::vector<double> mag(d.size());
    std::transform(d.begin(), d.end(), mag.begin(), [](double v) { return std::abs(v); });
    const auto ranks = average_ranks(mag);
    for (std::size_t i = 0; i < d.size(); ++i) (d[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];
    r.statistic = std::min(r.w_plus, r.w_minus);

    if (r.n_effective < kWilcoxonMinPairs) {
        r.degenerate = true;
        r.p_two_sided = 1.0;
        return r;
    }
    if (r.n_effective <= kWilcoxonExactLimit) {
        r.exact = true;
        r.p_two_sided = wilcoxon_exact_p(ranks, r.w_plus);
        return r;
    }

    const double n = double(r.n_effective);
    const double mu = n * (n + 1) / 4.0;
    double var = n * (n + 1) * (2 * n + 1) / 24.0;
    std::vector<double> sorted = mag;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = double(j - i + 1);
        var -= (t * t * t - t) / 48.0;
        i = j + 1;
    }
    if (var <= 0) {
        r.p_two_sided = 1.0;
        return r;
    }
    const double z = std::max(0.0, std::abs(r.w_plus - mu) - 0.5) / std::sqrt(var);
    r.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return r;
}

// ---------------------------------------------------------------------------
// Friedman

double gamma_q(double a, double x) {
    if (!(a > 0)) throw std::invalid_argument("gamma_q: shape must be positive");
    if (x < 0) throw std::invalid_argument("gamma_q: x must be non-negative");
    if (x == 0) return 1.0;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 10000;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);

    if (x < a + 1.0) {
        // P(a, x) by its power series.
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < max_iter; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * eps) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }

    // Q(a, x) by its continued fraction (modified Lentz).
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return std::exp(log_prefix) * h;
}

double chi2_upper_tail(double x, double dof) {
    if (x <= 0) return 1.0;
    return gamma_q(dof / 2.0, x / 2.0);
}

FriedmanResult friedman(const RankMatrix& ranks) {
    const Index n = ranks.n(), k = ranks.k();
    if (n < 2 || k < 2) throw std::invalid_argument("friedman needs N >= 2 functions and k >= 2 algorithms");
    const Eigen::VectorXd mean = ranks.mean_ranks();
    const double centre = double(k + 1) / 2.0;
    double ss = 0;
    for (Index j = 0; j < k; ++j) ss += (mean(j) - centre) * (mean(j) - centre);
    FriedmanResult r;
    r.chi2 = 12.0 * double(n) / (double(k) * double(k + 1)) * ss;
    if (r.chi2 < 1e-12) return {0.0, 1.0};
    r.p = chi2_upper_tail(r.chi2, double(k - 1));
    return r;
}

// ---------------------------------------------------------------------------
// Nemenyi

namespace {

// Studentized range quantile at 0.95 with infinite degrees of freedom, divided by sqrt(2).
constexpr std::array<double, 19> kNemenyiQ05 = {
    1.959963985, 2.343700586, 2.569031773, 2.727774371, 2.849705420, 2.948320018, 3.030878450,
    3.101730341, 3.163683577, 3.218653607, 3.268003924, 3.312738593, 3.353617752, 3.391230284,
    3.426041379, 3.458424707, 3.488684799, 3.517073009, 3.543799132,
};

}  // namespace

double nemenyi_q(int k) {
    if (k < 2 || k > 20) throw UnsupportedK("Nemenyi table covers 2..20 algorithms, got " + std::to_string(k));
    return kNemenyiQ05[std::size_t(k - 2)];
}

double nemenyi_cd(int k, int n, double alpha) {
    if (alpha != 0.05) throw std::invalid_argument("Nemenyi critical values are tabulated for alpha = 0.05 only");
    if (n < 1) throw std::invalid_argument("nemenyi_cd needs N >= 1");
    return nemenyi_q(k) * std::sqrt(double(k) * double(k + 1) / (6.0 * double(n)));
}

// ---------------------------------------------------------------------------
// Bayesian signed-rank

BayesResult bayes_signed_rank(std::span<const double> diffs, double rope, int mc_samples, std::uint64_t seed) {
    if (diffs.size() < 2) throw std::invalid_argument("bayes_signed_rank needs at least two differences");
    if (!(rope >= 0)) throw std::invalid_argument("rope must be non-negative");
    if (mc_samples < 1) throw std::invalid_argument("mc_samples must be positive");
    for (double d : diffs)
        if (!std::isfinite(d)) throw std::invalid_argument("bayes_signed_rank: non-finite difference");

    BayesResult out;
    out.rope = rope;
    out.low_sample_warning = diffs.size() < std::size_t(kWilcoxonMinPairs);

    // Augmented sample: pseudo-observation at 0 first.
    std::vector<double> d;
    d.reserve(diffs.size() + 1);
    d.push_back(0.0);
    d.insert(d.end(), diffs.begin(), diffs.end());
    const std::size_t n = d.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = d[order[i]];

    // For sorted position i: below[i] = #{j : s_i + s_j < −2·rope}, above[i] = #{j : s_i + s_j > 2·rope}.
    std::vector<std::size_t> below(n), above(n);
    for (std::size_t i = 0; i < n; ++i) {
        below[i] = std::size_t(std::lower_bound(sorted.begin(), sorted.end(), -2.0 * rope - sorted[i],
                                                [](double v, double t) { return v < t; }) -
                               sorted.begin());
        const auto first_above = std::upper_bound(sorted.begin(), sorted.end(), 2.0 * rope - sorted[i]);
        above[i] = std::size_t(sorted.end() - first_above);
    }

    Rng rng(seed);
    std::vector<double> raw(n), w(n), prefix(n + 1);
    std::array<double, 3> wins{0, 0, 0};
    for (int s = 0; s < mc_samples; ++s) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] = rng.exponential();
            total += raw[i];
        }
        prefix[0] = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = raw[order[i]] / total;
            prefix[i + 1] = prefix[i] + w[i];
        }
        double left = 0, right = 0;
        for (std::size_t i = 0; i < n; ++i) {
            left += w[i] * prefix[below[i]];
            right += w[i] * (prefix[n] - prefix[n - above[i]]);
        }
        const double mass_total = prefix[n] * prefix[n];
        const double inside = mass_total - left - right;
        const std::array<double, 3> mass{left, inside, right};
        const double top = std::max({left, inside, right});
        int ties = 0;
        for (double m : mass) ties += m == top;
        for (int r = 0; r < 3; ++r)
            if (mass[std::size_t(r)] == top) wins[std::size_t(r)] += 1.0 / ties;
    }
    out.p_left = wins[0] / mc_samples;
    out.p_rope = wins[1] / mc_samples;
    out.p_right = wins[2] / mc_samples;
    return out;
}

}  // namespace invbench::stats
