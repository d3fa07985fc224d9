#include "neb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace neb::stats {

namespace {

// Regularized incomplete gamma functions, double precision. Series for
// x < a+1, continued fraction otherwise (Numerical Recipes style).
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double u_statistic_from_rank_sum(double rank_sum, size_t n1) {
    return rank_sum - static_cast<double>(n1) * (n1 + 1) / 2.0;
}

}  // namespace

double chi2_sf(double x, int dof) {
    if (x <= 0.0) return 1.0;
    double a = dof / 2.0;
    double xx = x / 2.0;
    if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
    return gamma_q_cf(a, xx);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::vector<double> midranks(std::span<const double> pooled) {
    const size_t n = pooled.size();
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return pooled[i] < pooled[j]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && pooled[idx[j + 1]] == pooled[idx[i]]) ++j;
        double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    const size_t n1 = a.size(), n2 = b.size();
    if (n1 == 0 || n2 == 0) throw DimensionError("mann_whitney_u: empty sample");
    const size_t n = n1 + n2;
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<double> ranks = midranks(pooled);
    double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + n1, 0.0);
    double u_obs = u_statistic_from_rank_sum(rank_sum_a, n1);
    const double mu = static_cast<double>(n1) * n2 / 2.0;

    TestResult res;
    res.statistic = u_obs;

    if (n <= 12) {
        // Exact conditional distribution: enumerate every assignment of n1
        // of the pooled values to the first group.
        std::vector<char> pick(n, 0);
        std::fill(pick.begin(), pick.begin() + n1, 1);
        std::sort(pick.begin(), pick.end());  // lowest permutation first
        long long total = 0, extreme = 0;
        const double target = std::fabs(u_obs - mu) - 1e-12;
        do {
            double rs = 0.0;
            for (size_t i = 0; i < n; ++i)
                if (pick[i]) rs += ranks[i];
            double u = u_statistic_from_rank_sum(rs, n1);
            ++total;
            if (std::fabs(u - mu) >= target) ++extreme;
        } while (std::next_permutation(pick.begin(), pick.end()));
        res.p = static_cast<double>(extreme) / static_cast<double>(total);
        return res;
    }

    // Normal approximation with tie correction.
    double tie_term = 0.0;
    {
        std::vector<double> sorted(pooled);
        std::sort(sorted.begin(), sorted.end());
        size_t i = 0;
        while (i < sorted.size()) {
            size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    double nn = static_cast<double>(n);
    double var = (static_cast<double>(n1) * n2 / 12.0) *
                 ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (var <= 0.0) {
        res.p = 1.0;
        return res;
    }
    double z = (u_obs - mu) / std::sqrt(var);
    res.p = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
    return res;
}

TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw DimensionError("kruskal_wallis: need at least two groups");
    std::vector<double> pooled;
    for (const auto& g : groups) {
        if (g.empty()) throw DimensionError("kruskal_wallis: empty group");
        pooled.insert(pooled.end(), g.begin(), g.end());
    }
    const double n = static_cast<double>(pooled.size());
    std::vector<double> ranks = midranks(pooled);

    double h = 0.0;
    size_t off = 0;
    for (const auto& g : groups) {
        double rs = std::accumulate(ranks.begin() + off, ranks.begin() + off + g.size(), 0.0);
        h += rs * rs / static_cast<double>(g.size());
        off += g.size();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    double tie_term = 0.0;
    {
        std::vector<double> sorted(pooled);
        std::sort(sorted.begin(), sorted.end());
        size_t i = 0;
        while (i < sorted.size()) {
            size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
    }
    double correction = 1.0 - tie_term / (n * n * n - n);
    TestResult res;
    if (correction <= 0.0) {
        // Every observation identical.
        res.statistic = 0.0;
        res.p = 1.0;
        return res;
    }
    h /= correction;
    if (std::fabs(h) < 1e-12) h = 0.0;
    res.statistic = h;
    res.p = chi2_sf(h, static_cast<int>(groups.size()) - 1);
    return res;
}

std::string significance_stars(double p) {
    if (p <= 0.0005) return "***";
    if (p < 0.005) return "**";
    if (p < 0.05) return "*";
    return "";
}

}  // namespace neb::stats
