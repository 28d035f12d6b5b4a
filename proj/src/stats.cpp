#include "ozonecast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ozonecast/errors.hpp"
#include "ozonecast/parallel.hpp"

namespace ozonecast {

SummaryRow summary_stats(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw StatError("summary_stats requires n >= 2");

    SummaryRow row;
    row.min = values[0];
    row.max = values[0];
    double sum = 0.0;
    for (double v : values) {
        row.min = std::min(row.min, v);
        row.max = std::max(row.max, v);
        sum += v;
    }
    const double nd = static_cast<double>(n);
    row.mean = sum / nd;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - row.mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    row.sd = std::sqrt(m2 / (nd - 1.0));
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    if (m2 == 0.0) {
        row.skewness = std::numeric_limits<double>::quiet_NaN();
        row.kurtosis = std::numeric_limits<double>::quiet_NaN();
    } else {
        row.skewness = m3 / std::pow(m2, 1.5);
        row.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return row;
}

namespace {

double poly(std::span<const double> c, double x) {
    double p = c[0];
    double xn = 1.0;
    for (std::size_t i = 1; i < c.size(); ++i) {
        xn *= x;
        p += c[i] * xn;
    }
    return p;
}

// AS 111 normal quantile, adequate for the AS R94 weights.
double normal_quantile(double p) {
    constexpr double split = 0.42;
    const double q = p - 0.5;
    if (std::abs(q) <= split) {
        const double r = q * q;
        return q *
               (((-25.44106049637 * r + 41.39119773534) * r - 18.61500062529) * r +
                2.50662823884) /
               ((((3.13082909833 * r - 21.06224101826) * r + 23.08336743743) * r -
                 8.47351093090) * r +
                1.0);
    }
    double r = q > 0.0 ? 1.0 - p : p;
    if (r <= 0.0) return q > 0.0 ? 99.9999 : -99.9999;
    r = std::sqrt(-std::log(r));
    const double v = (((2.32121276858 * r + 4.85014127135) * r - 2.29796479134) * r -
                      2.78718931138) /
                     ((1.63706781897 * r + 3.54388924762) * r + 1.0);
    return q < 0.0 ? -v : v;
}

// Upper tail of the standard normal.
double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace

ShapiroResult shapiro_wilk(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3 || n > 5000) throw StatError("shapiro_wilk requires 3 <= n <= 5000");

    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (range <= 1e-300) throw StatError("shapiro_wilk requires nonzero spread");

    const double an = static_cast<double>(n);
    const std::size_t n2 = n / 2;

    // Approximate normalized order-statistic weights (upper tail, applied
    // antisymmetrically below).
    static constexpr double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static constexpr double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    std::vector<double> a(n2);
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
    } else {
        double summ2 = 0.0;
        for (std::size_t i = 0; i < n2; ++i) {
            a[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
            summ2 += a[i] * a[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = poly(c1, rsn) - a[0] / ssumm2;
        std::size_t first_raw;
        double fac;
        if (n > 5) {
            const double a2 = -a[1] / ssumm2 + poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[0] = a1;
            a[1] = a2;
            first_raw = 2;
        } else {
            fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
            a[0] = a1;
            first_raw = 1;
        }
        for (std::size_t i = first_raw; i < n2; ++i) a[i] = -a[i] / fac;
    }

    // W as the squared correlation between sorted data and the weights.
    auto weight = [&](std::size_t i) {
        const std::size_t j = n - 1 - i;
        if (i < j) return -a[i];
        if (i > j) return a[j];
        return 0.0;  // middle element of an odd sample
    };
    double wsum = 0.0, xsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        wsum += weight(i);
        xsum += x[i] / range;
    }
    const double wbar = wsum / an;
    const double xbar = xsum / an;
    double ssa = 0.0, ssx = 0.0, sax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = weight(i) - wbar;
        const double dx = x[i] / range - xbar;
        ssa += da * da;
        ssx += dx * dx;
        sax += da * dx;
    }
    // 1 - W computed as a product to keep precision near W = 1.
    const double ssassx = std::sqrt(ssa * ssx);
    const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    const double w = 1.0 - w1;

    // Royston's significance transformation.
    ShapiroResult result;
    result.w = w;
    if (n == 3) {
        constexpr double pi6 = 1.90985931710274;    // 6/pi
        constexpr double stqr = 1.04719755119660;   // asin(sqrt(3/4))
        result.p = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
        return result;
    }
    static constexpr double c3[4] = {0.5440, -0.39978, 0.025054, -6.714e-4};
    static constexpr double c4[4] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr double c5[4] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double c6[3] = {-0.4803, -0.082676, 0.0030302};
    static constexpr double g[2] = {-2.273, 0.459};
    const double y = std::log(w1);
    const double logn = std::log(an);
    double m, s;
    if (n <= 11) {
        const double gamma = poly(g, an);
        if (y >= gamma) {
            result.p = 1e-19;
            return result;
        }
        const double y2 = -std::log(gamma - y);
        m = poly(c3, an);
        s = std::exp(poly(c4, an));
        result.p = normal_upper_tail((y2 - m) / s);
        return result;
    }
    m = poly(c5, logn);
    s = std::exp(poly(c6, logn));
    result.p = normal_upper_tail((y - m) / s);
    return result;
}

std::vector<double> mid_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw StatError("spearman requires equal lengths");
    if (x.size() < 2) throw StatError("spearman requires n >= 2");
    const std::vector<double> rx = mid_ranks(x);
    const std::vector<double> ry = mid_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw StatError("spearman: zero rank variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(const TimeSeriesTable& table,
                                     const std::vector<std::string>& columns) {
    if (columns.size() < 2) throw StatError("correlation_matrix requires >= 2 columns");
    if (table.has_gaps()) throw StatError("correlation_matrix requires a gap-free table");

    CorrelationMatrix out;
    out.labels = columns;
    const auto p = static_cast<Eigen::Index>(columns.size());
    out.values = Eigen::MatrixXd::Identity(p, p);

    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
    }
    std::vector<const std::vector<double>*> cols(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) cols[j] = &table.col(columns[j]);

    std::vector<double> rho(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        rho[k] = spearman(*cols[static_cast<std::size_t>(i)], *cols[static_cast<std::size_t>(j)]);
    });
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        out.values(i, j) = rho[k];
        out.values(j, i) = rho[k];
    }
    return out;
}

}  // namespace ozonecast
