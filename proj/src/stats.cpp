#include "quakesense/stats.hpp"

#include <cmath>
#include <limits>

#include "quakesense/errors.hpp"

namespace quakesense {

double mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / double(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / double(xs.size() - 1);
}

namespace {

// Lentz continued fraction for the incomplete beta, standard form.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double students_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw ValidationError("t distribution needs df > 0");
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

std::string significance_stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "ns";
}

SignificanceResult welch_t_test(std::span<const double> sample_a,
                                std::span<const double> sample_b) {
    if (sample_a.size() < 2 || sample_b.size() < 2)
        throw ValidationError("welch_t_test: each sample needs at least 2 values");
    const double na = double(sample_a.size());
    const double nb = double(sample_b.size());
    const double ma = mean(sample_a);
    const double mb = mean(sample_b);
    const double va = sample_variance(sample_a);
    const double vb = sample_variance(sample_b);

    if (va <= 0.0 && vb <= 0.0) {
        if (ma == mb) return {0.0, na + nb - 2.0, 1.0, "ns"};
        throw ValidationError("welch_t_test: both samples have zero variance");
    }

    const double sa = va / na;
    const double sb = vb / nb;
    const double t = (ma - mb) / std::sqrt(sa + sb);
    const double df =
        (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
    const double p = 2.0 * students_t_cdf(-std::fabs(t), df);
    return {t, df, std::min(1.0, p), significance_stars(std::min(1.0, p))};
}

}  // namespace quakesense
