#pragma once

#include <span>
#include <string>

namespace quakesense {

struct SignificanceResult {
    double t = 0.0;
    double df = 0.0;      // Welch-Satterthwaite
    double p = 1.0;       // two-tailed
    std::string stars;    // "***" p<0.01, "**" p<0.05, "*" p<0.1, "ns" otherwise

    bool operator==(const SignificanceResult&) const = default;
};

double mean(std::span<const double> xs);

// Unbiased (n-1) sample variance.
double sample_variance(std::span<const double> xs);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// CDF of Student's t with (possibly fractional) df degrees of freedom.
double students_t_cdf(double t, double df);

std::string significance_stars(double p);

// Welch's unequal-variance t-test, two-tailed. Each sample needs >= 2 values
// and at least one of them positive variance; identical samples (both
// zero-variance, equal means) return t=0, p=1 by convention. Throws
// ValidationError on degenerate input.
SignificanceResult welch_t_test(std::span<const double> sample_a,
                                std::span<const double> sample_b);

}  // namespace quakesense
