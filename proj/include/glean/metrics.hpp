#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace glean {

struct ScoredSample {
    double score = 0.5;
    bool label = false;
    std::optional<std::string> case_id;
    std::optional<std::string> answer;
};

// Mann-Whitney AUROC with ties counted as one half. O(n log n).
double auroc(std::span<const ScoredSample> samples);

// Error rate among the ceil(fraction * n) highest-scoring samples; ties keep input order.
double risk_at(std::span<const ScoredSample> samples, double fraction);

// Equal-width bins over [0, 1]; the first bin is closed, the rest are (lo, hi].
double ece(std::span<const ScoredSample> samples, int n_bins = 10);

double brier(std::span<const ScoredSample> samples);

// Candidates are grouped by case_id in order of first appearance; within each
// case the first n are considered and the highest score (lowest index on ties)
// is picked. Returns the fraction of cases whose pick is correct.
double best_of_n(std::span<const ScoredSample> samples, int n);

// As above, but correctness of the pick is decided by `is_correct(case_id, answer)`.
double best_of_n(std::span<const ScoredSample> samples, int n,
                 const std::function<bool(const std::string&, const std::string&)>& is_correct);

struct WelchResult {
    double t = 0.0;
    double dof = 0.0;
    double p_value = 1.0;  // two-sided
};

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

struct LinearityDiagnostic {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int n_bins = 0;
    std::vector<double> bin_edges;  // n_bins + 1 edges over the sorted evidence
    std::vector<double> bin_centers;
    std::vector<double> bin_logits;
    double welch_t = 0.0;
    double welch_p = 1.0;
};

struct EvidencePoint {
    double s = 0.0;
    bool label = false;
};

// Equal-count bins over S, Laplace-smoothed empirical P(Z=1) per mixed-label bin, least
// squares of logit(p) on the bin mean of S, plus Welch's t-test of S|Z=1
// against S|Z=0.
LinearityDiagnostic linearity_diagnostic(std::span<const EvidencePoint> evidence, int n_bins = 10);

}  // namespace glean
