#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace glean {

// Scores are kept inside [kClampEps, 1 - kClampEps] so |logit| <= ~9.21.
inline constexpr double kClampEps = 1e-4;

inline double clamp_probability(double p, double eps = kClampEps) {
    return std::fmin(std::fmax(p, eps), 1.0 - eps);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)) without forming the rounded probability.
inline double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

struct Step {
    int index = 1;
    std::string observation;
    std::string action;

    bool operator==(const Step&) const = default;
};

struct Trajectory {
    std::string id;
    std::string case_id;
    std::vector<Step> steps;
    std::string answer;
    std::optional<bool> label;

    std::size_t length() const { return steps.size(); }

    bool operator==(const Trajectory&) const = default;
};

struct Guideline {
    std::string id;
    std::string title;
    std::optional<std::string> abstract;
    std::string content;
    std::vector<std::string> keywords;

    bool operator==(const Guideline&) const = default;
};

// scores[t][g]: alignment of step t+1 with guideline_ids[g].
struct RatingMatrix {
    std::string trajectory_id;
    std::vector<std::string> guideline_ids;
    std::vector<std::vector<double>> scores;

    std::size_t rows() const { return scores.size(); }
    std::size_t cols() const { return guideline_ids.size(); }

    bool operator==(const RatingMatrix&) const = default;
};

// Accumulated logit-space evidence after `step` steps.
struct EvidenceVector {
    std::vector<double> values;
    int step = 0;

    std::size_t dim() const { return values.size(); }

    bool operator==(const EvidenceVector&) const = default;
};

struct VerificationReport {
    std::string trajectory_id;
    std::string case_id;
    std::string answer;
    std::optional<bool> label;

    double confidence = 0.5;
    double uncertainty = 1.0;
    std::vector<EvidenceVector> per_step_evidence;

    // State before any active verification.
    double passive_confidence = 0.5;
    double passive_uncertainty = 1.0;

    bool active_triggered = false;
    bool differential_skipped = false;
    std::vector<std::string> guidelines_used;
    std::vector<std::string> expansion_guidelines;
    std::vector<std::string> competitive_guidelines;

    bool operator==(const VerificationReport&) const = default;
};

std::string trim(std::string_view s);

// Each throws glean::Error (kind data) describing the first violated invariant.
void validate(const Step& step);
void validate(const Trajectory& t);
void validate(const Guideline& g);
void validate(const EvidenceVector& e);
void validate_rating_matrix(const RatingMatrix& m, const Trajectory& t);

// Overload for callers that only know the legal column set, not a trajectory.
void validate_rating_matrix(const RatingMatrix& m, const Trajectory& t,
                            const std::vector<std::string>& known_guideline_ids);

// Renders steps [0, end) as "Step k:\nObservation: ...\nAction: ..." blocks
// separated by blank lines.
std::string render_history(const Trajectory& t, std::size_t end);

std::string render_guideline(const Guideline& g);

}  // namespace glean
