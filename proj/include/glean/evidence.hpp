#pragma once

#include <span>
#include <string>
#include <vector>

#include "glean/core.hpp"

namespace glean {

enum class Statistic { avg, min, max, std };

std::string to_string(Statistic s);
Statistic parse_statistic(const std::string& name);

// Ordered statistics extracted from one step's guideline ratings.
struct AggregationSpec {
    std::vector<Statistic> statistics{Statistic::min, Statistic::avg};

    std::size_t d() const { return statistics.size(); }
    std::vector<std::string> names() const;
    static AggregationSpec from_names(const std::vector<std::string>& names);

    bool operator==(const AggregationSpec&) const = default;
};

void validate(const AggregationSpec& spec);

using Feature = std::vector<double>;

// Statistics over one step's scores (std is the population form), each
// re-clamped into the score range.
Feature aggregate_step(std::span<const double> scores, const AggregationSpec& spec);

std::vector<Feature> aggregate_matrix(const RatingMatrix& m, const AggregationSpec& spec);

// S_t = beta * S_{t-1} + logit(s_t), elementwise; beta = 0 gives S_t = logit(s_t).
std::vector<EvidenceVector> accumulate(const std::vector<Feature>& features, double beta);

// sigmoid(logit(score) - alpha * logit(competitive_max)), clamped.
double rectify(double score, double competitive_max, double alpha);

// Rectifies every cell of `m` against the row-wise max of `competitive`.
RatingMatrix rectify_matrix(const RatingMatrix& m, const RatingMatrix& competitive, double alpha);

// aggregate_matrix followed by accumulate.
std::vector<EvidenceVector> evidence_path(const RatingMatrix& m, const AggregationSpec& spec, double beta);

}  // namespace glean
