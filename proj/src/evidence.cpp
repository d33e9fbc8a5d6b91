#include "glean/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "glean/error.hpp"

namespace glean {

std::string to_string(Statistic s) {
    switch (s) {
        case Statistic::avg: return "avg";
        case Statistic::min: return "min";
        case Statistic::max: return "max";
        case Statistic::std: return "std";
    }
    return "?";
}

Statistic parse_statistic(const std::string& name) {
    if (name == "avg" || name == "mean") return Statistic::avg;
    if (name == "min") return Statistic::min;
    if (name == "max") return Statistic::max;
    if (name == "std") return Statistic::std;
    throw data_error("unknown aggregation statistic '" + name + "'");
}

std::vector<std::string> AggregationSpec::names() const {
    std::vector<std::string> out;
    for (auto s : statistics) out.push_back(to_string(s));
    return out;
}

AggregationSpec AggregationSpec::from_names(const std::vector<std::string>& names) {
    AggregationSpec spec;
    spec.statistics.clear();
    for (const auto& n : names) spec.statistics.push_back(parse_statistic(n));
    validate(spec);
    return spec;
}

void validate(const AggregationSpec& spec) {
    if (spec.statistics.empty()) throw data_error("aggregation spec needs at least one statistic");
    std::set<Statistic> seen;
    for (auto s : spec.statistics)
        if (!seen.insert(s).second) throw data_error("aggregation statistic " + to_string(s) + " repeated");
}

Feature aggregate_step(std::span<const double> scores, const AggregationSpec& spec) {
    if (scores.empty()) throw data_error("cannot aggregate an empty score set");
    const double n = static_cast<double>(scores.size());
    double sum = 0.0;
    for (double s : scores) sum += s;
    const double mean = sum / n;
    Feature out;
    out.reserve(spec.d());
    for (auto stat : spec.statistics) {
        double v = 0.0;
        switch (stat) {
            case Statistic::avg: v = mean; break;
            case Statistic::min: v = *std::min_element(scores.begin(), scores.end()); break;
            case Statistic::max: v = *std::max_element(scores.begin(), scores.end()); break;
            case Statistic::std: {
                double ss = 0.0;
                for (double s : scores) ss += (s - mean) * (s - mean);
                v = std::sqrt(ss / n);
                break;
            }
        }
        out.push_back(clamp_probability(v));
    }
    return out;
}

std::vector<Feature> aggregate_matrix(const RatingMatrix& m, const AggregationSpec& spec) {
    std::vector<Feature> out;
    out.reserve(m.rows());
    for (const auto& row : m.scores) out.push_back(aggregate_step(row, spec));
    return out;
}

std::vector<EvidenceVector> accumulate(const std::vector<Feature>& features, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw data_error("discount beta must lie in [0, 1]");
    if (features.empty()) throw data_error("cannot accumulate an empty feature sequence");
    const std::size_t d = features.front().size();
    std::vector<EvidenceVector> out;
    out.reserve(features.size());
    std::vector<double> running(d, 0.0);
    for (std::size_t t = 0; t < features.size(); ++t) {
        if (features[t].size() != d) throw data_error("feature dimension changes along the trajectory");
        for (std::size_t j = 0; j < d; ++j) running[j] = beta * running[j] + logit(features[t][j]);
        out.push_back({running, static_cast<int>(t) + 1});
    }
    return out;
}

double rectify(double score, double competitive_max, double alpha) {
    if (!(alpha >= 0.0)) throw data_error("rectification alpha must be >= 0");
    if (alpha == 0.0) return clamp_probability(score);
    return clamp_probability(sigmoid(logit(score) - alpha * logit(competitive_max)));
}

RatingMatrix rectify_matrix(const RatingMatrix& m, const RatingMatrix& competitive, double alpha) {
    if (m.rows() != competitive.rows())
        throw data_error("rectification needs matching step counts (" + std::to_string(m.rows()) + " vs " +
                         std::to_string(competitive.rows()) + ")");
    RatingMatrix out = m;
    for (std::size_t t = 0; t < m.rows(); ++t) {
        const auto& comp = competitive.scores[t];
        if (comp.empty()) throw data_error("competitive matrix has an empty row");
        const double s_minus = *std::max_element(comp.begin(), comp.end());
        for (auto& s : out.scores[t]) s = rectify(s, s_minus, alpha);
    }
    return out;
}

std::vector<EvidenceVector> evidence_path(const RatingMatrix& m, const AggregationSpec& spec, double beta) {
    return accumulate(aggregate_matrix(m, spec), beta);
}

}  // namespace glean
