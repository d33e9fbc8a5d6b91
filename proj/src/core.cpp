#include "glean/core.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "glean/error.hpp"

namespace glean {

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    auto first = std::find_if_not(s.begin(), s.end(), is_space);
    auto last = std::find_if_not(s.rbegin(), s.rend(), is_space).base();
    return first < last ? std::string(first, last) : std::string();
}

void validate(const Step& step) {
    if (step.index < 1) throw data_error("step index must be >= 1, got " + std::to_string(step.index));
    if (trim(step.observation).empty())
        throw data_error("step " + std::to_string(step.index) + " has an empty observation");
    if (trim(step.action).empty())
        throw data_error("step " + std::to_string(step.index) + " has an empty action");
}

void validate(const Trajectory& t) {
    if (t.id.empty()) throw data_error("trajectory id is empty");
    if (t.steps.empty()) throw data_error("trajectory " + t.id + " has no steps");
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        validate(t.steps[i]);
        if (t.steps[i].index != static_cast<int>(i) + 1)
            throw data_error("trajectory " + t.id + ": step indices must be contiguous from 1, found " +
                             std::to_string(t.steps[i].index) + " at position " + std::to_string(i + 1));
    }
}

void validate(const Guideline& g) {
    if (g.id.empty()) throw data_error("guideline id is empty");
    if (trim(g.title).empty()) throw data_error("guideline " + g.id + " has an empty title");
    if (trim(g.content).empty()) throw data_error("guideline " + g.id + " has empty content");
}

void validate(const EvidenceVector& e) {
    for (double v : e.values)
        if (!std::isfinite(v)) throw data_error("evidence vector has a non-finite component");
}

namespace {

void check_matrix_shape(const RatingMatrix& m, const Trajectory& t) {
    if (m.trajectory_id != t.id)
        throw data_error("rating matrix belongs to " + m.trajectory_id + ", not " + t.id);
    if (m.rows() != t.length())
        throw data_error("rating matrix for " + t.id + " has " + std::to_string(m.rows()) +
                         " rows but the trajectory has " + std::to_string(t.length()) + " steps");
    std::set<std::string> seen;
    for (const auto& id : m.guideline_ids) {
        if (id.empty()) throw data_error("rating matrix for " + t.id + " has an empty guideline id");
        if (!seen.insert(id).second)
            throw data_error("rating matrix for " + t.id + " repeats guideline id " + id);
    }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (m.scores[r].size() != m.cols())
            throw data_error("rating matrix for " + t.id + ": row " + std::to_string(r + 1) + " has " +
                             std::to_string(m.scores[r].size()) + " columns, expected " +
                             std::to_string(m.cols()));
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double s = m.scores[r][c];
            if (!(s >= kClampEps && s <= 1.0 - kClampEps)) {
                std::ostringstream os;
                os << "rating matrix for " << t.id << ": score " << s << " at (step " << r + 1
                   << ", " << m.guideline_ids[c] << ") is outside the clamp range";
                throw data_error(os.str());
            }
        }
    }
}

}  // namespace

void validate_rating_matrix(const RatingMatrix& m, const Trajectory& t) { check_matrix_shape(m, t); }

void validate_rating_matrix(const RatingMatrix& m, const Trajectory& t,
                            const std::vector<std::string>& known_guideline_ids) {
    check_matrix_shape(m, t);
    const std::set<std::string> known(known_guideline_ids.begin(), known_guideline_ids.end());
    for (const auto& id : m.guideline_ids)
        if (!known.contains(id))
            throw data_error("rating matrix for " + t.id + " references unknown guideline " + id);
}

std::string render_history(const Trajectory& t, std::size_t end) {
    std::string out;
    end = std::min(end, t.steps.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (i > 0) out += "\n\n";
        const auto& s = t.steps[i];
        out += "Step " + std::to_string(s.index) + ":\nObservation: " + s.observation +
               "\nAction: " + s.action;
    }
    return out;
}

std::string render_guideline(const Guideline& g) {
    std::string out = g.title;
    if (g.abstract && !g.abstract->empty() && *g.abstract != g.content) out += "\n" + *g.abstract;
    out += "\n" + g.content;
    return out;
}

}  // namespace glean
