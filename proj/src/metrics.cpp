#include "glean/metrics.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <numeric>

#include "glean/core.hpp"
#include "glean/error.hpp"

namespace glean {

double auroc(std::span<const ScoredSample> samples) {
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return samples[a].score < samples[b].score; });

    double positives = 0.0, rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && samples[order[j]].score == samples[order[i]].score) ++j;
        // Mid-rank of the tie group (1-based ranks i+1 .. j).
        const double mid = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (samples[order[k]].label) {
                positives += 1.0;
                rank_sum += mid;
            }
        i = j;
    }
    const double negatives = static_cast<double>(samples.size()) - positives;
    if (positives == 0.0 || negatives == 0.0) throw data_error("AUROC needs both positive and negative samples");
    return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double risk_at(std::span<const ScoredSample> samples, double fraction) {
    if (samples.empty()) throw data_error("risk_at needs at least one sample");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw data_error("risk_at fraction must lie in (0, 1]");
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return samples[a].score > samples[b].score; });
    const double n = static_cast<double>(samples.size());
    // The epsilon absorbs products like 0.7 * 10 = 7.000000000000001.
    auto keep = static_cast<std::size_t>(std::ceil(fraction * n - 1e-9));
    keep = std::clamp<std::size_t>(keep, 1, samples.size());
    std::size_t errors = 0;
    for (std::size_t i = 0; i < keep; ++i) errors += samples[order[i]].label ? 0 : 1;
    return static_cast<double>(errors) / static_cast<double>(keep);
}

double ece(std::span<const ScoredSample> samples, int n_bins) {
    if (n_bins < 1) throw data_error("ece needs n_bins >= 1");
    if (samples.empty()) return 0.0;
    std::vector<double> conf(n_bins, 0.0), acc(n_bins, 0.0), count(n_bins, 0.0);
    const double bins = n_bins;
    for (const auto& s : samples) {
        const double p = std::clamp(s.score, 0.0, 1.0);
        int idx = std::clamp(static_cast<int>(std::ceil(p * bins)) - 1, 0, n_bins - 1);
        // Settle boundary cases against the exact edge values.
        while (idx > 0 && p <= idx / bins) --idx;
        while (idx < n_bins - 1 && p > (idx + 1) / bins) ++idx;
        conf[idx] += p;
        acc[idx] += s.label ? 1.0 : 0.0;
        count[idx] += 1.0;
    }
    double total = 0.0;
    const double n = static_cast<double>(samples.size());
    for (int b = 0; b < n_bins; ++b)
        if (count[b] > 0.0) total += (count[b] / n) * std::abs(conf[b] / count[b] - acc[b] / count[b]);
    return total;
}

double brier(std::span<const ScoredSample> samples) {
    if (samples.empty()) throw data_error("brier needs at least one sample");
    double sum = 0.0;
    for (const auto& s : samples) {
        const double diff = s.score - (s.label ? 1.0 : 0.0);
        sum += diff * diff;
    }
    return sum / static_cast<double>(samples.size());
}

namespace {

// Index of the chosen candidate for each case, cases in order of first appearance.
std::vector<std::size_t> best_of_n_picks(std::span<const ScoredSample> samples, int n) {
    if (n < 1) throw data_error("best_of_n needs n >= 1");
    std::vector<std::string> case_order;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string key = samples[i].case_id.value_or("");
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) case_order.push_back(key);
        it->second.push_back(i);
    }
    if (case_order.empty()) throw data_error("best_of_n needs at least one case");
    std::vector<std::size_t> picks;
    picks.reserve(case_order.size());
    for (const auto& key : case_order) {
        const auto& idx = groups[key];
        if (idx.size() < static_cast<std::size_t>(n))
            throw data_error("case '" + key + "' has " + std::to_string(idx.size()) +
                             " candidates, fewer than n = " + std::to_string(n));
        std::size_t best = idx[0];
        for (int c = 1; c < n; ++c)
            if (samples[idx[c]].score > samples[best].score) best = idx[c];
        picks.push_back(best);
    }
    return picks;
}

}  // namespace

double best_of_n(std::span<const ScoredSample> samples, int n) {
    const auto picks = best_of_n_picks(samples, n);
    double correct = 0.0;
    for (auto i : picks) correct += samples[i].label ? 1.0 : 0.0;
    return correct / static_cast<double>(picks.size());
}

double best_of_n(std::span<const ScoredSample> samples, int n,
                 const std::function<bool(const std::string&, const std::string&)>& is_correct) {
    const auto picks = best_of_n_picks(samples, n);
    double correct = 0.0;
    for (auto i : picks)
        correct += is_correct(samples[i].case_id.value_or(""), samples[i].answer.value_or("")) ? 1.0 : 0.0;
    return correct / static_cast<double>(picks.size());
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw data_error("Welch's t-test needs at least two samples per group");
    auto moments = [](std::span<const double> v) {
        const double n = static_cast<double>(v.size());
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair{mean, ss / (n - 1.0)};
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double se2 = va / na + vb / nb;
    WelchResult r;
    if (se2 == 0.0) {
        r.t = ma == mb ? 0.0 : std::copysign(INFINITY, ma - mb);
        r.dof = na + nb - 2.0;
        r.p_value = ma == mb ? 1.0 : 0.0;
        return r;
    }
    r.t = (ma - mb) / std::sqrt(se2);
    r.dof = se2 * se2 / ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    const boost::math::students_t dist(r.dof);
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    r.p_value = std::clamp(r.p_value, 0.0, 1.0);
    return r;
}

LinearityDiagnostic linearity_diagnostic(std::span<const EvidencePoint> evidence, int n_bins) {
    if (n_bins < 3) throw data_error("linearity diagnostic needs n_bins >= 3");
    std::vector<double> pos, neg;
    for (const auto& e : evidence) {
        if (!std::isfinite(e.s)) throw data_error("linearity diagnostic got non-finite evidence");
        (e.label ? pos : neg).push_back(e.s);
    }
    if (pos.empty() || neg.empty()) throw data_error("linearity diagnostic needs both labels present");

    std::vector<EvidencePoint> sorted(evidence.begin(), evidence.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.s < b.s; });
    const std::size_t n = sorted.size();

    LinearityDiagnostic out;
    out.n_bins = n_bins;
    for (int b = 0; b < n_bins; ++b) {
        const std::size_t lo = n * b / n_bins, hi = n * (b + 1) / n_bins;
        out.bin_edges.push_back(lo < n ? sorted[lo].s : sorted.back().s);
        if (hi <= lo) continue;
        double sum = 0.0, hits = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            sum += sorted[i].s;
            hits += sorted[i].label ? 1.0 : 0.0;
        }
        const double m = static_cast<double>(hi - lo);
        if (hits == 0.0 || hits == m) continue;  // pure bins carry no slope information
        out.bin_centers.push_back(sum / m);
        out.bin_logits.push_back(logit((hits + 1.0) / (m + 2.0)));
    }
    out.bin_edges.push_back(sorted.back().s);
    if (out.bin_centers.size() < 3) throw data_error("linearity diagnostic has fewer than 3 usable bins");

    const double k = static_cast<double>(out.bin_centers.size());
    const double mx = std::accumulate(out.bin_centers.begin(), out.bin_centers.end(), 0.0) / k;
    const double my = std::accumulate(out.bin_logits.begin(), out.bin_logits.end(), 0.0) / k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < out.bin_centers.size(); ++i) {
        const double dx = out.bin_centers[i] - mx, dy = out.bin_logits[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw data_error("linearity diagnostic: evidence is constant across bins");
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);

    const auto welch = welch_t_test(pos, neg);
    out.welch_t = welch.t;
    out.welch_p = welch.p_value;
    return out;
}

}  // namespace glean
