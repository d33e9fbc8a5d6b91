#include "glean/calibration.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "glean/error.hpp"
#include "glean/io.hpp"
#include "glean/rng.hpp"

namespace glean {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Design matrix with a trailing column of ones, so theta = (w, b).
struct Problem {
    MatrixXd x;
    VectorXd z;
    double lambda;

    double log_post(const VectorXd& theta) const {
        const VectorXd eta = x * theta;
        double ll = 0.0;
        for (Eigen::Index i = 0; i < eta.size(); ++i)
            ll += z[i] > 0.5 ? log_sigmoid(eta[i]) : log_sigmoid(-eta[i]);
        return ll - 0.5 * lambda * theta.squaredNorm();
    }

    VectorXd gradient(const VectorXd& theta) const {
        const VectorXd eta = x * theta;
        VectorXd resid(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) resid[i] = z[i] - sigmoid(eta[i]);
        return x.transpose() * resid - lambda * theta;
    }

    // Negative Hessian (positive definite).
    MatrixXd precision(const VectorXd& theta) const {
        const VectorXd eta = x * theta;
        VectorXd wts(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            const double p = sigmoid(eta[i]);
            wts[i] = p * (1.0 - p);
        }
        MatrixXd h = x.transpose() * wts.asDiagonal() * x;
        h.diagonal().array() += lambda;
        return h;
    }
};

Problem make_problem(std::span<const CalibrationSample> data, double lambda) {
    const std::size_t d = data.front().evidence.dim();
    Problem p{MatrixXd(data.size(), d + 1), VectorXd(data.size()), lambda};
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& s = data[i];
        if (s.evidence.dim() != d) throw data_error("calibration samples have inconsistent evidence dimensions");
        validate(s.evidence);
        for (std::size_t j = 0; j < d; ++j) p.x(i, j) = s.evidence.values[j];
        p.x(i, d) = 1.0;
        p.z[i] = s.label ? 1.0 : 0.0;
    }
    return p;
}

// Damped Newton ascent on the log posterior (concave, so this reaches the mode).
VectorXd find_map(const Problem& p, int max_steps) {
    VectorXd theta = VectorXd::Zero(p.x.cols());
    double current = p.log_post(theta);
    for (int it = 0; it < max_steps; ++it) {
        const VectorXd g = p.gradient(theta);
        if (g.lpNorm<Eigen::Infinity>() < 1e-10) break;
        const VectorXd step = p.precision(theta).ldlt().solve(g);
        double scale = 1.0;
        bool improved = false;
        for (int half = 0; half < 40; ++half, scale *= 0.5) {
            const VectorXd cand = theta + scale * step;
            const double val = p.log_post(cand);
            if (std::isfinite(val) && val >= current) {
                theta = cand;
                current = val;
                improved = true;
                break;
            }
        }
        if (!improved || (scale * step).lpNorm<Eigen::Infinity>() < 1e-12) break;
    }
    return theta;
}

}  // namespace

double log_posterior(std::span<const double> w, double b, std::span<const CalibrationSample> data, double lambda) {
    if (!(lambda > 0.0)) throw data_error("prior precision lambda must be > 0");
    if (!std::isfinite(b)) throw data_error("non-finite bias");
    double norm = b * b;
    for (double v : w) {
        if (!std::isfinite(v)) throw data_error("non-finite weight");
        norm += v * v;
    }
    double ll = 0.0;
    for (const auto& s : data) {
        if (s.evidence.dim() != w.size()) throw data_error("evidence dimension does not match weights");
        double eta = b;
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (!std::isfinite(s.evidence.values[j])) throw data_error("non-finite evidence");
            eta += w[j] * s.evidence.values[j];
        }
        ll += s.label ? log_sigmoid(eta) : log_sigmoid(-eta);
    }
    return ll - 0.5 * lambda * norm;
}

CalibratorPosterior fit(std::span<const CalibrationSample> data, const FitOptions& opts) {
    if (data.empty()) throw data_error("degenerate calibration set: no labeled samples");
    const auto positives = std::count_if(data.begin(), data.end(), [](const auto& s) { return s.label; });
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(data.size()))
        throw data_error("degenerate calibration set: all labels are " + std::string(positives ? "true" : "false"));
    if (opts.n_draws < 100) throw data_error("n_draws must be >= 100");
    if (!(opts.lambda > 0.0)) throw data_error("prior precision lambda must be > 0");

    const Problem problem = make_problem(data, opts.lambda);
    const Eigen::Index dim = problem.x.cols();

    VectorXd theta = find_map(problem, opts.max_map_steps);
    double current = problem.log_post(theta);
    if (!std::isfinite(current)) throw data_error("non-finite posterior at the MAP point");

    // Proposal: Laplace covariance at the mode, times adaptive per-coordinate scales.
    const MatrixXd cov = problem.precision(theta).inverse();
    const MatrixXd chol = Eigen::LLT<MatrixXd>(0.5 * (cov + cov.transpose())).matrixL();
    VectorXd scales = VectorXd::Constant(dim, 2.38 / std::sqrt(static_cast<double>(dim)));

    Rng rng(opts.seed);
    auto propose_and_step = [&]() {
        VectorXd noise(dim);
        for (Eigen::Index i = 0; i < dim; ++i) noise[i] = scales[i] * rng.normal();
        const VectorXd cand = theta + chol * noise;
        const double val = problem.log_post(cand);
        const double u = rng.uniform();
        if (std::isfinite(val) && std::log(u) < val - current) {
            theta = cand;
            current = val;
            return true;
        }
        return false;
    };

    const int burn_in = opts.n_draws;
    constexpr int kBatch = 50;
    int batch_accepts = 0;
    for (int it = 1; it <= burn_in; ++it) {
        batch_accepts += propose_and_step();
        if (it % kBatch == 0) {
            const double rate = static_cast<double>(batch_accepts) / kBatch;
            if (rate < 0.2) scales *= 0.8;
            else if (rate > 0.4) scales *= 1.25;
            batch_accepts = 0;
        }
    }

    CalibratorPosterior post;
    post.lambda = opts.lambda;
    post.seed = opts.seed;
    post.n_burn_in = burn_in;
    post.d = static_cast<std::size_t>(dim - 1);
    post.draws.reserve(opts.n_draws);
    int accepts = 0;
    const int iterations = 2 * opts.n_draws;
    for (int it = 1; it <= iterations; ++it) {
        accepts += propose_and_step();
        if (it % 2 == 0) {
            PosteriorDraw draw;
            draw.w.assign(theta.data(), theta.data() + post.d);
            draw.b = theta[dim - 1];
            post.draws.push_back(std::move(draw));
        }
    }
    if (!std::isfinite(current)) throw data_error("non-finite posterior during sampling");
    post.acceptance_rate = static_cast<double>(accepts) / iterations;
    return post;
}

CalibratorPosterior fit(std::span<const CalibrationSample> data, double lambda, int n_draws, std::uint64_t seed) {
    FitOptions opts;
    opts.lambda = lambda;
    opts.n_draws = n_draws;
    opts.seed = seed;
    return fit(data, opts);
}

namespace {

void check_dim(const CalibratorPosterior& post, const EvidenceVector& evidence) {
    if (post.draws.empty()) throw data_error("calibrator has no posterior draws");
    if (evidence.dim() != post.d)
        throw data_error("evidence has dimension " + std::to_string(evidence.dim()) + " but the calibrator expects " +
                         std::to_string(post.d));
}

double linear(const PosteriorDraw& draw, const EvidenceVector& evidence) {
    double eta = draw.b;
    for (std::size_t j = 0; j < draw.w.size(); ++j) eta += draw.w[j] * evidence.values[j];
    return eta;
}

}  // namespace

double predict(const CalibratorPosterior& post, const EvidenceVector& evidence) {
    check_dim(post, evidence);
    // Positive logits contribute 1 - sigmoid(-z): the tails are summed apart
    // from the whole-number part, so sigma(z) + sigma(-z) cancels exactly.
    double whole = 0.0, tails = 0.0;
    for (const auto& draw : post.draws) {
        const double z = linear(draw, evidence);
        if (z >= 0.0) {
            whole += 1.0;
            tails -= sigmoid(-z);
        } else {
            tails += sigmoid(z);
        }
    }
    const double p = (whole + tails) / static_cast<double>(post.draws.size());
    return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double predictive_variance(const CalibratorPosterior& post, const EvidenceVector& evidence) {
    check_dim(post, evidence);
    const double mean = predict(post, evidence);
    double ss = 0.0;
    for (const auto& draw : post.draws) {
        const double dv = sigmoid(linear(draw, evidence)) - mean;
        ss += dv * dv;
    }
    return ss / static_cast<double>(post.draws.size());
}

PosteriorSummary posterior_mean(const CalibratorPosterior& post) {
    PosteriorSummary out;
    out.w_mean.assign(post.d, 0.0);
    for (const auto& draw : post.draws) {
        for (std::size_t j = 0; j < post.d; ++j) out.w_mean[j] += draw.w[j];
        out.b_mean += draw.b;
    }
    const double n = static_cast<double>(std::max<std::size_t>(post.draws.size(), 1));
    for (double& v : out.w_mean) v /= n;
    out.b_mean /= n;
    return out;
}

double uncertainty(double p, EntropyUnit unit) {
    auto term = [](double q) { return q > 0.0 ? -q * std::log(q) : 0.0; };
    const double nats = term(p) + term(1.0 - p);
    return unit == EntropyUnit::nats ? nats : nats / std::log(2.0);
}

void save_calibrator(const std::filesystem::path& path, const CalibratorPosterior& post) {
    std::vector<json> lines;
    lines.reserve(post.draws.size() + 1);
    lines.push_back(json{{"lambda", post.lambda},
                         {"seed", post.seed},
                         {"n_burn_in", post.n_burn_in},
                         {"acceptance_rate", post.acceptance_rate},
                         {"d", post.d},
                         {"n_draws", post.draws.size()},
                         {"statistics", post.statistics},
                         {"beta", post.beta},
                         {"clamp", post.clamp}});
    for (const auto& draw : post.draws) lines.push_back(json{{"w", draw.w}, {"b", draw.b}});
    write_jsonl(path, lines);
}

CalibratorPosterior load_calibrator(const std::filesystem::path& path) {
    const auto lines = read_jsonl(path);
    if (lines.empty()) throw input_error(path.string() + ": calibrator file is empty");
    CalibratorPosterior post;
    try {
        const auto& h = lines.front().value;
        h.at("lambda").get_to(post.lambda);
        h.at("seed").get_to(post.seed);
        h.at("n_burn_in").get_to(post.n_burn_in);
        h.at("acceptance_rate").get_to(post.acceptance_rate);
        h.at("d").get_to(post.d);
        post.statistics = h.value("statistics", std::vector<std::string>{});
        post.beta = h.value("beta", 0.5);
        post.clamp = h.value("clamp", kClampEps);
    } catch (const json::exception& e) {
        throw input_error(path.string() + ":" + std::to_string(lines.front().line_no) + ": invalid header: " + e.what());
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        PosteriorDraw draw;
        try {
            lines[i].value.at("w").get_to(draw.w);
            lines[i].value.at("b").get_to(draw.b);
        } catch (const json::exception& e) {
            throw input_error(path.string() + ":" + std::to_string(lines[i].line_no) + ": invalid draw: " + e.what());
        }
        if (draw.w.size() != post.d)
            throw input_error(path.string() + ":" + std::to_string(lines[i].line_no) + ": draw dimension mismatch");
        post.draws.push_back(std::move(draw));
    }
    if (post.draws.empty()) throw input_error(path.string() + ": calibrator has no draws");
    return post;
}

}  // namespace glean
