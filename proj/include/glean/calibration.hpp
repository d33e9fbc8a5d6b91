#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "glean/core.hpp"

namespace glean {

struct CalibrationSample {
    EvidenceVector evidence;  // S_T
    bool label = false;
};

struct PosteriorDraw {
    std::vector<double> w;
    double b = 0.0;

    bool operator==(const PosteriorDraw&) const = default;
};

struct CalibratorPosterior {
    std::vector<PosteriorDraw> draws;
    double lambda = 1.0;
    std::uint64_t seed = 0;
    int n_burn_in = 0;
    double acceptance_rate = 0.0;
    std::size_t d = 0;

    // How the evidence fed to this calibrator was built; checked on use.
    std::vector<std::string> statistics;
    double beta = 0.5;
    double clamp = kClampEps;

    bool operator==(const CalibratorPosterior&) const = default;
};

// Log joint of a logistic likelihood and N(0, 1/lambda) priors on w and b,
// up to an additive constant.
double log_posterior(std::span<const double> w, double b, std::span<const CalibrationSample> data, double lambda);

struct FitOptions {
    double lambda = 1.0;
    int n_draws = 2000;
    std::uint64_t seed = 0;
    int max_map_steps = 500;
};

// Random-walk Metropolis over (w, b) started at the MAP point. Burn-in of
// n_draws iterations adapts the proposal scale toward 20-40% acceptance,
// then 2 * n_draws iterations are run and every second state is kept.
// Throws data error "degenerate calibration set" on single-class data.
CalibratorPosterior fit(std::span<const CalibrationSample> data, const FitOptions& opts);

CalibratorPosterior fit(std::span<const CalibrationSample> data, double lambda, int n_draws, std::uint64_t seed);

// Posterior predictive mean of sigmoid(w.S + b) over all draws.
double predict(const CalibratorPosterior& post, const EvidenceVector& evidence);

// Variance of sigmoid(w.S + b) across draws. Diagnostic only.
double predictive_variance(const CalibratorPosterior& post, const EvidenceVector& evidence);

struct PosteriorSummary {
    std::vector<double> w_mean;
    double b_mean = 0.0;
};

PosteriorSummary posterior_mean(const CalibratorPosterior& post);

enum class EntropyUnit { bits, nats };

// Binary entropy of p with 0 log 0 = 0.
double uncertainty(double p, EntropyUnit unit = EntropyUnit::bits);

void save_calibrator(const std::filesystem::path& path, const CalibratorPosterior& post);
CalibratorPosterior load_calibrator(const std::filesystem::path& path);

}  // namespace glean
