#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <unistd.h>

#include "glean/calibration.hpp"
#include "glean/error.hpp"
#include "glean/rng.hpp"

using namespace glean;

namespace {

std::vector<CalibrationSample> logistic_data(std::size_t n, std::uint64_t seed, double a = 1.5, double c = -0.2) {
    Rng rng(seed);
    std::vector<CalibrationSample> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = 2.0 * rng.normal();
        out.push_back({{{s}, 1}, rng.bernoulli(sigmoid(a * s + c))});
    }
    return out;
}

CalibratorPosterior single(std::vector<double> w, double b) {
    CalibratorPosterior p;
    p.d = w.size();
    p.draws.push_back({std::move(w), b});
    return p;
}

}  // namespace

TEST_CASE("log posterior examples") {
    const std::vector<double> w0{0.0}, w1{1.0}, w3{3.0};
    CHECK(log_posterior(w3, 2.0, {}, 0.5) == doctest::Approx(-0.25 * 13.0));
    const std::vector<CalibrationSample> one{{{{0.7}, 1}, false}};
    CHECK(log_posterior(w0, 0.0, one, 1.0) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
    const std::vector<CalibrationSample> pos{{{{2.0}, 1}, true}};
    // log sigmoid(2) - 1/2
    CHECK(log_posterior(w1, 0.0, pos, 1.0) == doctest::Approx(-0.626928).epsilon(1e-6));
}

TEST_CASE("predict examples") {
    CHECK(predict(single({0.0}, 0.0), {{3.0}, 1}) == 0.5);
    CalibratorPosterior sym = single({1.0}, 0.0);
    sym.draws.push_back({{-1.0}, 0.0});
    for (double x : {-3.0, 0.1, 7.5}) CHECK(predict(sym, {{x}, 1}) == 0.5);
    CHECK(predict(single({2.0}, 1.0), {{0.5}, 1}) == doctest::Approx(0.880797).epsilon(1e-6));
    CHECK_THROWS_AS(predict(single({1.0}, 0.0), {{1.0, 2.0}, 1}), Error);
    const double p = predict(single({100.0}, 0.0), {{50.0}, 1});
    CHECK(p < 1.0);
    CHECK(p > 0.0);
}

TEST_CASE("uncertainty examples") {
    CHECK(uncertainty(0.5) == 1.0);
    CHECK(uncertainty(1.0) == 0.0);
    CHECK(uncertainty(0.0) == 0.0);
    CHECK(uncertainty(0.75) == doctest::Approx(0.811278).epsilon(1e-6));
    CHECK(uncertainty(0.99) == doctest::Approx(0.080793).epsilon(1e-5));
    CHECK(uncertainty(0.5, EntropyUnit::nats) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("fit recovers the generating parameters") {
    const auto data = logistic_data(500, 3);
    const auto post = fit(data, 1.0, 2000, 9);
    CHECK(post.draws.size() == 2000);
    CHECK(post.n_burn_in == 2000);
    CHECK(post.d == 1);
    CHECK(post.acceptance_rate > 0.1);
    CHECK(post.acceptance_rate < 0.6);
    const auto m = posterior_mean(post);
    CHECK(std::abs(m.w_mean[0] - 1.5) <= 0.3);
    CHECK(std::abs(m.b_mean + 0.2) <= 0.3);
}

TEST_CASE("fit is seeded") {
    const auto data = logistic_data(200, 4);
    const auto a = fit(data, 1.0, 500, 17);
    CHECK(a == fit(data, 1.0, 500, 17));
    CHECK(!(a.draws == fit(data, 1.0, 500, 18).draws));
}

TEST_CASE("a strong prior dominates") {
    const auto post = fit(logistic_data(300, 5), 1e6, 500, 1);
    const auto m = posterior_mean(post);
    CHECK(std::hypot(m.w_mean[0], m.b_mean) < 0.05);
}

TEST_CASE("fit input errors") {
    auto one_class = logistic_data(50, 6);
    for (auto& s : one_class) s.label = true;
    CHECK_THROWS_WITH_AS(fit(one_class, 1.0, 500, 0), doctest::Contains("degenerate calibration set"), Error);
    CHECK_THROWS_AS(fit({}, 1.0, 500, 0), Error);
    CHECK_THROWS_AS(fit(logistic_data(50, 6), 1.0, 50, 0), Error);
    CHECK_THROWS_AS(fit(logistic_data(50, 6), 0.0, 500, 0), Error);
    auto mixed = logistic_data(50, 6);
    mixed[3].evidence.values.push_back(1.0);
    CHECK_THROWS_AS(fit(mixed, 1.0, 500, 0), Error);
}

TEST_CASE("multivariate fit") {
    Rng rng(8);
    std::vector<CalibrationSample> data;
    for (int i = 0; i < 800; ++i) {
        const double x = 2 * rng.normal(), y = 2 * rng.normal();
        data.push_back({{{x, y}, 1}, rng.bernoulli(sigmoid(1.0 * x - 0.5 * y + 0.3))});
    }
    const auto m = posterior_mean(fit(data, 1.0, 1000, 2));
    CHECK(m.w_mean[0] == doctest::Approx(1.0).epsilon(0.3));
    CHECK(m.w_mean[1] == doctest::Approx(-0.5).epsilon(0.4));
}

TEST_CASE("calibrator round trip") {
    auto post = fit(logistic_data(100, 7), 1.0, 200, 3);
    post.statistics = {"min", "avg"};
    const auto path = std::filesystem::temp_directory_path() / ("glean_cal_" + std::to_string(::getpid()) + ".jsonl");
    save_calibrator(path, post);
    const auto back = load_calibrator(path);
    std::filesystem::remove(path);
    CHECK(back == post);
}
