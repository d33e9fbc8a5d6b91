#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "glean/calibration.hpp"
#include "glean/cli.hpp"
#include "glean/error.hpp"
#include "glean/evidence.hpp"
#include "glean/io.hpp"
#include "glean/judge.hpp"
#include "glean/metrics.hpp"
#include "glean/pipeline.hpp"
#include "glean/synthetic.hpp"

namespace py = pybind11;
using namespace glean;

namespace {

std::vector<ScoredSample> scored(const std::vector<double>& scores, const std::vector<bool>& labels,
                                 const std::optional<std::vector<std::string>>& case_ids = std::nullopt) {
    if (scores.size() != labels.size()) throw py::value_error("scores and labels differ in length");
    if (case_ids && case_ids->size() != scores.size()) throw py::value_error("case_ids and scores differ in length");
    std::vector<ScoredSample> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i].score = scores[i];
        out[i].label = labels[i];
        if (case_ids) out[i].case_id = (*case_ids)[i];
    }
    return out;
}

std::vector<CalibrationSample> samples(const std::vector<std::vector<double>>& evidence, const std::vector<bool>& labels) {
    if (evidence.size() != labels.size()) throw py::value_error("evidence and labels differ in length");
    std::vector<CalibrationSample> out;
    for (std::size_t i = 0; i < evidence.size(); ++i) out.push_back({{evidence[i], 1}, labels[i]});
    return out;
}

}  // namespace

PYBIND11_MODULE(_glean, m) {
    m.doc() = "Guideline-grounded evidence accumulation for verifying agent trajectories";

    static py::exception<Error> error(m, "GleanError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error.ptr(), e.what());
        }
    });

    m.def("score_from_token_logprobs", &score_from_token_logprobs, py::arg("logprob_yes"), py::arg("logprob_no"));
    m.def(
        "score_from_top_logprobs",
        [](const std::vector<std::pair<std::string, double>>& tokens) {
            std::vector<TokenLogprob> t;
            for (const auto& [tok, lp] : tokens) t.push_back({tok, lp});
            return score_from_top_logprobs(t);
        },
        py::arg("tokens"));

    m.def(
        "aggregate_step",
        [](const std::vector<double>& scores, const std::vector<std::string>& statistics) {
            return aggregate_step(scores, AggregationSpec::from_names(statistics));
        },
        py::arg("scores"), py::arg("statistics") = std::vector<std::string>{"min", "avg"});
    m.def(
        "accumulate",
        [](const std::vector<Feature>& features, double beta) {
            std::vector<std::vector<double>> out;
            for (auto& e : accumulate(features, beta)) out.push_back(std::move(e.values));
            return out;
        },
        py::arg("features"), py::arg("beta") = 0.5, "Evidence path S_1..S_T, one row per step.");
    m.def("rectify", &rectify, py::arg("score"), py::arg("competitive_max"), py::arg("alpha") = 0.2);

    py::class_<CalibratorPosterior>(m, "Calibrator")
        .def_readonly("lambda_", &CalibratorPosterior::lambda)
        .def_readonly("seed", &CalibratorPosterior::seed)
        .def_readonly("acceptance_rate", &CalibratorPosterior::acceptance_rate)
        .def_readonly("d", &CalibratorPosterior::d)
        .def_property_readonly("n_draws", [](const CalibratorPosterior& p) { return p.draws.size(); })
        .def_property_readonly("draws",
                               [](const CalibratorPosterior& p) {
                                   std::vector<std::pair<std::vector<double>, double>> out;
                                   for (const auto& d : p.draws) out.emplace_back(d.w, d.b);
                                   return out;
                               })
        .def("mean",
             [](const CalibratorPosterior& p) {
                 const auto s = posterior_mean(p);
                 return std::make_pair(s.w_mean, s.b_mean);
             })
        .def("predict", [](const CalibratorPosterior& p, const std::vector<double>& s) { return predict(p, {s, 1}); })
        .def("save", [](const CalibratorPosterior& p, const std::filesystem::path& path) { save_calibrator(path, p); });

    m.def(
        "fit",
        [](const std::vector<std::vector<double>>& evidence, const std::vector<bool>& labels, double lambda,
           int n_draws, std::uint64_t seed) {
            const auto data = samples(evidence, labels);
            py::gil_scoped_release release;
            return fit(data, lambda, n_draws, seed);
        },
        py::arg("evidence"), py::arg("labels"), py::arg("lambda_") = 1.0, py::arg("n_draws") = 2000,
        py::arg("seed") = 0);
    m.def("load_calibrator", &load_calibrator, py::arg("path"));
    m.def(
        "uncertainty",
        [](double p, const std::string& unit) {
            if (unit != "bits" && unit != "nats") throw py::value_error("unit must be 'bits' or 'nats'");
            return uncertainty(p, unit == "nats" ? EntropyUnit::nats : EntropyUnit::bits);
        },
        py::arg("p"), py::arg("unit") = "bits");

    m.def("auroc", [](const std::vector<double>& s, const std::vector<bool>& z) { return auroc(scored(s, z)); },
          py::arg("scores"), py::arg("labels"));
    m.def(
        "risk_at",
        [](const std::vector<double>& s, const std::vector<bool>& z, double f) { return risk_at(scored(s, z), f); },
        py::arg("scores"), py::arg("labels"), py::arg("fraction") = 0.5);
    m.def(
        "ece", [](const std::vector<double>& s, const std::vector<bool>& z, int bins) { return ece(scored(s, z), bins); },
        py::arg("scores"), py::arg("labels"), py::arg("n_bins") = 10);
    m.def("brier", [](const std::vector<double>& s, const std::vector<bool>& z) { return brier(scored(s, z)); },
          py::arg("scores"), py::arg("labels"));
    m.def(
        "best_of_n",
        [](const std::vector<double>& s, const std::vector<bool>& z, const std::vector<std::string>& cases, int n) {
            return best_of_n(scored(s, z, cases), n);
        },
        py::arg("scores"), py::arg("labels"), py::arg("case_ids"), py::arg("n"));
    m.def(
        "linearity_diagnostic",
        [](const std::vector<double>& s, const std::vector<bool>& z, int bins) {
            if (s.size() != z.size()) throw py::value_error("evidence and labels differ in length");
            std::vector<EvidencePoint> pts;
            for (std::size_t i = 0; i < s.size(); ++i) pts.push_back({s[i], z[i]});
            const auto d = linearity_diagnostic(pts, bins);
            py::dict out;
            out["slope"] = d.slope;
            out["intercept"] = d.intercept;
            out["r_squared"] = d.r_squared;
            out["bin_centers"] = d.bin_centers;
            out["bin_logits"] = d.bin_logits;
            out["welch_t"] = d.welch_t;
            out["welch_p"] = d.welch_p;
            return out;
        },
        py::arg("evidence"), py::arg("labels"), py::arg("n_bins") = 10);

    m.def(
        "synthesize",
        [](const std::filesystem::path& out_dir, int n_cases, double coverage_gap_rate, double rating_noise_sd,
           std::uint64_t seed, bool active) {
            SyntheticSpec spec;
            spec.n_cases = n_cases;
            spec.coverage_gap_rate = coverage_gap_rate;
            spec.rating_noise_sd = rating_noise_sd;
            spec.seed = seed;
            const auto data = active ? generate_active_scenario(spec) : generate(spec);
            write_dataset(out_dir, data, spec);
            return data.trajectories.size();
        },
        py::arg("out_dir"), py::arg("n_cases") = 100, py::arg("coverage_gap_rate") = 0.0,
        py::arg("rating_noise_sd") = 0.0, py::arg("seed") = 0, py::arg("active") = false,
        "Writes a synthetic dataset and returns the number of trajectories.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            py::gil_scoped_release release;
            return cli::run(args);
        },
        py::arg("args"), "Runs the command-line interface in-process and returns its exit code.");
}
