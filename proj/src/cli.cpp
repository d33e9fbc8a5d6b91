#include "glean/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>

#include "glean/calibration.hpp"
#include "glean/error.hpp"
#include "glean/evidence.hpp"
#include "glean/io.hpp"
#include "glean/metrics.hpp"
#include "glean/parallel.hpp"

namespace glean::cli {

namespace fs = std::filesystem;

std::size_t RunConfig::effective_parallelism() const {
    std::size_t p = parallel ? parallel : default_parallelism();
    if (judge.kind == JudgeKind::remote) p = std::min<std::size_t>(p, static_cast<std::size_t>(judge.max_in_flight));
    return std::max<std::size_t>(p, 1);
}

namespace {

class Section {
public:
    Section(const json& obj, std::string name) : obj_(obj), name_(std::move(name)) {
        if (!obj_.is_object()) throw input_error("config section '" + name_ + "' must be an object");
    }

    template <typename T>
    void get(const char* key, T& target) {
        seen_.insert(key);
        if (auto it = obj_.find(key); it != obj_.end() && !it->is_null()) {
            try {
                it->get_to(target);
            } catch (const json::exception& e) {
                throw input_error("config key '" + name_ + "." + key + "': " + e.what());
            }
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() || it->is_null() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [key, _] : obj_.items())
            if (!seen_.contains(key)) throw input_error("unknown config key '" + name_ + "." + key + "'");
    }

private:
    const json& obj_;
    std::string name_;
    std::set<std::string> seen_;
};

void get_path(Section& s, const char* key, fs::path& target) {
    std::string v;
    s.get(key, v);
    if (!v.empty()) target = v;
}

}  // namespace

void apply_config(RunConfig& cfg, const json& doc) {
    Section root(doc, "config");
    root.get("seed", cfg.seed);
    root.get("parallel", cfg.parallel);
    if (const json* p = root.child("pipeline")) {
        Section s(*p, "pipeline");
        auto& pc = cfg.pipeline;
        s.get("k", pc.k);
        s.get("beta", pc.beta);
        s.get("alpha", pc.alpha);
        s.get("epsilon_u", pc.epsilon_u);
        s.get("n_extra", pc.n_extra);
        s.get("n_comp", pc.n_comp);
        s.get("active_enabled", pc.active_enabled);
        s.get("expansion_enabled", pc.expansion_enabled);
        s.get("differential_enabled", pc.differential_enabled);
        s.get("judge_parallelism", pc.judge_parallelism);
        std::vector<std::string> stats;
        s.get("aggregation", stats);
        if (!stats.empty()) pc.aggregation = AggregationSpec::from_names(stats);
        std::string unit;
        s.get("entropy_unit", unit);
        if (unit == "nats") pc.entropy_unit = EntropyUnit::nats;
        else if (unit == "bits") pc.entropy_unit = EntropyUnit::bits;
        else if (!unit.empty()) throw input_error("entropy_unit must be 'bits' or 'nats'");
        s.finish();
    }
    if (const json* p = root.child("judge")) {
        Section s(*p, "judge");
        auto& jc = cfg.judge;
        std::string kind;
        s.get("kind", kind);
        if (kind == "remote") jc.kind = JudgeKind::remote;
        else if (kind == "mock") jc.kind = JudgeKind::mock;
        else if (!kind.empty()) throw input_error("judge.kind must be 'mock' or 'remote'");
        s.get("endpoint", jc.endpoint);
        s.get("model_name", jc.model_name);
        s.get("api_key", jc.api_key);
        s.get("top_logprobs", jc.top_logprobs);
        s.get("timeout_ms", jc.timeout_ms);
        s.get("max_retries", jc.max_retries);
        s.get("initial_backoff_ms", jc.initial_backoff_ms);
        s.get("max_in_flight", jc.max_in_flight);
        s.get("mock_seed", jc.mock_seed);
        s.finish();
    }
    if (const json* p = root.child("embedder")) {
        Section s(*p, "embedder");
        auto& ec = cfg.embedder;
        s.get("endpoint", ec.endpoint);
        s.get("model_name", ec.model_name);
        s.get("api_key", ec.api_key);
        s.get("timeout_ms", ec.timeout_ms);
        s.get("max_retries", ec.max_retries);
        s.get("hashed_dim", ec.hashed_dim);
        s.get("hashed_seed", ec.hashed_seed);
        s.finish();
    }
    if (const json* p = root.child("calibration")) {
        Section s(*p, "calibration");
        s.get("lambda", cfg.lambda);
        s.get("n_draws", cfg.n_draws);
        s.finish();
    }
    if (const json* p = root.child("eval")) {
        Section s(*p, "eval");
        s.get("ece_bins", cfg.ece_bins);
        s.get("linearity_bins", cfg.linearity_bins);
        s.get("bon_n", cfg.bon_n);
        s.finish();
    }
    if (const json* p = root.child("synth")) {
        Section s(*p, "synth");
        auto& sp = cfg.synth;
        s.get("n_cases", sp.n_cases);
        s.get("min_steps", sp.min_steps);
        s.get("max_steps", sp.max_steps);
        s.get("true_slope", sp.true_slope);
        s.get("true_intercept", sp.true_intercept);
        s.get("rating_noise_sd", sp.rating_noise_sd);
        s.get("coverage_gap_rate", sp.coverage_gap_rate);
        s.get("candidates_per_case", sp.candidates_per_case);
        s.get("answers_per_case", sp.answers_per_case);
        s.get("evidence_mean", sp.evidence_mean);
        s.get("evidence_sd", sp.evidence_sd);
        s.get("step_jitter_sd", sp.step_jitter_sd);
        s.get("gap_low", sp.gap_low);
        s.get("gap_high", sp.gap_high);
        s.get("competitor_strength", sp.competitor_strength);
        s.get("active_scenario", cfg.synth_active);
        s.finish();
    }
    if (const json* p = root.child("paths")) {
        Section s(*p, "paths");
        auto& ps = cfg.paths;
        get_path(s, "trajectories", ps.trajectories);
        get_path(s, "guidelines", ps.guidelines);
        get_path(s, "ratings", ps.ratings);
        get_path(s, "calibrator", ps.calibrator);
        get_path(s, "reports", ps.reports);
        get_path(s, "answer_pool", ps.answer_pool);
        get_path(s, "out_dir", ps.out_dir);
        s.finish();
    }
    root.finish();
}

RunConfig load_config(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw input_error(path.string() + ": malformed config: " + e.what());
    }
    RunConfig cfg;
    apply_config(cfg, doc);
    return cfg;
}

json to_json(const RunConfig& cfg) {
    const auto& pc = cfg.pipeline;
    const auto& jc = cfg.judge;
    const auto& sp = cfg.synth;
    return json{
        {"seed", cfg.seed},
        {"parallel", cfg.parallel},
        {"pipeline",
         {{"k", pc.k},
          {"beta", pc.beta},
          {"alpha", pc.alpha},
          {"epsilon_u", pc.epsilon_u},
          {"n_extra", pc.n_extra},
          {"n_comp", pc.n_comp},
          {"aggregation", pc.aggregation.names()},
          {"active_enabled", pc.active_enabled},
          {"expansion_enabled", pc.expansion_enabled},
          {"differential_enabled", pc.differential_enabled},
          {"judge_parallelism", pc.judge_parallelism},
          {"entropy_unit", pc.entropy_unit == EntropyUnit::nats ? "nats" : "bits"}}},
        {"judge",
         {{"kind", jc.kind == JudgeKind::remote ? "remote" : "mock"},
          {"endpoint", jc.endpoint},
          {"model_name", jc.model_name},
          {"top_logprobs", jc.top_logprobs},
          {"timeout_ms", jc.timeout_ms},
          {"max_retries", jc.max_retries},
          {"initial_backoff_ms", jc.initial_backoff_ms},
          {"max_in_flight", jc.max_in_flight},
          {"mock_seed", jc.mock_seed}}},
        {"embedder",
         {{"endpoint", cfg.embedder.endpoint},
          {"model_name", cfg.embedder.model_name},
          {"timeout_ms", cfg.embedder.timeout_ms},
          {"max_retries", cfg.embedder.max_retries},
          {"hashed_dim", cfg.embedder.hashed_dim},
          {"hashed_seed", cfg.embedder.hashed_seed}}},
        {"calibration", {{"lambda", cfg.lambda}, {"n_draws", cfg.n_draws}}},
        {"eval", {{"ece_bins", cfg.ece_bins}, {"linearity_bins", cfg.linearity_bins}, {"bon_n", cfg.bon_n}}},
        {"synth",
         {{"n_cases", sp.n_cases},
          {"min_steps", sp.min_steps},
          {"max_steps", sp.max_steps},
          {"true_slope", sp.true_slope},
          {"true_intercept", sp.true_intercept},
          {"rating_noise_sd", sp.rating_noise_sd},
          {"coverage_gap_rate", sp.coverage_gap_rate},
          {"candidates_per_case", sp.candidates_per_case},
          {"answers_per_case", sp.answers_per_case},
          {"evidence_mean", sp.evidence_mean},
          {"evidence_sd", sp.evidence_sd},
          {"step_jitter_sd", sp.step_jitter_sd},
          {"gap_low", sp.gap_low},
          {"gap_high", sp.gap_high},
          {"competitor_strength", sp.competitor_strength},
          {"active_scenario", cfg.synth_active}}},
        {"paths",
         {{"trajectories", cfg.paths.trajectories.string()},
          {"guidelines", cfg.paths.guidelines.string()},
          {"ratings", cfg.paths.ratings.string()},
          {"calibrator", cfg.paths.calibrator.string()},
          {"reports", cfg.paths.reports.string()},
          {"answer_pool", cfg.paths.answer_pool.string()},
          {"out_dir", cfg.paths.out_dir.string()}}},
    };
}

namespace {

void require_path(const fs::path& p, const char* what) {
    if (p.empty()) throw input_error(std::string("missing --") + what + " path");
    if (!fs::exists(p)) throw input_error(std::string(what) + " file not found: " + p.string());
}

void echo_config(const RunConfig& cfg) {
    write_text_file(cfg.paths.out_dir / "effective_config.json", to_json(cfg).dump(2) + "\n");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

GuidelineStore build_store(const RunConfig& cfg) {
    return GuidelineStore(load_guidelines(cfg.paths.guidelines), make_embedder(cfg.embedder));
}

std::vector<ScoredSample> labeled_samples(const std::vector<VerificationReport>& reports) {
    std::vector<ScoredSample> out;
    for (const auto& r : reports)
        if (r.label) out.push_back({r.confidence, *r.label, r.case_id, r.answer});
    return out;
}

}  // namespace

int cmd_judge(const RunConfig& cfg) {
    require_path(cfg.paths.trajectories, "trajectories");
    require_path(cfg.paths.guidelines, "guidelines");
    validate(cfg.pipeline);
    const auto trajectories = load_trajectories(cfg.paths.trajectories);
    const auto store = build_store(cfg);
    const auto judge = make_judge(with_environment(cfg.judge));

    std::vector<RatingMatrix> ratings(trajectories.size());
    parallel_for(trajectories.size(), cfg.effective_parallelism(), [&](std::size_t i) {
        std::vector<Guideline> gs;
        for (const auto& id : retrieve(store, trajectories[i].answer, cfg.pipeline.k).ranked_ids)
            gs.push_back(store.get(id));
        ratings[i] = judge_trajectory(trajectories[i], gs, *judge, cfg.pipeline.judge_parallelism);
    });
    save_ratings(cfg.paths.out_dir / "ratings.jsonl", ratings);
    echo_config(cfg);
    std::cerr << "judged " << ratings.size() << " trajectories -> " << (cfg.paths.out_dir / "ratings.jsonl").string()
              << "\n";
    return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg) {
    require_path(cfg.paths.trajectories, "trajectories");
    require_path(cfg.paths.ratings, "ratings");
    validate(cfg.pipeline);
    const auto trajectories = load_trajectories(cfg.paths.trajectories);
    std::map<std::string, RatingMatrix> by_id;
    for (auto& m : load_ratings(cfg.paths.ratings)) {
        const std::string key = m.trajectory_id;
        by_id.emplace(key, std::move(m));
    }

    std::vector<CalibrationSample> data;
    for (const auto& t : trajectories) {
        if (!t.label) continue;
        auto it = by_id.find(t.id);
        if (it == by_id.end()) continue;
        validate_rating_matrix(it->second, t);
        data.push_back({evidence_path(it->second, cfg.pipeline.aggregation, cfg.pipeline.beta).back(), *t.label});
    }
    if (data.size() < 50)
        std::cerr << "warning: only " << data.size() << " labeled trajectories with ratings; calibration may be poor\n";

    FitOptions opts;
    opts.lambda = cfg.lambda;
    opts.n_draws = cfg.n_draws;
    opts.seed = cfg.seed;
    auto post = fit(data, opts);
    post.statistics = cfg.pipeline.aggregation.names();
    post.beta = cfg.pipeline.beta;
    post.clamp = kClampEps;
    save_calibrator(cfg.paths.out_dir / "calibrator.jsonl", post);
    echo_config(cfg);
    std::cerr << "fit on " << data.size() << " samples, acceptance " << fmt(post.acceptance_rate) << "\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
    require_path(cfg.paths.trajectories, "trajectories");
    require_path(cfg.paths.guidelines, "guidelines");
    require_path(cfg.paths.calibrator, "calibrator");
    validate(cfg.pipeline);
    const auto trajectories = load_trajectories(cfg.paths.trajectories);
    const auto store = build_store(cfg);
    const auto post = load_calibrator(cfg.paths.calibrator);
    if (!post.statistics.empty() && post.statistics != cfg.pipeline.aggregation.names())
        throw data_error("calibrator was fit with a different aggregation than the configured one");
    if (post.beta != cfg.pipeline.beta) throw data_error("calibrator was fit with a different beta");
    AnswerPool pool;
    if (!cfg.paths.answer_pool.empty()) {
        require_path(cfg.paths.answer_pool, "answer-pool");
        pool = load_answer_pool(cfg.paths.answer_pool);
    }
    PipelineConfig pc = cfg.pipeline;
    pc.seed = cfg.seed;
    const auto judge = make_judge(with_environment(cfg.judge));
    const auto items = verify_batch(trajectories, store, *judge, post, pc, cfg.effective_parallelism(), pool);

    std::vector<VerificationReport> reports;
    std::vector<json> errors;
    for (const auto& item : items) {
        if (item.ok()) reports.push_back(*item.report);
        else errors.push_back(json{{"trajectory_id", item.trajectory_id}, {"error", item.error}});
    }
    save_reports(cfg.paths.out_dir / "reports.jsonl", reports);
    write_jsonl(cfg.paths.out_dir / "errors.jsonl", errors);
    echo_config(cfg);
    std::size_t triggered = 0;
    for (const auto& r : reports) triggered += r.active_triggered;
    std::cerr << "verified " << reports.size() << " trajectories (" << triggered << " triggered active verification, "
              << errors.size() << " failed)\n";
    return kExitOk;
}

int cmd_eval(const RunConfig& cfg) {
    require_path(cfg.paths.reports, "reports");
    const auto reports = load_reports(cfg.paths.reports);
    const auto samples = labeled_samples(reports);
    if (samples.empty()) throw data_error("no labeled reports to evaluate");

    const json config = {{"ece_bins", cfg.ece_bins}, {"linearity_bins", cfg.linearity_bins}};
    std::vector<std::pair<std::string, double>> rows;
    rows.emplace_back("auroc", auroc(samples));
    rows.emplace_back("risk@0.5", risk_at(samples, 0.5));
    rows.emplace_back("ece", ece(samples, cfg.ece_bins));
    rows.emplace_back("brier", brier(samples));

    std::vector<std::string> notes;
    std::size_t dim = 0;
    for (const auto& r : reports)
        if (r.label && !r.per_step_evidence.empty()) dim = std::max(dim, r.per_step_evidence.back().dim());
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<EvidencePoint> points;
        for (const auto& r : reports)
            if (r.label && !r.per_step_evidence.empty() && r.per_step_evidence.back().dim() > j)
                points.push_back({r.per_step_evidence.back().values[j], *r.label});
        const std::string tag = "[" + std::to_string(j) + "]";
        try {
            const auto diag = linearity_diagnostic(points, cfg.linearity_bins);
            rows.emplace_back("linearity_slope" + tag, diag.slope);
            rows.emplace_back("linearity_intercept" + tag, diag.intercept);
            rows.emplace_back("linearity_r2" + tag, diag.r_squared);
            rows.emplace_back("welch_t" + tag, diag.welch_t);
            rows.emplace_back("welch_p" + tag, diag.welch_p);
        } catch (const Error& e) {
            notes.push_back("linearity diagnostic" + tag + " skipped: " + e.what());
        }
    }

    std::string text = "# evaluation of " + cfg.paths.reports.filename().string() + "\n";
    text += "metric                    value         n\n";
    std::vector<json> lines;
    for (const auto& [name, value] : rows) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-24s  %12s  %zu\n", name.c_str(), fmt(value).c_str(), samples.size());
        text += buf;
        lines.push_back(json{{"name", name}, {"value", value}, {"n", samples.size()}, {"config", config}});
    }
    for (const auto& n : notes) text += "# " + n + "\n";
    write_text_file(cfg.paths.out_dir / "metrics.txt", text);
    write_jsonl(cfg.paths.out_dir / "metrics.jsonl", lines);
    echo_config(cfg);
    std::cout << text;
    return kExitOk;
}

int cmd_bon(const RunConfig& cfg) {
    require_path(cfg.paths.reports, "reports");
    const auto samples = labeled_samples(load_reports(cfg.paths.reports));
    if (samples.empty()) throw data_error("no labeled reports for best-of-n");

    // pass@n: at least one correct candidate among the first n of a case.
    std::map<std::string, std::vector<bool>> by_case;
    for (const auto& s : samples) by_case[s.case_id.value_or("")].push_back(s.label);

    std::string text = "# best-of-n over " + std::to_string(by_case.size()) + " cases\n";
    text += "n     accuracy      pass@n\n";
    std::vector<json> lines;
    for (int n : cfg.bon_n) {
        const double acc = best_of_n(samples, n);
        double pass = 0.0;
        for (const auto& [_, labels] : by_case) {
            bool any = false;
            for (int i = 0; i < n; ++i) any = any || labels[i];
            pass += any ? 1.0 : 0.0;
        }
        pass /= static_cast<double>(by_case.size());
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-4d  %10s  %10s\n", n, fmt(acc).c_str(), fmt(pass).c_str());
        text += buf;
        lines.push_back(json{{"name", "best_of_" + std::to_string(n)},
                             {"value", acc},
                             {"n", n},
                             {"pass_at_n", pass},
                             {"config", {{"cases", by_case.size()}}}});
    }
    write_text_file(cfg.paths.out_dir / "bon.txt", text);
    write_jsonl(cfg.paths.out_dir / "bon.jsonl", lines);
    echo_config(cfg);
    std::cout << text;
    return kExitOk;
}

int cmd_synth(const RunConfig& cfg) {
    SyntheticSpec spec = cfg.synth;
    spec.seed = cfg.seed;
    spec.beta = cfg.pipeline.beta;
    spec.k = cfg.pipeline.k;
    spec.n_extra = cfg.pipeline.n_extra;
    const auto data = cfg.synth_active ? generate_active_scenario(spec) : generate(spec);
    write_dataset(cfg.paths.out_dir, data, spec);
    echo_config(cfg);
    std::cerr << "wrote " << data.trajectories.size() << " trajectories and " << data.guidelines.size()
              << " guidelines to " << cfg.paths.out_dir.string() << "\n";
    return kExitOk;
}

namespace {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::input:
        case ErrorKind::remote: return kExitInput;
        case ErrorKind::data: return kExitData;
        case ErrorKind::internal: return kExitInternal;
    }
    return kExitInternal;
}

// Flag values that override the config file only when given.
struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> parallel;
    std::optional<std::string> out_dir;
    std::optional<std::string> trajectories, guidelines, ratings, calibrator, reports, answer_pool;
    std::optional<std::size_t> k, n_extra, n_comp;
    std::optional<double> beta, alpha, epsilon_u, lambda;
    std::optional<int> n_draws;
    std::optional<std::vector<std::string>> aggregation;
    bool no_active = false, no_expansion = false, no_differential = false, nats = false;
    std::optional<std::string> judge_kind, endpoint, model;
    std::optional<std::vector<int>> bon_n;
    std::optional<int> n_cases, candidates;
    std::optional<double> gap_rate, noise_sd;
    bool active_scenario = false;
};

void apply(const Overrides& o, RunConfig& cfg) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.parallel) cfg.parallel = *o.parallel;
    if (o.out_dir) cfg.paths.out_dir = *o.out_dir;
    if (o.trajectories) cfg.paths.trajectories = *o.trajectories;
    if (o.guidelines) cfg.paths.guidelines = *o.guidelines;
    if (o.ratings) cfg.paths.ratings = *o.ratings;
    if (o.calibrator) cfg.paths.calibrator = *o.calibrator;
    if (o.reports) cfg.paths.reports = *o.reports;
    if (o.answer_pool) cfg.paths.answer_pool = *o.answer_pool;
    if (o.k) cfg.pipeline.k = *o.k;
    if (o.n_extra) cfg.pipeline.n_extra = *o.n_extra;
    if (o.n_comp) cfg.pipeline.n_comp = *o.n_comp;
    if (o.beta) cfg.pipeline.beta = *o.beta;
    if (o.alpha) cfg.pipeline.alpha = *o.alpha;
    if (o.epsilon_u) cfg.pipeline.epsilon_u = *o.epsilon_u;
    if (o.aggregation) cfg.pipeline.aggregation = AggregationSpec::from_names(*o.aggregation);
    if (o.no_active) cfg.pipeline.active_enabled = false;
    if (o.no_expansion) cfg.pipeline.expansion_enabled = false;
    if (o.no_differential) cfg.pipeline.differential_enabled = false;
    if (o.nats) cfg.pipeline.entropy_unit = EntropyUnit::nats;
    if (o.lambda) cfg.lambda = *o.lambda;
    if (o.n_draws) cfg.n_draws = *o.n_draws;
    if (o.judge_kind) cfg.judge.kind = *o.judge_kind == "remote" ? JudgeKind::remote : JudgeKind::mock;
    if (o.endpoint) cfg.judge.endpoint = *o.endpoint;
    if (o.model) cfg.judge.model_name = *o.model;
    if (o.bon_n) cfg.bon_n = *o.bon_n;
    if (o.n_cases) cfg.synth.n_cases = *o.n_cases;
    if (o.candidates) cfg.synth.candidates_per_case = *o.candidates;
    if (o.gap_rate) cfg.synth.coverage_gap_rate = *o.gap_rate;
    if (o.noise_sd) cfg.synth.rating_noise_sd = *o.noise_sd;
    if (o.active_scenario) cfg.synth_active = true;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Guideline-grounded verification of agent trajectories"};
    app.require_subcommand(1);
    app.fallthrough();
    Overrides o;
    app.add_option("--config", o.config, "JSON config file");
    app.add_option("--seed", o.seed, "Seed for calibration, sampling and synthesis");
    app.add_option("--parallel", o.parallel, "Trajectories processed concurrently");
    app.add_option("--out-dir", o.out_dir, "Output directory");

    auto* judge = app.add_subcommand("judge", "Rate every step against retrieved guidelines");
    auto* calibrate = app.add_subcommand("calibrate", "Fit the Bayesian logistic calibrator");
    auto* verify_cmd = app.add_subcommand("verify", "Verify trajectories end to end");
    auto* eval = app.add_subcommand("eval", "Discrimination and calibration metrics for reports");
    auto* bon = app.add_subcommand("bon", "Best-of-N accuracy for reports grouped by case");
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");

    for (auto* sub : {judge, calibrate, verify_cmd})
        sub->add_option("--trajectories", o.trajectories, "trajectories.jsonl");
    for (auto* sub : {judge, verify_cmd}) {
        sub->add_option("--guidelines", o.guidelines, "guidelines.jsonl");
        sub->add_option("--judge", o.judge_kind, "Judge backend")->check(CLI::IsMember({"mock", "remote"}));
        sub->add_option("--endpoint", o.endpoint, "Remote judge base URL");
        sub->add_option("--model", o.model, "Remote judge model name");
    }
    for (auto* sub : {judge, calibrate, verify_cmd, synth}) {
        sub->add_option("--k", o.k, "Guidelines per trajectory");
        sub->add_option("--beta", o.beta, "Evidence discount factor");
    }
    for (auto* sub : {calibrate, verify_cmd})
        sub->add_option("--aggregation", o.aggregation, "Step statistics (min, avg, max, std)")->delimiter(',');
    calibrate->add_option("--ratings", o.ratings, "ratings.jsonl");
    calibrate->add_option("--lambda", o.lambda, "Prior precision");
    calibrate->add_option("--n-draws", o.n_draws, "Posterior draws kept");
    verify_cmd->add_option("--calibrator", o.calibrator, "calibrator.jsonl");
    verify_cmd->add_option("--answer-pool", o.answer_pool, "answer_pool.jsonl with alternative answers per case");
    verify_cmd->add_option("--alpha", o.alpha, "Rectification factor");
    verify_cmd->add_option("--epsilon-u", o.epsilon_u, "Entropy threshold for active verification");
    verify_cmd->add_option("--n-extra", o.n_extra, "Expansion guidelines");
    verify_cmd->add_option("--n-comp", o.n_comp, "Competitive guidelines");
    verify_cmd->add_flag("--no-active", o.no_active, "Disable active verification");
    verify_cmd->add_flag("--no-expansion", o.no_expansion, "Skip guideline expansion");
    verify_cmd->add_flag("--no-differential", o.no_differential, "Skip differential checks");
    verify_cmd->add_flag("--nats", o.nats, "Natural-log entropy");
    for (auto* sub : {eval, bon}) sub->add_option("--reports", o.reports, "reports.jsonl");
    bon->add_option("--n", o.bon_n, "Candidate counts")->delimiter(',');
    synth->add_option("--n-cases", o.n_cases, "Cases");
    synth->add_option("--candidates", o.candidates, "Trajectories per case");
    synth->add_option("--gap-rate", o.gap_rate, "Coverage gap rate");
    synth->add_option("--noise-sd", o.noise_sd, "Rating noise (logit sd)");
    synth->add_flag("--active-scenario", o.active_scenario, "Generate the active-verification scenario");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
        apply(o, cfg);
        if (judge->parsed()) return cmd_judge(cfg);
        if (calibrate->parsed()) return cmd_calibrate(cfg);
        if (verify_cmd->parsed()) return cmd_verify(cfg);
        if (eval->parsed()) return cmd_eval(cfg);
        if (bon->parsed()) return cmd_bon(cfg);
        if (synth->parsed()) return cmd_synth(cfg);
        return kExitInternal;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("glean");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace glean::cli
