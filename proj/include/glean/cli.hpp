#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "glean/judge.hpp"
#include "glean/pipeline.hpp"
#include "glean/retrieval.hpp"
#include "glean/synthetic.hpp"

namespace glean::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitData = 3;

struct Paths {
    std::filesystem::path trajectories;
    std::filesystem::path guidelines;
    std::filesystem::path ratings;
    std::filesystem::path calibrator;
    std::filesystem::path reports;
    std::filesystem::path answer_pool;
    std::filesystem::path out_dir = "out";
};

// Everything a run depends on. Defaults < config file < command-line flags.
struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t parallel = 0;  // 0: logical core count, capped by judge.max_in_flight for remote judges

    PipelineConfig pipeline;
    JudgeBackendConfig judge;
    EmbedderConfig embedder;

    double lambda = 1.0;
    int n_draws = 2000;

    int ece_bins = 10;
    int linearity_bins = 10;
    std::vector<int> bon_n{4, 8, 16};

    SyntheticSpec synth;
    bool synth_active = false;

    Paths paths;

    std::size_t effective_parallelism() const;
};

// Applies a JSON config document on top of `cfg`. Unknown keys are errors.
void apply_config(RunConfig& cfg, const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

// The effective configuration with secrets removed; echoed into each run's out_dir.
nlohmann::json to_json(const RunConfig& cfg);

int cmd_judge(const RunConfig& cfg);
int cmd_calibrate(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);
int cmd_bon(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);

// Full command-line entry point; never throws.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace glean::cli
