#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "glean/core.hpp"

namespace glean {

using json = nlohmann::json;

void to_json(json& j, const Step& s);
void from_json(const json& j, Step& s);
void to_json(json& j, const Trajectory& t);
void from_json(const json& j, Trajectory& t);
void to_json(json& j, const Guideline& g);
void from_json(const json& j, Guideline& g);
void to_json(json& j, const RatingMatrix& m);
void from_json(const json& j, RatingMatrix& m);
void to_json(json& j, const EvidenceVector& e);
void from_json(const json& j, EvidenceVector& e);
void to_json(json& j, const VerificationReport& r);
void from_json(const json& j, VerificationReport& r);

struct JsonLine {
    std::size_t line_no;  // 1-based
    json value;
};

// Blank lines are skipped. Parse failures name the offending line.
std::vector<JsonLine> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& lines);

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);
void save_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& ts);

std::vector<Guideline> load_guidelines(const std::filesystem::path& path);
void save_guidelines(const std::filesystem::path& path, const std::vector<Guideline>& gs);

std::vector<RatingMatrix> load_ratings(const std::filesystem::path& path);
void save_ratings(const std::filesystem::path& path, const std::vector<RatingMatrix>& ms);

std::vector<VerificationReport> load_reports(const std::filesystem::path& path);
void save_reports(const std::filesystem::path& path, const std::vector<VerificationReport>& rs);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace glean
