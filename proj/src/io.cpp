#include "glean/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "glean/error.hpp"

namespace glean {

void to_json(json& j, const Step& s) {
    j = json{{"index", s.index}, {"observation", s.observation}, {"action", s.action}};
}

void from_json(const json& j, Step& s) {
    j.at("index").get_to(s.index);
    j.at("observation").get_to(s.observation);
    j.at("action").get_to(s.action);
}

void to_json(json& j, const Trajectory& t) {
    j = json{{"id", t.id}, {"case_id", t.case_id}, {"steps", t.steps}, {"answer", t.answer}};
    if (t.label) j["label"] = *t.label;
}

void from_json(const json& j, Trajectory& t) {
    j.at("id").get_to(t.id);
    t.case_id = j.value("case_id", std::string{});
    j.at("steps").get_to(t.steps);
    j.at("answer").get_to(t.answer);
    t.label.reset();
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) t.label = it->get<bool>();
}

void to_json(json& j, const Guideline& g) {
    j = json{{"id", g.id}, {"title", g.title}, {"content", g.content}};
    if (g.abstract) j["abstract"] = *g.abstract;
    if (!g.keywords.empty()) j["keywords"] = g.keywords;
}

void from_json(const json& j, Guideline& g) {
    j.at("id").get_to(g.id);
    j.at("title").get_to(g.title);
    g.abstract.reset();
    if (auto it = j.find("abstract"); it != j.end() && !it->is_null()) g.abstract = it->get<std::string>();
    // Abstract-only corpora: content falls back to the abstract.
    if (auto it = j.find("content"); it != j.end() && !it->is_null())
        it->get_to(g.content);
    else if (g.abstract)
        g.content = *g.abstract;
    else
        j.at("content").get_to(g.content);  // throws: key missing
    g.keywords = j.value("keywords", std::vector<std::string>{});
}

void to_json(json& j, const RatingMatrix& m) {
    j = json{{"trajectory_id", m.trajectory_id}, {"guideline_ids", m.guideline_ids}, {"scores", m.scores}};
}

void from_json(const json& j, RatingMatrix& m) {
    j.at("trajectory_id").get_to(m.trajectory_id);
    j.at("guideline_ids").get_to(m.guideline_ids);
    j.at("scores").get_to(m.scores);
}

void to_json(json& j, const EvidenceVector& e) { j = json{{"step", e.step}, {"values", e.values}}; }

void from_json(const json& j, EvidenceVector& e) {
    j.at("step").get_to(e.step);
    j.at("values").get_to(e.values);
}

void to_json(json& j, const VerificationReport& r) {
    j = json{{"trajectory_id", r.trajectory_id},
             {"case_id", r.case_id},
             {"answer", r.answer},
             {"confidence", r.confidence},
             {"uncertainty", r.uncertainty},
             {"passive_confidence", r.passive_confidence},
             {"passive_uncertainty", r.passive_uncertainty},
             {"per_step_evidence", r.per_step_evidence},
             {"active_triggered", r.active_triggered},
             {"differential_skipped", r.differential_skipped},
             {"guidelines_used", r.guidelines_used},
             {"expansion_guidelines", r.expansion_guidelines},
             {"competitive_guidelines", r.competitive_guidelines}};
    j["label"] = r.label ? json(*r.label) : json(nullptr);
}

void from_json(const json& j, VerificationReport& r) {
    j.at("trajectory_id").get_to(r.trajectory_id);
    r.case_id = j.value("case_id", std::string{});
    r.answer = j.value("answer", std::string{});
    j.at("confidence").get_to(r.confidence);
    j.at("uncertainty").get_to(r.uncertainty);
    r.passive_confidence = j.value("passive_confidence", r.confidence);
    r.passive_uncertainty = j.value("passive_uncertainty", r.uncertainty);
    r.per_step_evidence = j.value("per_step_evidence", std::vector<EvidenceVector>{});
    r.active_triggered = j.value("active_triggered", false);
    r.differential_skipped = j.value("differential_skipped", false);
    r.guidelines_used = j.value("guidelines_used", std::vector<std::string>{});
    r.expansion_guidelines = j.value("expansion_guidelines", std::vector<std::string>{});
    r.competitive_guidelines = j.value("competitive_guidelines", std::vector<std::string>{});
    r.label.reset();
    if (auto it = j.find("label"); it != j.end() && !it->is_null()) r.label = it->get<bool>();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write " + path.string());
    out << text;
    if (!out) throw input_error("write failed for " + path.string());
}

std::vector<JsonLine> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open " + path.string());
    std::vector<JsonLine> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back({line_no, json::parse(line)});
        } catch (const json::exception& e) {
            throw input_error(path.string() + ":" + std::to_string(line_no) + ": malformed JSON: " + e.what());
        }
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& lines) {
    std::string text;
    for (const auto& j : lines) {
        text += j.dump();
        text += '\n';
    }
    write_text_file(path, text);
}

namespace {

template <typename T>
std::vector<T> load_typed(const std::filesystem::path& path, const char* what) {
    std::vector<T> out;
    for (auto& [line_no, value] : read_jsonl(path)) {
        try {
            out.push_back(value.template get<T>());
        } catch (const json::exception& e) {
            throw input_error(path.string() + ":" + std::to_string(line_no) + ": invalid " + what + ": " +
                              e.what());
        }
    }
    return out;
}

template <typename T>
void save_typed(const std::filesystem::path& path, const std::vector<T>& items) {
    std::vector<json> lines;
    lines.reserve(items.size());
    for (const auto& item : items) lines.emplace_back(item);
    write_jsonl(path, lines);
}

template <typename T>
std::vector<T> load_unique(const std::filesystem::path& path, const char* what) {
    std::vector<T> out;
    std::map<std::string, std::size_t> first_line;
    for (auto& [line_no, value] : read_jsonl(path)) {
        T item;
        try {
            item = value.template get<T>();
            validate(item);
        } catch (const json::exception& e) {
            throw input_error(path.string() + ":" + std::to_string(line_no) + ": invalid " + what + ": " +
                              e.what());
        } catch (const Error& e) {
            throw input_error(path.string() + ":" + std::to_string(line_no) + ": invalid " + what + ": " +
                              e.what());
        }
        auto [it, inserted] = first_line.emplace(item.id, line_no);
        if (!inserted)
            throw input_error(path.string() + ": duplicate " + what + " id '" + item.id + "' on lines " +
                              std::to_string(it->second) + " and " + std::to_string(line_no));
        out.push_back(std::move(item));
    }
    return out;
}

}  // namespace

std::vector<Trajectory> load_trajectories(const std::filesystem::path& path) {
    return load_unique<Trajectory>(path, "trajectory");
}

void save_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& ts) { save_typed(path, ts); }

std::vector<Guideline> load_guidelines(const std::filesystem::path& path) {
    return load_unique<Guideline>(path, "guideline");
}

void save_guidelines(const std::filesystem::path& path, const std::vector<Guideline>& gs) { save_typed(path, gs); }

std::vector<RatingMatrix> load_ratings(const std::filesystem::path& path) {
    return load_typed<RatingMatrix>(path, "rating matrix");
}

void save_ratings(const std::filesystem::path& path, const std::vector<RatingMatrix>& ms) { save_typed(path, ms); }

std::vector<VerificationReport> load_reports(const std::filesystem::path& path) {
    return load_typed<VerificationReport>(path, "report");
}

void save_reports(const std::filesystem::path& path, const std::vector<VerificationReport>& rs) {
    save_typed(path, rs);
}

}  // namespace glean
