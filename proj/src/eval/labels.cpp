#include "ctxsql/eval/labels.hpp"

#include <json.hpp>

#include <fstream>

namespace ctxsql::eval {

using nlohmann::json;

std::string_view outcome_name(Outcome outcome) noexcept {
    switch (outcome) {
        case Outcome::pass:
            return "pass";
        case Outcome::fail:
            return "fail";
        case Outcome::partial_pass:
            return "partial_pass";
    }
    return "fail";
}

std::optional<Outcome> parse_outcome(std::string_view text) noexcept {
    for (Outcome o : kAllOutcomes) {
        if (text == outcome_name(o)) {
            return o;
        }
    }
    return std::nullopt;
}

namespace {

LabelRecord record_from_json(const json& j) {
    LabelRecord r;
    r.id = j.at("id").get<std::string>();
    if (r.id.empty()) {
        throw Error("label record with empty id");
    }
    const auto phase = parse_phase(j.at("phase").get<std::string>());
    if (!phase) {
        throw Error("label record " + r.id + ": unknown phase " + j.at("phase").dump());
    }
    r.phase = *phase;
    const auto outcome = parse_outcome(j.at("outcome").get<std::string>());
    if (!outcome) {
        throw Error("label record " + r.id + ": unknown outcome " + j.at("outcome").dump());
    }
    r.outcome = *outcome;
    if (j.contains("rationale") && !j.at("rationale").is_null()) {
        r.rationale = j.at("rationale").get<std::string>();
    }
    r.labeler = j.at("labeler").get<std::string>();
    r.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
    return r;
}

}  // namespace

std::vector<LabelRecord> parse_labels(std::string_view text) {
    std::vector<LabelRecord> out;
    const std::string body = trim(text);
    if (body.empty()) {
        return out;
    }
    try {
        if (body.front() == '[') {
            for (const auto& item : json::parse(body)) {
                out.push_back(record_from_json(item));
            }
            return out;
        }
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= body.size()) {
            std::size_t end = body.find('\n', pos);
            if (end == std::string::npos) {
                end = body.size();
            }
            ++line_no;
            const std::string line = trim(std::string_view(body).substr(pos, end - pos));
            if (!line.empty()) {
                try {
                    out.push_back(record_from_json(json::parse(line)));
                } catch (const json::exception& e) {
                    throw Error("labels line " + std::to_string(line_no) + ": " + e.what());
                }
            }
            pos = end + 1;
        }
    } catch (const json::exception& e) {
        throw Error(std::string("labels: ") + e.what());
    }
    return out;
}

std::vector<LabelRecord> load_labels(const std::filesystem::path& path) {
    return parse_labels(read_file(path));
}

LabelStore::LabelStore(const std::vector<LabelRecord>& records) {
    for (const auto& r : records) {
        add(r);
    }
}

void LabelStore::add(const LabelRecord& record) {
    for (auto it = resolved_.begin(); it != resolved_.end(); ++it) {
        if (it->id == record.id && it->phase == record.phase) {
            resolved_.erase(it);
            break;
        }
    }
    resolved_.push_back(record);
}

const LabelRecord* LabelStore::find(std::string_view id, Phase phase) const {
    for (const auto& r : resolved_) {
        if (r.id == id && r.phase == phase) {
            return &r;
        }
    }
    return nullptr;
}

std::string label_to_json_line(const LabelRecord& record) {
    json j{{"id", record.id},
           {"phase", phase_short_name(record.phase)},
           {"outcome", outcome_name(record.outcome)},
           {"labeler", record.labeler}};
    if (record.rationale) {
        j["rationale"] = *record.rationale;
    }
    if (record.timestamp_ms != 0) {
        j["timestamp_ms"] = record.timestamp_ms;
    }
    return j.dump();
}

FeedbackLog::FeedbackLog(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    if (std::filesystem::exists(path_)) {
        count_ = parse_labels(read_file(path_)).size();
    }
}

std::size_t FeedbackLog::append(const LabelRecord& record) {
    const std::string line = label_to_json_line(record) + "\n";
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) {
        throw Error("cannot open feedback log " + path_.string());
    }
    out << line;
    out.flush();
    if (!out) {
        throw Error("write to feedback log " + path_.string() + " failed");
    }
    return ++count_;
}

}  // namespace ctxsql::eval
