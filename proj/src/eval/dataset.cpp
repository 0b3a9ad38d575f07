#include "ctxsql/eval/dataset.hpp"

#include <json.hpp>

#include <set>

namespace ctxsql::eval {

using nlohmann::json;

Dataset::Dataset(std::vector<NlqCase> cases) : cases_(std::move(cases)) {
    if (cases_.empty()) {
        throw Error("dataset is empty");
    }
    std::set<std::string, std::less<>> seen;
    for (const auto& c : cases_) {
        if (c.id.empty()) {
            throw Error("dataset case with empty id");
        }
        if (trim(c.nlq).empty()) {
            throw Error("dataset case " + c.id + " has an empty question");
        }
        if (!seen.insert(c.id).second) {
            throw Error("dataset case id repeated: " + c.id);
        }
    }
}

Dataset Dataset::from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("dataset: ") + e.what());
    }
    const json& list = doc.is_object() ? doc.at("cases") : doc;
    if (!list.is_array()) {
        throw Error("dataset: expected an array of cases");
    }
    std::vector<NlqCase> cases;
    for (const auto& item : list) {
        try {
            NlqCase c;
            c.id = item.at("id").get<std::string>();
            c.nlq = item.at("nlq").get<std::string>();
            c.time_to_create = item.value("time_to_create", 0u);
            if (item.contains("reference_sql") && !item.at("reference_sql").is_null()) {
                c.reference_sql = item.at("reference_sql").get<std::string>();
            }
            cases.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw Error(std::string("dataset case ") + std::to_string(cases.size()) + ": " + e.what());
        }
    }
    return Dataset(std::move(cases));
}

Dataset Dataset::from_file(const std::filesystem::path& path) {
    return from_json(read_file(path));
}

const NlqCase* Dataset::find(std::string_view id) const {
    for (const auto& c : cases_) {
        if (c.id == id) {
            return &c;
        }
    }
    return nullptr;
}

std::optional<ComplexityScore> reference_score(const NlqCase& c) {
    if (!c.reference_sql) {
        return std::nullopt;
    }
    return complexity_score(ComplexityInput{extract_features(*c.reference_sql), c.time_to_create});
}

}  // namespace ctxsql::eval
