#include "vtpseg/prompts.hpp"

#include "vtpseg/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace vtpseg {

namespace {

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string apply_template(const std::string& templ, const std::string& name) {
    const std::size_t pos = templ.find("{}");
    if (pos == std::string::npos) {
        throw std::invalid_argument("prompt template must contain a {} placeholder");
    }
    std::string out = templ;
    out.replace(pos, 2, name);
    return out;
}

PromptSet::PromptSet(std::vector<ClassSpec> classes, std::vector<std::string> unrelated,
                     std::string prompt_template)
    : classes_(std::move(classes)),
      unrelated_(std::move(unrelated)),
      template_(std::move(prompt_template)) {
    if (classes_.empty()) throw std::invalid_argument("PromptSet: at least one class required");
    if (template_.find("{}") == std::string::npos) {
        throw std::invalid_argument("PromptSet: template must contain a {} placeholder");
    }

    std::sort(classes_.begin(), classes_.end(),
              [](const ClassSpec& a, const ClassSpec& b) { return a.class_id < b.class_id; });
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        ClassSpec& spec = classes_[i];
        if (spec.class_id != static_cast<int>(i) + 1) {
            throw std::invalid_argument("PromptSet: class ids must be unique and contiguous from 1");
        }
        if (spec.canonical_name.empty()) {
            throw std::invalid_argument("PromptSet: class names must not be empty");
        }
        if (spec.synonyms.empty()) spec.synonyms.push_back(spec.canonical_name);
        for (const std::string& syn : spec.synonyms) {
            const auto [it, inserted] = synonym_to_class_.emplace(to_lower(syn), spec.class_id);
            if (!inserted && it->second != spec.class_id) {
                throw std::invalid_argument("PromptSet: synonym '" + syn +
                                            "' is claimed by two classes");
            }
        }
    }
    for (const std::string& u : unrelated_) {
        if (synonym_to_class_.count(to_lower(u)) > 0) {
            throw std::invalid_argument("PromptSet: unrelated prompt '" + u +
                                        "' collides with a class synonym");
        }
    }
}

const std::string& PromptSet::canonical_name(int class_id) const {
    if (class_id < 1 || class_id > class_count()) {
        throw std::out_of_range("PromptSet: unknown class id");
    }
    return classes_[static_cast<std::size_t>(class_id - 1)].canonical_name;
}

std::optional<int> PromptSet::lookup(std::string_view label) const {
    const auto it = synonym_to_class_.find(to_lower(label));
    if (it == synonym_to_class_.end()) return std::nullopt;
    return it->second;
}

std::vector<VocabEntry> detector_vocabulary(const PromptSet& ps) {
    std::vector<VocabEntry> vocab;
    for (const ClassSpec& spec : ps.classes()) {
        for (const std::string& syn : spec.synonyms) {
            vocab.push_back({syn, spec.class_id});
        }
    }
    return vocab;
}

std::optional<int> canonicalize(std::string_view raw_label, const PromptSet& ps) {
    return ps.lookup(raw_label);
}

std::vector<CandidatePrompt> scorer_candidates(const PromptSet& ps) {
    std::vector<CandidatePrompt> candidates;
    for (const ClassSpec& spec : ps.classes()) {
        candidates.push_back({apply_template(ps.prompt_template(), spec.canonical_name),
                              spec.class_id});
    }
    for (const std::string& u : ps.unrelated()) {
        candidates.push_back({apply_template(ps.prompt_template(), u), std::nullopt});
    }
    return candidates;
}

PromptSet load_prompt_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("prompt file not readable: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("prompt file " + path + ": " + e.what());
    }

    try {
        std::vector<ClassSpec> classes;
        for (const auto& jc : j.at("classes")) {
            ClassSpec spec;
            spec.class_id = jc.at("id").get<int>();
            spec.canonical_name = jc.at("name").get<std::string>();
            if (jc.contains("synonyms")) {
                spec.synonyms = jc.at("synonyms").get<std::vector<std::string>>();
            }
            classes.push_back(std::move(spec));
        }
        std::vector<std::string> unrelated;
        if (j.contains("unrelated")) {
            unrelated = j.at("unrelated").get<std::vector<std::string>>();
        }
        std::string templ = PromptSet::kDefaultTemplate;
        if (j.contains("template")) templ = j.at("template").get<std::string>();
        return PromptSet(std::move(classes), std::move(unrelated), std::move(templ));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("prompt file " + path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("prompt file " + path + ": " + e.what());
    }
}

void save_prompt_file(const std::string& path, const PromptSet& ps) {
    nlohmann::json j;
    j["template"] = ps.prompt_template();
    j["classes"] = nlohmann::json::array();
    for (const ClassSpec& spec : ps.classes()) {
        j["classes"].push_back({{"id", spec.class_id},
                                {"name", spec.canonical_name},
                                {"synonyms", spec.synonyms}});
    }
    j["unrelated"] = ps.unrelated();
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    out << j.dump(2) << "\n";
}

}  // namespace vtpseg
