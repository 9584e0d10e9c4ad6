#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vtpseg {

// One task class and the synonym phrases the detector is prompted with.
// An empty synonym list defaults to just the canonical name.
struct ClassSpec {
    int class_id = 0;  // >= 1; 0 is reserved for background
    std::string canonical_name;
    std::vector<std::string> synonyms;
};

struct VocabEntry {
    std::string text;
    int class_id = 0;
};

// A scorer candidate; class_id is empty for unrelated (distractor) prompts.
struct CandidatePrompt {
    std::string text;
    std::optional<int> class_id;
};

// Substitutes name for the "{}" placeholder.
std::string apply_template(const std::string& templ, const std::string& name);

// The two prompt vocabularies: per-class synonym lists for the detector and
// related/unrelated candidate prompts for the scorer. Immutable once built.
class PromptSet {
  public:
    static constexpr const char* kDefaultTemplate = "The satellite view of {}";

    PromptSet(std::vector<ClassSpec> classes, std::vector<std::string> unrelated,
              std::string prompt_template = kDefaultTemplate);

    const std::vector<ClassSpec>& classes() const { return classes_; }
    const std::vector<std::string>& unrelated() const { return unrelated_; }
    const std::string& prompt_template() const { return template_; }
    int class_count() const { return static_cast<int>(classes_.size()); }
    const std::string& canonical_name(int class_id) const;

    // Case-insensitive synonym lookup; nullopt when the label is unknown.
    std::optional<int> lookup(std::string_view label) const;

  private:
    std::vector<ClassSpec> classes_;
    std::vector<std::string> unrelated_;
    std::string template_;
    std::unordered_map<std::string, int> synonym_to_class_;  // lowercase
};

// Flattened (synonym, class_id) pairs in class order then synonym order;
// this is the detector's text prompt.
std::vector<VocabEntry> detector_vocabulary(const PromptSet& ps);

// Maps a raw detector label back to its owning class; nullopt when unmatched.
std::optional<int> canonicalize(std::string_view raw_label, const PromptSet& ps);

// Templated related candidates (one per class, class order) followed by
// templated unrelated candidates, in declaration order.
std::vector<CandidatePrompt> scorer_candidates(const PromptSet& ps);

// The documented prompt-file schema (JSON: classes + unrelated lists).
PromptSet load_prompt_file(const std::string& path);
void save_prompt_file(const std::string& path, const PromptSet& ps);

}  // namespace vtpseg
