// Deterministic synthetic corpus generator with controllable label priors,
// label-correlation rules and trigger noise. At noise 0 each label's trigger
// token is a perfect predictor, so classifier acceptance thresholds have a
// known-separable baseline; the dials make the task progressively harder.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "evdet/corpus.hpp"

namespace evdet {

struct SynLabel {
    std::string name;
    double prior = 0.0;   // in [0,1]
    std::string trigger;  // defaults to "trg_" + lowercased name
    // Token templates; every template must contain the trigger token.
    std::vector<std::vector<std::string>> templates;
    // Probability that a sentence carrying this label loses its trigger
    // (all occurrences replaced with filler), severing the direct cue.
    double trigger_dropout = 0.0;
    // Extra per-label rate of injecting this trigger into sentences that do
    // NOT carry the label, on top of the global noise rate.
    double false_trigger_rate = 0.0;
};

struct SynRule {
    std::string if_label;
    std::string then_label;
    double probability = 0.0;
};

struct SynSpec {
    std::size_t n_sentences = 0;
    std::vector<SynLabel> labels;
    std::vector<SynRule> rules;
    // Global rate of injecting wrong-label triggers into a sentence.
    double noise = 0.0;
    std::vector<std::string> sources = {"syn0", "syn1", "syn2"};
    Date date_start{2003, 1, 1};
    Date date_end{2003, 12, 31};
    std::vector<std::string> filler_tokens = {"the",  "a",         "on",    "report", "meeting",
                                              "city", "officials", "today", "about",  "statement"};
};

SynSpec syn_spec_from_json(const nlohmann::json& obj);
SynSpec load_syn_spec(const std::string& path);

// Throws InputError on invalid priors/rates, unknown rule labels, templates
// missing their trigger, filler tokens colliding with triggers, or an empty
// date range.
void validate_syn_spec(const SynSpec& spec);

// Deterministic for fixed (spec, seed); per-sentence random streams, so
// sentence i is independent of n_sentences.
Corpus generate_corpus(const SynSpec& spec, uint64_t seed);

// Writes the lexicon resources matching the spec (triggers as the verb
// list) into `dir`, so generated corpora run through the same feature
// pipeline as real ones.
void write_syn_resources(const SynSpec& spec, const std::string& dir);

}  // namespace evdet
