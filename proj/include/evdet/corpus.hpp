// Dataset schema, JSONL ingestion, corpus statistics, multi-label relaxation
// and stratified fold construction.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace evdet {

// Class name used for no-event rows in reports and as the explicit
// "no event" class in single-label training. Reserved: a corpus may not
// declare an event type with this name.
inline const std::string kNoEventClass = "N";

struct Date {
    int year = 0;
    int month = 0;
    int day = 0;  // 0 = unknown day

    bool operator==(const Date&) const = default;
};

Date parse_date(const std::string& text);       // "YYYY-MM-DD", day "00" allowed
std::string format_date(const Date& d);

struct Sentence {
    std::string doc_id;
    std::string sentence_id;
    std::string source_id;
    Date date;
    std::vector<std::string> tokens;
    std::set<std::string> labels;  // empty = no event
    std::map<std::string, std::map<std::string, long>> annotations;

    bool is_multi_event() const { return labels.size() >= 2; }
    bool operator==(const Sentence&) const = default;
};

struct Corpus {
    std::vector<Sentence> sentences;
    // Canonical label order: declaration order in the file header, else
    // first-appearance order. The single tie-break authority downstream.
    std::vector<std::string> label_vocabulary;

    bool operator==(const Corpus&) const = default;
};

struct CorpusStats {
    std::size_t n_sentences = 0;
    std::size_t n_event_sentences = 0;
    std::size_t n_multievent_sentences = 0;
    double event_fraction = 0.0;
    double multievent_fraction_of_event = 0.0;
    double multievent_fraction_of_corpus = 0.0;
    std::map<std::string, std::size_t> per_label_counts;
};

Corpus load_corpus(const std::string& path);
void write_corpus(const Corpus& corpus, const std::string& path);

CorpusStats corpus_stats(const Corpus& corpus);

enum class RelaxPolicy {
    FirstInCanonicalOrder,
    RarestLabel,
    DropMultiEvent,
};

RelaxPolicy parse_relax_policy(const std::string& name);
std::string relax_policy_name(RelaxPolicy policy);

// Collapse every multi-event sentence to at most one label per `policy`.
// Idempotent; single-label and no-event sentences pass through unchanged.
Corpus relax_to_single_label(const Corpus& corpus, RelaxPolicy policy);

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct FoldsResult {
    std::vector<FoldSplit> folds;
    // Set when some class has fewer members than k and the split fell back
    // to plain shuffled folds.
    bool degraded_to_plain = false;
};

// Deterministic stratified k-fold split. Strata are the sentence's single
// label ("no event" for empty; first-in-canonical-order for multi-event).
FoldsResult stratified_folds(const Corpus& corpus, std::size_t k, uint64_t seed);

}  // namespace evdet
