// Per-label precision/recall/F1 scoring with a virtual no-event row,
// cross-validated experiment runner, ablation driver, and table-shaped
// report output (TSV truncated to three decimals, JSON at full precision).
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "evdet/corpus.hpp"
#include "evdet/featurize.hpp"
#include "evdet/linear.hpp"
#include "evdet/multilabel.hpp"

namespace evdet {

struct LabelScore {
    std::string label;
    long tp = 0;
    long fp = 0;
    long fn = 0;
    double precision = 0.0;  // tp/(tp+fp), 0 when undefined
    double recall = 0.0;     // tp/(tp+fn), 0 when undefined
    double f1 = 0.0;         // 2PR/(P+R), 0 when undefined

    bool operator==(const LabelScore&) const = default;
};

// Pooled confusion counts per label. The virtual no-event label is scored
// first: gold-N = empty gold set, predicted-N = empty predicted set. The
// remaining rows follow `vocabulary` order.
std::vector<LabelScore> score_labels(const std::vector<LabelSet>& gold,
                                     const std::vector<LabelSet>& pred,
                                     const std::vector<std::string>& vocabulary);

// Unweighted mean of f1 values; errors on an empty sequence.
double macro_f1(const std::vector<LabelScore>& scores);

// (new/old) - 1; errors when old <= 0.
double relative_delta(double new_value, double old_value);

// Training-class key for a sentence: "N" for the empty set, the single
// label, or the sorted labels joined with '+'. Used as the class string in
// single-label training and for class-constant pruning.
std::string class_key(const LabelSet& labels);

struct ExperimentConfig {
    std::string corpus_path;
    std::string lexicon_dir;
    std::string task = "single";  // single | multi
    std::string method = "svm";   // svm | ada-svm | br | cc | ecc
    std::set<std::string> feature_groups = all_feature_groups();
    std::size_t folds = 10;
    uint64_t seed = 42;
    RelaxPolicy relax_policy = RelaxPolicy::FirstInCanonicalOrder;
    PruneMode prune_mode = PruneMode::ZeroVariance;
    double C = 1.0;
    std::size_t epochs = 50;
    double eta0 = 0.1;
    std::size_t boost_rounds = 10;   // ada-svm
    std::size_t ecc_chains = 10;     // ecc
    double sample_fraction = 0.67;   // ecc
    double vote_threshold = 0.5;     // ecc
    unsigned jobs = 1;

    bool operator==(const ExperimentConfig&) const = default;
};

// key=value lines, '#' comments and blank lines skipped. Unknown keys are
// errors naming the line.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Defaults overlaid with `pairs` (validating every value), e.g. the parsed
// config file merged with CLI overrides.
ExperimentConfig config_from_pairs(const std::map<std::string, std::string>& pairs);

// Canonical key=value rendering (sorted keys, full-precision numbers).
// `jobs` is excluded: it cannot change results, only wall time.
std::string config_canonical_text(const ExperimentConfig& config);
std::string config_fingerprint(const ExperimentConfig& config);

// Rejects unknown tasks/methods, mismatched task+method combinations,
// folds < 2 and unknown feature groups.
void validate_experiment(const ExperimentConfig& config);

struct EvalReport {
    std::string method;
    std::vector<LabelScore> rows;  // no-event row first, then canonical order
    double macro_f1 = 0.0;
    std::string config_fingerprint;
    std::set<std::string> feature_groups_enabled;
    double pruned_fraction = 0.0;  // mean over folds

    bool operator==(const EvalReport&) const = default;
};

// k-fold cross validation: per fold fit the vectorizer on training data
// only, train the configured method, predict the held-out fold; confusion
// counts are pooled across folds before scoring.
EvalReport run_experiment(const ExperimentConfig& config, const Corpus& corpus,
                          const LexiconSet& lexicons);
// Convenience overload loading corpus and lexicons from the config paths.
EvalReport run_experiment(const ExperimentConfig& config);

struct AblationResult {
    std::string held_out_group;
    EvalReport full;      // all feature groups
    EvalReport without;   // all groups minus held_out_group
    double delta = 0.0;   // relative_delta(full.macro_f1, without.macro_f1)
};

AblationResult ablation(const ExperimentConfig& config, const Corpus& corpus,
                        const LexiconSet& lexicons, const std::string& held_out_group);
AblationResult ablation(const ExperimentConfig& config, const std::string& held_out_group);

// Label rows then an Avg. row; F1 cells truncated to three decimals.
std::string report_tsv(const EvalReport& report);
std::string ablation_tsv(const AblationResult& result);

nlohmann::ordered_json report_json(const EvalReport& report);
nlohmann::ordered_json ablation_json(const AblationResult& result);

}  // namespace evdet
