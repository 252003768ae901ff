// Sentence -> sparse vector: lexicon occurrence counts, sentiment strengths,
// rhetorical-signal counts, domain-id indicators, annotation pass-through.
// Vocabulary fitting prunes constant features.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "evdet/corpus.hpp"
#include "evdet/sparse.hpp"

namespace evdet {

// Feature group names (ablation units).
inline const std::string kGroupBaseLexical = "base-lexical";
inline const std::string kGroupDomainId = "domain-id";
inline const std::string kGroupSentiment = "sentiment";
inline const std::string kGroupRhetorical = "rhetorical";
inline const std::string kGroupDepParse = "dep-parse";

const std::set<std::string>& all_feature_groups();

// Group a feature name belongs to, derived from its namespace prefix.
std::string feature_group(const std::string& feature_name);

struct LexiconSet {
    // Multi-token entries are stored as token sequences; all entries lowercase.
    std::set<std::vector<std::string>> keyphrases;          // K
    std::set<std::string> verbs;                            // V
    std::set<std::vector<std::string>> entities;            // E
    std::set<std::string> modals;                           // M
    std::set<std::string> negations;                        // N list
    std::map<std::string, std::set<std::string>> synonym_expansions;
    std::map<std::string, int> sentiment_lexicon;           // strength in [-5,-1] u [1,5]
    std::map<std::vector<std::string>, std::string> rhetorical_cues;  // cue -> category
};

// Reads keyphrases.txt, verbs.txt, entities.txt, modals.txt, negations.txt,
// synonyms.tsv, sentiment.tsv, rhetorical.tsv from `dir`. Missing files yield
// empty lists. Synonym expansions are applied to K and V only.
LexiconSet load_lexicons(const std::string& dir);

// Stable digest of the lexicon contents, stored in model files so predictions
// can verify they run against the same resources.
std::string lexicon_fingerprint(const LexiconSet& lexicons);

struct RawFeatures {
    // feature-name -> value; zero-valued features are not stored.
    std::map<std::string, double> counts;

    bool operator==(const RawFeatures&) const = default;
};

RawFeatures extract_features(const Sentence& sentence, const LexiconSet& lexicons,
                             const std::set<std::string>& enabled_groups);

struct SentimentScore {
    int pos = 0;  // 0..5
    int neg = 0;  // 0..5, stored as magnitude
};

// Max-aggregation over matched sentiment terms with a 2-token negation
// window: a negation immediately (<=2 tokens) before a term flips its
// polarity before aggregation.
SentimentScore sentiment_scores(const std::vector<std::string>& tokens,
                                const LexiconSet& lexicons);

enum class PruneMode {
    ZeroVariance,    // drop features identical across all training instances
    ClassConstant,   // additionally drop features whose per-class means agree
};

PruneMode parse_prune_mode(const std::string& name);
std::string prune_mode_name(PruneMode mode);

struct Vectorizer {
    std::map<std::string, std::size_t> index_of;  // lexicographic name order
    std::size_t n_columns = 0;
    std::set<std::string> pruned;

    double pruned_fraction() const {
        std::size_t total = pruned.size() + index_of.size();
        return total == 0 ? 0.0 : static_cast<double>(pruned.size()) / static_cast<double>(total);
    }

    // Feature names carry their group in the namespace prefix.
    std::string group_of(const std::string& feature_name) const {
        return feature_group(feature_name);
    }
};

Vectorizer fit_vectorizer(const std::vector<RawFeatures>& features,
                          const std::vector<std::string>& class_of,
                          PruneMode mode = PruneMode::ZeroVariance);

// Features unseen at fit time are silently dropped.
SparseVector vectorize(const RawFeatures& features, const Vectorizer& vectorizer);

// Columns serialized as an array in index order.
nlohmann::ordered_json vectorizer_to_json(const Vectorizer& vectorizer);
Vectorizer vectorizer_from_json(const nlohmann::json& obj);

}  // namespace evdet
