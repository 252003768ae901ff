#include "evdet/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evdet/util.hpp"

namespace evdet {

namespace fs = std::filesystem;

const std::set<std::string>& all_feature_groups() {
    static const std::set<std::string> groups = {
        kGroupBaseLexical, kGroupDomainId, kGroupSentiment, kGroupRhetorical, kGroupDepParse};
    return groups;
}

std::string feature_group(const std::string& feature_name) {
    auto colon = feature_name.find(':');
    std::string prefix = feature_name.substr(0, colon);
    if (prefix == "V" || prefix == "K" || prefix == "E" || prefix == "M" || prefix == "NEG")
        return kGroupBaseLexical;
    if (prefix == "DOM") return kGroupDomainId;
    if (prefix == "SENT") return kGroupSentiment;
    if (prefix == "RHET") return kGroupRhetorical;
    if (prefix == "ANN") return kGroupDepParse;
    throw InputError("feature name with unknown namespace: '" + feature_name + "'");
}

namespace {

// Reads one lexicon file, skipping blank lines and "#" comments.
// Returns false when the file does not exist.
bool for_each_line(const std::string& path,
                   const std::function<void(const std::string&, std::size_t)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        fn(line, line_no);
    }
    return true;
}

std::vector<std::string> phrase_tokens(const std::string& entry) {
    std::vector<std::string> tokens;
    for (const auto& part : split(lowercase_ascii(entry), ' '))
        if (!part.empty()) tokens.push_back(part);
    return tokens;
}

void load_phrase_list(const std::string& path, std::set<std::vector<std::string>>& out) {
    for_each_line(path, [&](const std::string& line, std::size_t) {
        auto tokens = phrase_tokens(line);
        if (!tokens.empty()) out.insert(std::move(tokens));
    });
}

void load_token_list(const std::string& path, std::set<std::string>& out) {
    for_each_line(path, [&](const std::string& line, std::size_t) {
        auto tokens = phrase_tokens(line);
        // token lists hold single tokens; multi-token lines are kept verbatim
        // joined with spaces and simply never match
        if (!tokens.empty()) out.insert(join(tokens, " "));
    });
}

// Splits "field1\tfield2", trimming nothing else.
std::pair<std::string, std::string> tsv_fields(const std::string& line, const std::string& path,
                                               std::size_t line_no) {
    auto tab = line.find('\t');
    if (tab == std::string::npos)
        throw InputError(path + ":" + std::to_string(line_no) + ": expected TAB-separated fields");
    return {line.substr(0, tab), line.substr(tab + 1)};
}

void expand_with_synonyms(const std::map<std::string, std::set<std::string>>& synonyms,
                          std::set<std::vector<std::string>>& phrases) {
    std::set<std::vector<std::string>> added;
    for (const auto& phrase : phrases) {
        auto it = synonyms.find(join(phrase, " "));
        if (it == synonyms.end()) continue;
        for (const auto& syn : it->second) {
            auto tokens = phrase_tokens(syn);
            if (!tokens.empty()) added.insert(std::move(tokens));
        }
    }
    phrases.insert(added.begin(), added.end());
}

void expand_with_synonyms(const std::map<std::string, std::set<std::string>>& synonyms,
                          std::set<std::string>& tokens) {
    std::set<std::string> added;
    for (const auto& tok : tokens) {
        auto it = synonyms.find(tok);
        if (it == synonyms.end()) continue;
        for (const auto& syn : it->second) added.insert(lowercase_ascii(syn));
    }
    tokens.insert(added.begin(), added.end());
}

}  // namespace

LexiconSet load_lexicons(const std::string& dir) {
    LexiconSet lex;
    auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };

    load_phrase_list(path("keyphrases.txt"), lex.keyphrases);
    load_token_list(path("verbs.txt"), lex.verbs);
    load_phrase_list(path("entities.txt"), lex.entities);
    load_token_list(path("modals.txt"), lex.modals);
    load_token_list(path("negations.txt"), lex.negations);

    for_each_line(path("synonyms.tsv"), [&](const std::string& line, std::size_t line_no) {
        auto [term, rest] = tsv_fields(line, path("synonyms.tsv"), line_no);
        auto& set = lex.synonym_expansions[lowercase_ascii(term)];
        for (const auto& syn : split(rest, ','))
            if (!syn.empty()) set.insert(lowercase_ascii(syn));
    });

    std::string sentiment_path = path("sentiment.tsv");
    for_each_line(sentiment_path, [&](const std::string& line, std::size_t line_no) {
        auto [term, value] = tsv_fields(line, sentiment_path, line_no);
        int strength = 0;
        try {
            strength = std::stoi(value);
        } catch (const std::exception&) {
            throw InputError(sentiment_path + ":" + std::to_string(line_no) +
                             ": non-integer strength '" + value + "'");
        }
        if (strength == 0 || strength < -5 || strength > 5)
            throw InputError(sentiment_path + ":" + std::to_string(line_no) +
                             ": strength must be in [-5,-1] or [1,5], got " + value);
        lex.sentiment_lexicon[lowercase_ascii(term)] = strength;
    });

    for_each_line(path("rhetorical.tsv"), [&](const std::string& line, std::size_t line_no) {
        auto [cue, category] = tsv_fields(line, path("rhetorical.tsv"), line_no);
        auto tokens = phrase_tokens(cue);
        if (!tokens.empty()) lex.rhetorical_cues[tokens] = lowercase_ascii(category);
    });

    expand_with_synonyms(lex.synonym_expansions, lex.keyphrases);
    expand_with_synonyms(lex.synonym_expansions, lex.verbs);
    return lex;
}

std::string lexicon_fingerprint(const LexiconSet& lex) {
    std::ostringstream ss;
    for (const auto& p : lex.keyphrases) ss << "K|" << join(p, " ") << "\n";
    for (const auto& t : lex.verbs) ss << "V|" << t << "\n";
    for (const auto& p : lex.entities) ss << "E|" << join(p, " ") << "\n";
    for (const auto& t : lex.modals) ss << "M|" << t << "\n";
    for (const auto& t : lex.negations) ss << "NEG|" << t << "\n";
    for (const auto& [term, syns] : lex.synonym_expansions) {
        ss << "SYN|" << term;
        for (const auto& s : syns) ss << "," << s;
        ss << "\n";
    }
    for (const auto& [term, strength] : lex.sentiment_lexicon)
        ss << "SENT|" << term << "|" << strength << "\n";
    for (const auto& [cue, cat] : lex.rhetorical_cues)
        ss << "RHET|" << join(cue, " ") << "|" << cat << "\n";
    return to_hex(fnv1a64(ss.str()));
}

namespace {

// Longest-match greedy scan: at each position try the longest list entry
// starting there; a matched span is consumed for this list only.
template <typename Callback>
void scan_phrases(const std::vector<std::string>& tokens,
                  const std::set<std::vector<std::string>>& entries, Callback on_match) {
    if (entries.empty()) return;
    // group entries by first token, longest first
    std::map<std::string, std::vector<const std::vector<std::string>*>> by_first;
    for (const auto& e : entries) by_first[e.front()].push_back(&e);
    for (auto& [first, list] : by_first)
        std::sort(list.begin(), list.end(),
                  [](const auto* a, const auto* b) {
                      if (a->size() != b->size()) return a->size() > b->size();
                      return *a < *b;
                  });

    std::size_t i = 0;
    while (i < tokens.size()) {
        auto it = by_first.find(tokens[i]);
        std::size_t advance = 1;
        if (it != by_first.end()) {
            for (const auto* entry : it->second) {
                if (entry->size() > tokens.size() - i) continue;
                if (std::equal(entry->begin(), entry->end(), tokens.begin() + i)) {
                    on_match(*entry);
                    advance = entry->size();
                    break;
                }
            }
        }
        i += advance;
    }
}

}  // namespace

SentimentScore sentiment_scores(const std::vector<std::string>& tokens,
                                const LexiconSet& lex) {
    SentimentScore score;
    std::vector<std::string> lower;
    lower.reserve(tokens.size());
    for (const auto& t : tokens) lower.push_back(lowercase_ascii(t));

    for (std::size_t i = 0; i < lower.size(); ++i) {
        auto it = lex.sentiment_lexicon.find(lower[i]);
        if (it == lex.sentiment_lexicon.end()) continue;
        int strength = it->second;
        for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
            if (lex.negations.count(lower[i - back])) {
                strength = -strength;
                break;
            }
        }
        if (strength > 0)
            score.pos = std::max(score.pos, strength);
        else
            score.neg = std::max(score.neg, -strength);
    }
    return score;
}

RawFeatures extract_features(const Sentence& sentence, const LexiconSet& lex,
                             const std::set<std::string>& enabled_groups) {
    for (const auto& g : enabled_groups)
        if (!all_feature_groups().count(g))
            throw InputError("unknown feature group: '" + g + "'");

    RawFeatures out;
    auto add = [&](const std::string& name, double value) {
        if (value != 0.0) out.counts[name] += value;
    };

    std::vector<std::string> lower;
    lower.reserve(sentence.tokens.size());
    for (const auto& t : sentence.tokens) lower.push_back(lowercase_ascii(t));

    if (enabled_groups.count(kGroupBaseLexical)) {
        for (const auto& tok : lower) {
            if (lex.verbs.count(tok)) add("V:" + tok, 1);
            if (lex.modals.count(tok)) add("M:" + tok, 1);
            if (lex.negations.count(tok)) add("NEG:" + tok, 1);
        }
        scan_phrases(lower, lex.keyphrases,
                     [&](const std::vector<std::string>& p) { add("K:" + join(p, " "), 1); });
        scan_phrases(lower, lex.entities,
                     [&](const std::vector<std::string>& p) { add("E:" + join(p, " "), 1); });
    }

    if (enabled_groups.count(kGroupSentiment)) {
        SentimentScore s = sentiment_scores(sentence.tokens, lex);
        add("SENT:pos", s.pos);
        add("SENT:neg", s.neg);
    }

    if (enabled_groups.count(kGroupRhetorical)) {
        std::set<std::vector<std::string>> cues;
        for (const auto& [cue, cat] : lex.rhetorical_cues) cues.insert(cue);
        scan_phrases(lower, cues, [&](const std::vector<std::string>& cue) {
            add("RHET:" + lex.rhetorical_cues.at(cue), 1);
        });
    }

    if (enabled_groups.count(kGroupDomainId)) {
        add("DOM:src:" + sentence.source_id, 1);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "DOM:year:%04d", sentence.date.year);
        add(buf, 1);
        std::snprintf(buf, sizeof(buf), "DOM:month:%02d", sentence.date.month);
        add(buf, 1);
    }

    if (enabled_groups.count(kGroupDepParse)) {
        for (const auto& [group, terms] : sentence.annotations)
            for (const auto& [term, count] : terms)
                add("ANN:" + group + ":" + term, static_cast<double>(count));
    }
    return out;
}

PruneMode parse_prune_mode(const std::string& name) {
    if (name == "zero-variance") return PruneMode::ZeroVariance;
    if (name == "class-constant") return PruneMode::ClassConstant;
    throw InputError("unknown prune mode: '" + name + "'");
}

std::string prune_mode_name(PruneMode mode) {
    return mode == PruneMode::ZeroVariance ? "zero-variance" : "class-constant";
}

Vectorizer fit_vectorizer(const std::vector<RawFeatures>& features,
                          const std::vector<std::string>& class_of, PruneMode mode) {
    if (features.empty()) throw InputError("fit_vectorizer: empty training set");
    if (class_of.size() != features.size())
        throw InputError("fit_vectorizer: features and classes differ in length");

    std::set<std::string> names;
    for (const auto& f : features)
        for (const auto& [name, value] : f.counts) names.insert(name);

    std::map<std::string, std::size_t> class_sizes;
    for (const auto& c : class_of) ++class_sizes[c];

    Vectorizer vec;
    for (const auto& name : names) {
        // values include implicit zeros for instances lacking the feature
        double first = features.front().counts.count(name)
                           ? features.front().counts.at(name)
                           : 0.0;
        bool constant = true;
        std::map<std::string, double> class_sums;
        for (std::size_t i = 0; i < features.size(); ++i) {
            auto it = features[i].counts.find(name);
            double v = it == features[i].counts.end() ? 0.0 : it->second;
            if (v != first) constant = false;
            if (mode == PruneMode::ClassConstant) class_sums[class_of[i]] += v;
        }

        bool prune = constant;
        if (!prune && mode == PruneMode::ClassConstant) {
            double lo = 0.0, hi = 0.0;
            bool have = false;
            for (const auto& [cls, n] : class_sizes) {
                double mean = class_sums[cls] / static_cast<double>(n);
                if (!have) {
                    lo = hi = mean;
                    have = true;
                } else {
                    lo = std::min(lo, mean);
                    hi = std::max(hi, mean);
                }
            }
            prune = (hi - lo) <= 1e-9;
        }

        if (prune)
            vec.pruned.insert(name);
        else
            vec.index_of.emplace(name, vec.index_of.size());
    }
    vec.n_columns = vec.index_of.size();
    return vec;
}

SparseVector vectorize(const RawFeatures& features, const Vectorizer& vectorizer) {
    SparseVector x;
    x.dimension = vectorizer.n_columns;
    for (const auto& [name, value] : features.counts) {
        auto it = vectorizer.index_of.find(name);
        if (it == vectorizer.index_of.end() || value == 0.0) continue;
        x.entries.emplace_back(it->second, value);
    }
    std::sort(x.entries.begin(), x.entries.end());
    return x;
}

nlohmann::ordered_json vectorizer_to_json(const Vectorizer& vectorizer) {
    std::vector<std::string> columns(vectorizer.n_columns);
    for (const auto& [name, index] : vectorizer.index_of) columns[index] = name;
    nlohmann::ordered_json obj;
    obj["columns"] = columns;
    obj["pruned"] = vectorizer.pruned;
    return obj;
}

Vectorizer vectorizer_from_json(const nlohmann::json& obj) {
    Vectorizer vec;
    for (const auto& name : obj.at("columns")) {
        if (!vec.index_of.emplace(name.get<std::string>(), vec.index_of.size()).second)
            throw InputError("vectorizer: duplicate column '" + name.get<std::string>() + "'");
    }
    vec.n_columns = vec.index_of.size();
    for (const auto& name : obj.at("pruned")) vec.pruned.insert(name.get<std::string>());
    return vec;
}

}  // namespace evdet
