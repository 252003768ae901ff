#include "evdet/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "evdet/util.hpp"

namespace evdet {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

Date parse_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw InputError("bad date '" + text + "' (want YYYY-MM-DD)");
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (text[i] < '0' || text[i] > '9')
            throw InputError("bad date '" + text + "' (want YYYY-MM-DD)");
    Date d;
    d.year = std::stoi(text.substr(0, 4));
    d.month = std::stoi(text.substr(5, 2));
    d.day = std::stoi(text.substr(8, 2));
    if (d.year < 1 || d.month < 1 || d.month > 12 || d.day < 0 || d.day > 31)
        throw InputError("date out of range: '" + text + "'");
    return d;
}

std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

namespace {

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    throw InputError("line " + std::to_string(line_no) + ": " + what);
}

Sentence parse_sentence(const json& obj, std::size_t line_no) {
    Sentence s;
    for (const char* field : {"doc_id", "sentence_id", "source_id", "date"}) {
        if (!obj.contains(field) || !obj[field].is_string())
            line_error(line_no, std::string("missing or non-string field '") + field + "'");
    }
    s.doc_id = obj["doc_id"].get<std::string>();
    s.sentence_id = obj["sentence_id"].get<std::string>();
    s.source_id = obj["source_id"].get<std::string>();
    try {
        s.date = parse_date(obj["date"].get<std::string>());
    } catch (const InputError& e) {
        line_error(line_no, std::string("field 'date': ") + e.what());
    }

    if (!obj.contains("tokens") || !obj["tokens"].is_array() || obj["tokens"].empty())
        line_error(line_no, "field 'tokens' must be a non-empty array of strings");
    for (const auto& t : obj["tokens"]) {
        if (!t.is_string()) line_error(line_no, "field 'tokens' must contain only strings");
        s.tokens.push_back(t.get<std::string>());
    }

    if (!obj.contains("labels") || !obj["labels"].is_array())
        line_error(line_no, "field 'labels' must be an array of strings");
    for (const auto& l : obj["labels"]) {
        if (!l.is_string()) line_error(line_no, "field 'labels' must contain only strings");
        std::string name = l.get<std::string>();
        if (!s.labels.insert(name).second)
            line_error(line_no, "duplicate label '" + name + "' in field 'labels'");
    }

    if (obj.contains("annotations")) {
        if (!obj["annotations"].is_object())
            line_error(line_no, "field 'annotations' must be an object of objects");
        for (const auto& [group, terms] : obj["annotations"].items()) {
            if (!terms.is_object())
                line_error(line_no, "annotation group '" + group + "' must be an object");
            for (const auto& [term, count] : terms.items()) {
                if (!count.is_number_integer())
                    line_error(line_no, "annotation count for '" + term + "' must be an integer");
                s.annotations[group][term] = count.get<long>();
            }
        }
    }
    return s;
}

}  // namespace

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open corpus file: " + path);

    Corpus corpus;
    bool have_declared_vocab = false;
    std::set<std::string> vocab_set;
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) line_error(line_no, "record is not a JSON object");

        if (first_content_line && obj.contains("label_vocabulary")) {
            if (!obj["label_vocabulary"].is_array())
                line_error(line_no, "header field 'label_vocabulary' must be an array");
            for (const auto& l : obj["label_vocabulary"]) {
                if (!l.is_string())
                    line_error(line_no, "header 'label_vocabulary' must contain only strings");
                std::string name = l.get<std::string>();
                if (!vocab_set.insert(name).second)
                    line_error(line_no, "duplicate label '" + name + "' in header vocabulary");
                corpus.label_vocabulary.push_back(name);
            }
            have_declared_vocab = true;
            first_content_line = false;
            continue;
        }
        first_content_line = false;

        Sentence s = parse_sentence(obj, line_no);
        for (const auto& label : s.labels) {
            if (have_declared_vocab) {
                if (!vocab_set.count(label))
                    line_error(line_no, "label '" + label + "' not in declared vocabulary");
            } else if (vocab_set.insert(label).second) {
                corpus.label_vocabulary.push_back(label);
            }
        }
        corpus.sentences.push_back(std::move(s));
    }

    if (corpus.sentences.empty())
        throw InputError("corpus file has no sentence records: " + path);
    for (const auto& label : corpus.label_vocabulary)
        if (label == kNoEventClass)
            throw InputError("label name '" + kNoEventClass + "' is reserved for no-event");
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
    std::ostringstream out;
    ordered_json header;
    header["label_vocabulary"] = corpus.label_vocabulary;
    out << header.dump() << "\n";
    for (const auto& s : corpus.sentences) {
        ordered_json obj;
        obj["doc_id"] = s.doc_id;
        obj["sentence_id"] = s.sentence_id;
        obj["source_id"] = s.source_id;
        obj["date"] = format_date(s.date);
        obj["tokens"] = s.tokens;
        obj["labels"] = s.labels;
        if (!s.annotations.empty()) obj["annotations"] = s.annotations;
        out << obj.dump() << "\n";
    }
    atomic_write_file(path, out.str());
}

CorpusStats corpus_stats(const Corpus& corpus) {
    if (corpus.sentences.empty()) throw InputError("corpus_stats: empty corpus");
    CorpusStats st;
    st.n_sentences = corpus.sentences.size();
    for (const auto& label : corpus.label_vocabulary) st.per_label_counts[label] = 0;
    for (const auto& s : corpus.sentences) {
        if (!s.labels.empty()) ++st.n_event_sentences;
        if (s.is_multi_event()) ++st.n_multievent_sentences;
        for (const auto& label : s.labels) ++st.per_label_counts[label];
    }
    auto n = static_cast<double>(st.n_sentences);
    st.event_fraction = static_cast<double>(st.n_event_sentences) / n;
    st.multievent_fraction_of_corpus = static_cast<double>(st.n_multievent_sentences) / n;
    st.multievent_fraction_of_event =
        st.n_event_sentences == 0
            ? 0.0
            : static_cast<double>(st.n_multievent_sentences) /
                  static_cast<double>(st.n_event_sentences);
    return st;
}

RelaxPolicy parse_relax_policy(const std::string& name) {
    if (name == "first-in-canonical-order") return RelaxPolicy::FirstInCanonicalOrder;
    if (name == "rarest-label") return RelaxPolicy::RarestLabel;
    if (name == "drop-multievent") return RelaxPolicy::DropMultiEvent;
    throw InputError("unknown relax policy: '" + name + "'");
}

std::string relax_policy_name(RelaxPolicy policy) {
    switch (policy) {
        case RelaxPolicy::FirstInCanonicalOrder: return "first-in-canonical-order";
        case RelaxPolicy::RarestLabel: return "rarest-label";
        case RelaxPolicy::DropMultiEvent: return "drop-multievent";
    }
    return "?";
}

Corpus relax_to_single_label(const Corpus& corpus, RelaxPolicy policy) {
    CorpusStats st;
    if (policy == RelaxPolicy::RarestLabel && !corpus.sentences.empty())
        st = corpus_stats(corpus);

    Corpus out;
    out.label_vocabulary = corpus.label_vocabulary;
    out.sentences.reserve(corpus.sentences.size());
    for (const auto& s : corpus.sentences) {
        if (!s.is_multi_event()) {
            out.sentences.push_back(s);
            continue;
        }
        if (policy == RelaxPolicy::DropMultiEvent) continue;

        std::string chosen;
        if (policy == RelaxPolicy::FirstInCanonicalOrder) {
            for (const auto& label : corpus.label_vocabulary) {
                if (s.labels.count(label)) {
                    chosen = label;
                    break;
                }
            }
        } else {  // RarestLabel, ties broken by canonical order
            std::size_t best = 0;
            bool have = false;
            for (const auto& label : corpus.label_vocabulary) {
                if (!s.labels.count(label)) continue;
                std::size_t c = st.per_label_counts.at(label);
                if (!have || c < best) {
                    best = c;
                    chosen = label;
                    have = true;
                }
            }
        }
        Sentence relaxed = s;
        relaxed.labels = {chosen};
        out.sentences.push_back(std::move(relaxed));
    }
    return out;
}

FoldsResult stratified_folds(const Corpus& corpus, std::size_t k, uint64_t seed) {
    if (k < 2) throw InputError("stratified_folds: k must be >= 2");
    if (corpus.sentences.size() < k)
        throw InputError("stratified_folds: corpus smaller than k");

    // Stratum key: "" for no-event, otherwise the first label in canonical order.
    auto stratum_of = [&](const Sentence& s) -> std::string {
        if (s.labels.empty()) return "";
        for (const auto& label : corpus.label_vocabulary)
            if (s.labels.count(label)) return label;
        return *s.labels.begin();
    };

    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < corpus.sentences.size(); ++i)
        strata[stratum_of(corpus.sentences[i])].push_back(i);

    FoldsResult result;
    for (const auto& [name, members] : strata) {
        if (members.size() < k) {
            result.degraded_to_plain = true;
            break;
        }
    }

    std::vector<std::size_t> fold_of(corpus.sentences.size());
    Rng rng(seed);
    if (result.degraded_to_plain) {
        std::vector<std::size_t> order(corpus.sentences.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle(order, rng);
        for (std::size_t pos = 0; pos < order.size(); ++pos) fold_of[order[pos]] = pos % k;
    } else {
        // Shuffle each stratum, then deal its members round-robin so every
        // fold gets floor or ceil of the per-class share.
        for (auto& [name, members] : strata) {
            shuffle(members, rng);
            for (std::size_t pos = 0; pos < members.size(); ++pos)
                fold_of[members[pos]] = pos % k;
        }
    }

    result.folds.resize(k);
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        for (std::size_t f = 0; f < k; ++f) {
            if (fold_of[i] == f)
                result.folds[f].test.push_back(i);
            else
                result.folds[f].train.push_back(i);
        }
    }
    return result;
}

}  // namespace evdet
