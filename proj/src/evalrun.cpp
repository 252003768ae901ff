#include "evdet/evalrun.hpp"

#include <algorithm>
#include <fstream>

#include "evdet/boost.hpp"
#include "evdet/multiclass.hpp"
#include "evdet/util.hpp"

namespace evdet {

namespace {

void finalize(LabelScore& s) {
    s.precision = (s.tp + s.fp) > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp)
                                    : 0.0;
    s.recall = (s.tp + s.fn) > 0 ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn)
                                 : 0.0;
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
}

}  // namespace

std::vector<LabelScore> score_labels(const std::vector<LabelSet>& gold,
                                     const std::vector<LabelSet>& pred,
                                     const std::vector<std::string>& vocabulary) {
    if (gold.size() != pred.size())
        throw InputError("score_labels: gold and predictions differ in length");

    std::vector<LabelScore> out;
    LabelScore none;
    none.label = kNoEventClass;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        bool g = gold[i].empty();
        bool p = pred[i].empty();
        if (g && p) ++none.tp;
        if (!g && p) ++none.fp;
        if (g && !p) ++none.fn;
    }
    finalize(none);
    out.push_back(none);

    for (const auto& label : vocabulary) {
        if (label == kNoEventClass)
            throw InputError("score_labels: vocabulary may not contain the reserved no-event name");
        LabelScore s;
        s.label = label;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            bool g = gold[i].count(label) > 0;
            bool p = pred[i].count(label) > 0;
            if (g && p) ++s.tp;
            if (!g && p) ++s.fp;
            if (g && !p) ++s.fn;
        }
        finalize(s);
        out.push_back(s);
    }
    return out;
}

double macro_f1(const std::vector<LabelScore>& scores) {
    if (scores.empty()) throw InputError("macro_f1: no label scores");
    double sum = 0.0;
    for (const auto& s : scores) sum += s.f1;
    return sum / static_cast<double>(scores.size());
}

double relative_delta(double new_value, double old_value) {
    if (!(old_value > 0.0)) throw InputError("relative_delta: old value must be positive");
    return new_value / old_value - 1.0;
}

namespace {

uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw InputError("config key '" + key + "': not a non-negative integer: '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw InputError("config key '" + key + "': not a number: '" + value + "'");
    }
}

std::set<std::string> parse_feature_list(const std::string& value) {
    if (value == "all") return all_feature_groups();
    std::set<std::string> groups;
    for (const auto& part : split(value, ',')) {
        if (part.empty()) throw InputError("config key 'features': empty group name");
        if (!all_feature_groups().count(part))
            throw InputError("config key 'features': unknown feature group '" + part + "'");
        groups.insert(part);
    }
    if (groups.empty()) throw InputError("config key 'features': no groups listed");
    return groups;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "corpus", "lexicons",        "task",  "method", "features",        "folds",
        "seed",   "relax",           "prune", "c",      "epochs",          "eta0",
        "rounds", "chains",          "jobs",  "sample_fraction", "vote_threshold",
    };
    return keys;
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open config file: " + path);

    std::map<std::string, std::string> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw InputError(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (!known_config_keys().count(key))
            throw InputError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        pairs[key] = value;
    }
    return pairs;
}

ExperimentConfig config_from_pairs(const std::map<std::string, std::string>& pairs) {
    ExperimentConfig config;
    for (const auto& [key, value] : pairs) {
        if (key == "corpus") {
            config.corpus_path = value;
        } else if (key == "lexicons") {
            config.lexicon_dir = value;
        } else if (key == "task") {
            config.task = value;
        } else if (key == "method") {
            config.method = value;
        } else if (key == "features") {
            config.feature_groups = parse_feature_list(value);
        } else if (key == "folds") {
            config.folds = parse_u64(key, value);
        } else if (key == "seed") {
            config.seed = parse_u64(key, value);
        } else if (key == "relax") {
            config.relax_policy = parse_relax_policy(value);
        } else if (key == "prune") {
            config.prune_mode = parse_prune_mode(value);
        } else if (key == "c") {
            config.C = parse_real(key, value);
        } else if (key == "epochs") {
            config.epochs = parse_u64(key, value);
        } else if (key == "eta0") {
            config.eta0 = parse_real(key, value);
        } else if (key == "rounds") {
            config.boost_rounds = parse_u64(key, value);
        } else if (key == "chains") {
            config.ecc_chains = parse_u64(key, value);
        } else if (key == "sample_fraction") {
            config.sample_fraction = parse_real(key, value);
        } else if (key == "vote_threshold") {
            config.vote_threshold = parse_real(key, value);
        } else if (key == "jobs") {
            config.jobs = static_cast<unsigned>(parse_u64(key, value));
        } else {
            throw InputError("unknown config key '" + key + "'");
        }
    }
    return config;
}

std::string config_canonical_text(const ExperimentConfig& config) {
    std::vector<std::string> groups(config.feature_groups.begin(), config.feature_groups.end());
    std::string out;
    out += "c=" + format_full(config.C) + "\n";
    out += "chains=" + std::to_string(config.ecc_chains) + "\n";
    out += "corpus=" + config.corpus_path + "\n";
    out += "epochs=" + std::to_string(config.epochs) + "\n";
    out += "eta0=" + format_full(config.eta0) + "\n";
    out += "features=" + join(groups, ",") + "\n";
    out += "folds=" + std::to_string(config.folds) + "\n";
    out += "lexicons=" + config.lexicon_dir + "\n";
    out += "method=" + config.method + "\n";
    out += "prune=" + prune_mode_name(config.prune_mode) + "\n";
    out += "relax=" + relax_policy_name(config.relax_policy) + "\n";
    out += "rounds=" + std::to_string(config.boost_rounds) + "\n";
    out += "sample_fraction=" + format_full(config.sample_fraction) + "\n";
    out += "seed=" + std::to_string(config.seed) + "\n";
    out += "task=" + config.task + "\n";
    out += "vote_threshold=" + format_full(config.vote_threshold) + "\n";
    return out;
}

std::string config_fingerprint(const ExperimentConfig& config) {
    return to_hex(fnv1a64(config_canonical_text(config)));
}

void validate_experiment(const ExperimentConfig& config) {
    if (config.task != "single" && config.task != "multi")
        throw InputError("unknown task '" + config.task + "' (want single or multi)");
    bool single_method = config.method == "svm" || config.method == "ada-svm";
    bool multi_method =
        config.method == "br" || config.method == "cc" || config.method == "ecc";
    if (!single_method && !multi_method)
        throw InputError("unknown method '" + config.method + "'");
    if (config.task == "single" && !single_method)
        throw InputError("method '" + config.method + "' requires task=multi");
    if (config.task == "multi" && !multi_method)
        throw InputError("method '" + config.method + "' requires task=single");
    if (config.folds < 2) throw InputError("folds must be >= 2");
    if (config.feature_groups.empty()) throw InputError("no feature groups enabled");
    for (const auto& g : config.feature_groups)
        if (!all_feature_groups().count(g))
            throw InputError("unknown feature group '" + g + "'");
}

std::string class_key(const LabelSet& labels) {
    if (labels.empty()) return kNoEventClass;
    return join(std::vector<std::string>(labels.begin(), labels.end()), "+");
}

EvalReport run_experiment(const ExperimentConfig& config, const Corpus& corpus_in,
                          const LexiconSet& lexicons) {
    validate_experiment(config);

    Corpus corpus = corpus_in;
    if (config.task == "single") corpus = relax_to_single_label(corpus, config.relax_policy);
    if (corpus.sentences.empty()) throw InputError("experiment corpus is empty");

    const std::vector<std::string>& vocab = corpus.label_vocabulary;
    FoldsResult folds = stratified_folds(corpus, config.folds, config.seed);

    // Extraction is per-sentence pure, so it can run once up front without
    // leaking fold information; only vectorizer fitting is train-only.
    std::vector<RawFeatures> raw(corpus.sentences.size());
    parallel_for(corpus.sentences.size(), config.jobs,
                 [&](std::size_t i) {
                     raw[i] = extract_features(corpus.sentences[i], lexicons,
                                               config.feature_groups);
                 });

    std::vector<LabelSet> gold_all;
    std::vector<LabelSet> pred_all;
    double pruned_sum = 0.0;

    for (std::size_t f = 0; f < folds.folds.size(); ++f) {
        const FoldSplit& split = folds.folds[f];

        std::vector<RawFeatures> train_raw;
        std::vector<std::string> train_class;
        train_raw.reserve(split.train.size());
        train_class.reserve(split.train.size());
        for (std::size_t i : split.train) {
            train_raw.push_back(raw[i]);
            train_class.push_back(class_key(corpus.sentences[i].labels));
        }
        Vectorizer vec = fit_vectorizer(train_raw, train_class, config.prune_mode);
        pruned_sum += vec.pruned_fraction();

        std::vector<SparseVector> train_x(split.train.size());
        for (std::size_t i = 0; i < split.train.size(); ++i)
            train_x[i] = vectorize(train_raw[i], vec);
        std::vector<SparseVector> test_x(split.test.size());
        for (std::size_t j = 0; j < split.test.size(); ++j)
            test_x[j] = vectorize(raw[split.test[j]], vec);

        LinearHyper hyper;
        hyper.C = config.C;
        hyper.epochs = config.epochs;
        hyper.eta0 = config.eta0;
        hyper.seed = mix_seed(config.seed, 100 + f);

        std::vector<LabelSet> preds(test_x.size());
        if (config.task == "single") {
            std::vector<std::string> train_y;
            train_y.reserve(split.train.size());
            for (std::size_t i : split.train)
                train_y.push_back(class_key(corpus.sentences[i].labels));

            std::vector<std::string> classes(test_x.size());
            if (config.method == "svm") {
                OvRModel model = train_ovr(train_x, train_y, vocab, hyper, {}, config.jobs);
                for (std::size_t j = 0; j < test_x.size(); ++j)
                    classes[j] = predict_ovr(model, test_x[j]);
            } else {
                BoostModel model =
                    train_adaboost_m1(train_x, train_y, vocab, config.boost_rounds, hyper,
                                      mix_seed(config.seed, 200 + f), nullptr, config.jobs);
                for (std::size_t j = 0; j < test_x.size(); ++j)
                    classes[j] = predict_boost(model, test_x[j]);
            }
            for (std::size_t j = 0; j < test_x.size(); ++j)
                if (classes[j] != kNoEventClass) preds[j].insert(classes[j]);
        } else {
            std::vector<LabelSet> train_sets;
            train_sets.reserve(split.train.size());
            for (std::size_t i : split.train) train_sets.push_back(corpus.sentences[i].labels);

            if (config.method == "br") {
                BRModel model = train_br(train_x, train_sets, vocab, hyper, config.jobs);
                for (std::size_t j = 0; j < test_x.size(); ++j)
                    preds[j] = predict_br(model, test_x[j]);
            } else if (config.method == "cc") {
                ChainModel model = train_cc(train_x, train_sets, vocab, hyper);
                for (std::size_t j = 0; j < test_x.size(); ++j)
                    preds[j] = predict_cc(model, test_x[j]);
            } else {
                EnsembleModel model =
                    train_ecc(train_x, train_sets, vocab, config.ecc_chains,
                              mix_seed(config.seed, 300 + f), config.sample_fraction,
                              config.vote_threshold, hyper, config.jobs);
                for (std::size_t j = 0; j < test_x.size(); ++j)
                    preds[j] = predict_ecc(model, test_x[j]);
            }
        }

        for (std::size_t j = 0; j < split.test.size(); ++j) {
            gold_all.push_back(corpus.sentences[split.test[j]].labels);
            pred_all.push_back(preds[j]);
        }
    }

    EvalReport report;
    report.method = config.method;
    report.rows = score_labels(gold_all, pred_all, vocab);
    report.macro_f1 = macro_f1(report.rows);
    report.config_fingerprint = config_fingerprint(config);
    report.feature_groups_enabled = config.feature_groups;
    report.pruned_fraction = pruned_sum / static_cast<double>(folds.folds.size());
    return report;
}

EvalReport run_experiment(const ExperimentConfig& config) {
    Corpus corpus = load_corpus(config.corpus_path);
    LexiconSet lexicons = load_lexicons(config.lexicon_dir);
    return run_experiment(config, corpus, lexicons);
}

AblationResult ablation(const ExperimentConfig& config, const Corpus& corpus,
                        const LexiconSet& lexicons, const std::string& held_out_group) {
    if (!all_feature_groups().count(held_out_group))
        throw InputError("unknown feature group '" + held_out_group + "'");

    ExperimentConfig full_config = config;
    full_config.feature_groups = all_feature_groups();
    ExperimentConfig without_config = full_config;
    without_config.feature_groups.erase(held_out_group);

    AblationResult result;
    result.held_out_group = held_out_group;
    result.full = run_experiment(full_config, corpus, lexicons);
    result.without = run_experiment(without_config, corpus, lexicons);
    result.delta = result.full.macro_f1 == result.without.macro_f1
                       ? 0.0
                       : relative_delta(result.full.macro_f1, result.without.macro_f1);
    return result;
}

AblationResult ablation(const ExperimentConfig& config, const std::string& held_out_group) {
    Corpus corpus = load_corpus(config.corpus_path);
    LexiconSet lexicons = load_lexicons(config.lexicon_dir);
    return ablation(config, corpus, lexicons, held_out_group);
}

std::string report_tsv(const EvalReport& report) {
    std::string out = "Labels\t" + report.method + "\n";
    for (const auto& row : report.rows) out += row.label + "\t" + format_f3_trunc(row.f1) + "\n";
    out += "Avg.\t" + format_f3_trunc(report.macro_f1) + "\n";
    return out;
}

std::string ablation_tsv(const AblationResult& result) {
    std::string out = "Labels\tall\tno-" + result.held_out_group + "\n";
    for (std::size_t i = 0; i < result.full.rows.size(); ++i) {
        out += result.full.rows[i].label + "\t" + format_f3_trunc(result.full.rows[i].f1) +
               "\t" + format_f3_trunc(result.without.rows[i].f1) + "\n";
    }
    out += "Avg.\t" + format_f3_trunc(result.full.macro_f1) + "\t" +
           format_f3_trunc(result.without.macro_f1) + "\n";
    return out;
}

nlohmann::ordered_json report_json(const EvalReport& report) {
    nlohmann::ordered_json obj;
    obj["method"] = report.method;
    obj["config_fingerprint"] = report.config_fingerprint;
    obj["feature_groups"] = report.feature_groups_enabled;
    obj["pruned_fraction"] = report.pruned_fraction;
    obj["macro_f1"] = report.macro_f1;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json r;
        r["label"] = row.label;
        r["tp"] = row.tp;
        r["fp"] = row.fp;
        r["fn"] = row.fn;
        r["precision"] = row.precision;
        r["recall"] = row.recall;
        r["f1"] = row.f1;
        rows.push_back(std::move(r));
    }
    obj["labels"] = std::move(rows);
    return obj;
}

nlohmann::ordered_json ablation_json(const AblationResult& result) {
    nlohmann::ordered_json obj;
    obj["held_out_group"] = result.held_out_group;
    obj["delta"] = result.delta;
    obj["full"] = report_json(result.full);
    obj["without"] = report_json(result.without);
    return obj;
}

}  // namespace evdet
