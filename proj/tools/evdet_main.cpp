// Command-line surface: stats, train, predict, eval, ablate, gen.
// Exit codes: 0 success, 1 internal error, 2 usage or input error.
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "evdet/boost.hpp"
#include "evdet/corpus.hpp"
#include "evdet/evalrun.hpp"
#include "evdet/featurize.hpp"
#include "evdet/multiclass.hpp"
#include "evdet/multilabel.hpp"
#include "evdet/syngen.hpp"
#include "evdet/util.hpp"

namespace {

constexpr const char* kModelFormat = "evdet-model-v1";

using Pairs = std::map<std::string, std::string>;

// Override flags collect raw strings; config_from_pairs validates them, so
// config-file values and CLI flags share one code path. Flags win.
void add_override_flags(CLI::App* cmd, Pairs& overrides) {
    auto bind = [cmd, &overrides](const std::string& flag, const std::string& key,
                                  const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [&overrides, key](const std::string& v) { overrides[key] = v; }, help);
    };
    bind("--corpus", "corpus", "corpus JSONL path");
    bind("--lexicons", "lexicons", "lexicon directory");
    bind("--task", "task", "single | multi");
    bind("--method", "method", "svm | ada-svm | br | cc | ecc");
    bind("--features", "features", "comma-separated feature groups, or 'all'");
    bind("--folds", "folds", "cross-validation folds");
    bind("--relax", "relax", "first-in-canonical-order | rarest-label | drop-multievent");
    bind("--prune", "prune", "zero-variance | class-constant");
    bind("--c", "c", "inverse regularization strength");
    bind("--epochs", "epochs", "training epochs");
    bind("--eta0", "eta0", "initial learning rate");
    bind("--rounds", "rounds", "boosting rounds");
    bind("--chains", "chains", "ensemble chain count");
    bind("--sample-fraction", "sample_fraction", "ensemble subsample fraction");
    bind("--vote-threshold", "vote_threshold", "ensemble vote threshold");
}

evdet::ExperimentConfig build_config(const std::string& config_path, const Pairs& overrides,
                                     const Pairs& global_overrides) {
    Pairs pairs = evdet::read_config_file(config_path);
    for (const auto& [key, value] : overrides) pairs[key] = value;
    for (const auto& [key, value] : global_overrides) pairs[key] = value;
    return evdet::config_from_pairs(pairs);
}

std::string render_label_set(const evdet::LabelSet& labels) {
    if (labels.empty()) return evdet::kNoEventClass;
    return evdet::join(std::vector<std::string>(labels.begin(), labels.end()), ";");
}

int cmd_stats(const std::string& corpus_path, bool json_out) {
    evdet::CorpusStats st = evdet::corpus_stats(evdet::load_corpus(corpus_path));
    if (json_out) {
        nlohmann::ordered_json obj;
        obj["n_sentences"] = st.n_sentences;
        obj["n_event_sentences"] = st.n_event_sentences;
        obj["n_multievent_sentences"] = st.n_multievent_sentences;
        obj["event_fraction"] = st.event_fraction;
        obj["multievent_fraction_of_event"] = st.multievent_fraction_of_event;
        obj["multievent_fraction_of_corpus"] = st.multievent_fraction_of_corpus;
        obj["per_label_counts"] = st.per_label_counts;
        std::cout << obj.dump(2) << "\n";
        return 0;
    }
    std::printf("n_sentences                    %zu\n", st.n_sentences);
    std::printf("n_event_sentences              %zu\n", st.n_event_sentences);
    std::printf("n_multievent_sentences         %zu\n", st.n_multievent_sentences);
    std::printf("event_fraction                 %.6f\n", st.event_fraction);
    std::printf("multievent_fraction_of_event   %.6f\n", st.multievent_fraction_of_event);
    std::printf("multievent_fraction_of_corpus  %.6f\n", st.multievent_fraction_of_corpus);
    std::printf("per_label_counts:\n");
    for (const auto& [label, n] : st.per_label_counts)
        std::printf("  %-16s %zu\n", label.c_str(), n);
    return 0;
}

int cmd_train(const evdet::ExperimentConfig& config, const std::string& out_path) {
    evdet::validate_experiment(config);
    evdet::Corpus corpus = evdet::load_corpus(config.corpus_path);
    evdet::LexiconSet lexicons = evdet::load_lexicons(config.lexicon_dir);
    if (config.task == "single")
        corpus = evdet::relax_to_single_label(corpus, config.relax_policy);
    if (corpus.sentences.empty()) throw evdet::InputError("training corpus is empty");

    std::vector<evdet::RawFeatures> raw(corpus.sentences.size());
    evdet::parallel_for(corpus.sentences.size(), config.jobs, [&](std::size_t i) {
        raw[i] = evdet::extract_features(corpus.sentences[i], lexicons, config.feature_groups);
    });
    std::vector<std::string> classes(corpus.sentences.size());
    for (std::size_t i = 0; i < corpus.sentences.size(); ++i)
        classes[i] = evdet::class_key(corpus.sentences[i].labels);

    evdet::Vectorizer vec = evdet::fit_vectorizer(raw, classes, config.prune_mode);
    std::vector<evdet::SparseVector> xs(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) xs[i] = evdet::vectorize(raw[i], vec);

    evdet::LinearHyper hyper;
    hyper.C = config.C;
    hyper.epochs = config.epochs;
    hyper.eta0 = config.eta0;
    hyper.seed = config.seed;

    nlohmann::ordered_json model_json;
    if (config.method == "svm") {
        model_json = evdet::ovr_to_json(evdet::train_ovr(xs, classes, corpus.label_vocabulary,
                                                         hyper, {}, config.jobs));
    } else if (config.method == "ada-svm") {
        model_json = evdet::boost_to_json(evdet::train_adaboost_m1(
            xs, classes, corpus.label_vocabulary, config.boost_rounds, hyper,
            evdet::mix_seed(config.seed, 1), nullptr, config.jobs));
    } else {
        std::vector<evdet::LabelSet> sets(corpus.sentences.size());
        for (std::size_t i = 0; i < corpus.sentences.size(); ++i)
            sets[i] = corpus.sentences[i].labels;
        if (config.method == "br") {
            model_json = evdet::br_to_json(
                evdet::train_br(xs, sets, corpus.label_vocabulary, hyper, config.jobs));
        } else if (config.method == "cc") {
            model_json =
                evdet::cc_to_json(evdet::train_cc(xs, sets, corpus.label_vocabulary, hyper));
        } else {
            model_json = evdet::ecc_to_json(evdet::train_ecc(
                xs, sets, corpus.label_vocabulary, config.ecc_chains,
                evdet::mix_seed(config.seed, 2), config.sample_fraction,
                config.vote_threshold, hyper, config.jobs));
        }
    }

    nlohmann::ordered_json file;
    file["format"] = kModelFormat;
    file["task"] = config.task;
    file["method"] = config.method;
    file["vocabulary"] = corpus.label_vocabulary;
    file["feature_groups"] = config.feature_groups;
    file["relax"] = evdet::relax_policy_name(config.relax_policy);
    file["prune"] = evdet::prune_mode_name(config.prune_mode);
    file["lexicon_dir"] = config.lexicon_dir;
    file["lexicon_fingerprint"] = evdet::lexicon_fingerprint(lexicons);
    file["config_fingerprint"] = evdet::config_fingerprint(config);
    file["vectorizer"] = evdet::vectorizer_to_json(vec);
    file["model"] = std::move(model_json);
    evdet::atomic_write_file(out_path, file.dump() + "\n");
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& corpus_path,
                const std::string& lexicon_override, unsigned jobs) {
    nlohmann::json file;
    try {
        file = nlohmann::json::parse(evdet::read_file(model_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw evdet::InputError("invalid model JSON in " + model_path + ": " + e.what());
    }

    try {
        if (!file.is_object() || file.value("format", "") != kModelFormat)
            throw evdet::InputError("not a recognized model file: " + model_path);

        std::string lexicon_dir =
            lexicon_override.empty() ? file.at("lexicon_dir").get<std::string>()
                                     : lexicon_override;
        evdet::LexiconSet lexicons = evdet::load_lexicons(lexicon_dir);
        if (evdet::lexicon_fingerprint(lexicons) !=
            file.at("lexicon_fingerprint").get<std::string>())
            throw evdet::InputError(
                "lexicon fingerprint mismatch: resources differ from the ones the model "
                "was trained with");

        evdet::Corpus corpus = evdet::load_corpus(corpus_path);
        evdet::Vectorizer vec = evdet::vectorizer_from_json(file.at("vectorizer"));
        auto groups = file.at("feature_groups").get<std::set<std::string>>();
        std::string method = file.at("method").get<std::string>();

        auto vector_of = [&](const evdet::Sentence& s) {
            return evdet::vectorize(evdet::extract_features(s, lexicons, groups), vec);
        };

        std::vector<std::string> lines(corpus.sentences.size());
        if (method == "svm" || method == "ada-svm") {
            evdet::OvRModel ovr;
            evdet::BoostModel boost;
            if (method == "svm")
                ovr = evdet::ovr_from_json(file.at("model"));
            else
                boost = evdet::boost_from_json(file.at("model"));
            evdet::parallel_for(corpus.sentences.size(), jobs, [&](std::size_t i) {
                evdet::SparseVector x = vector_of(corpus.sentences[i]);
                lines[i] = method == "svm" ? evdet::predict_ovr(ovr, x)
                                           : evdet::predict_boost(boost, x);
            });
        } else if (method == "br" || method == "cc" || method == "ecc") {
            evdet::BRModel br;
            evdet::ChainModel cc;
            evdet::EnsembleModel ecc;
            if (method == "br")
                br = evdet::br_from_json(file.at("model"));
            else if (method == "cc")
                cc = evdet::cc_from_json(file.at("model"));
            else
                ecc = evdet::ecc_from_json(file.at("model"));
            evdet::parallel_for(corpus.sentences.size(), jobs, [&](std::size_t i) {
                evdet::SparseVector x = vector_of(corpus.sentences[i]);
                evdet::LabelSet labels = method == "br"   ? evdet::predict_br(br, x)
                                         : method == "cc" ? evdet::predict_cc(cc, x)
                                                          : evdet::predict_ecc(ecc, x);
                lines[i] = render_label_set(labels);
            });
        } else {
            throw evdet::InputError("model file names unknown method '" + method + "'");
        }

        for (std::size_t i = 0; i < corpus.sentences.size(); ++i)
            std::cout << corpus.sentences[i].sentence_id << "\t" << lines[i] << "\n";
        return 0;
    } catch (const nlohmann::json::exception& e) {
        throw evdet::InputError(std::string("bad model file: ") + e.what());
    }
}

int cmd_eval(const evdet::ExperimentConfig& config, const std::string& out_prefix) {
    evdet::EvalReport report = evdet::run_experiment(config);
    std::string tsv = evdet::report_tsv(report);
    std::cout << tsv;
    if (!out_prefix.empty()) {
        evdet::atomic_write_file(out_prefix + ".tsv", tsv);
        evdet::atomic_write_file(out_prefix + ".json",
                                 evdet::report_json(report).dump(2) + "\n");
    }
    return 0;
}

int cmd_ablate(const evdet::ExperimentConfig& config, const std::string& group,
               const std::string& out_prefix) {
    evdet::AblationResult result = evdet::ablation(config, group);
    std::string tsv = evdet::ablation_tsv(result);
    std::cout << tsv;
    if (!out_prefix.empty()) {
        evdet::atomic_write_file(out_prefix + ".tsv", tsv);
        evdet::atomic_write_file(out_prefix + ".json",
                                 evdet::ablation_json(result).dump(2) + "\n");
    }
    return 0;
}

int cmd_gen(const std::string& spec_path, const std::string& out_corpus,
            const std::string& out_lexicons, uint64_t seed) {
    evdet::SynSpec spec = evdet::load_syn_spec(spec_path);
    evdet::Corpus corpus = evdet::generate_corpus(spec, seed);
    evdet::write_corpus(corpus, out_corpus);
    if (!out_lexicons.empty()) evdet::write_syn_resources(spec, out_lexicons);
    return 0;
}

uint64_t parse_count_flag(const std::string& flag, const std::string& value) {
    try {
        std::size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw evdet::InputError(flag + ": not a non-negative integer: '" + value + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sentence-level event classification toolkit"};
    app.require_subcommand(1);

    Pairs global_overrides;
    bool json_flag = false;
    app.add_option_function<std::string>(
        "--seed", [&](const std::string& v) { global_overrides["seed"] = v; },
        "random seed (overrides config)");
    app.add_option_function<std::string>(
        "--jobs", [&](const std::string& v) { global_overrides["jobs"] = v; },
        "worker threads (overrides config)");
    app.add_flag("--json", json_flag, "JSON output where applicable");

    std::string stats_corpus;
    CLI::App* stats = app.add_subcommand("stats", "print corpus statistics");
    stats->fallthrough();
    stats->add_option("corpus", stats_corpus, "corpus JSONL path")->required();

    std::string train_config, train_out;
    Pairs train_overrides;
    CLI::App* train = app.add_subcommand("train", "train a model on the full corpus");
    train->fallthrough();
    train->add_option("config", train_config, "experiment config file")->required();
    train->add_option("--out", train_out, "output model path")->required();
    add_override_flags(train, train_overrides);

    std::string predict_model, predict_corpus, predict_lexicons;
    CLI::App* predict = app.add_subcommand("predict", "print per-sentence label predictions");
    predict->fallthrough();
    predict->add_option("model", predict_model, "model file from train")->required();
    predict->add_option("corpus", predict_corpus, "corpus JSONL path")->required();
    predict->add_option("--lexicons", predict_lexicons,
                        "lexicon directory (default: path stored in the model)");

    std::string eval_config, eval_out;
    Pairs eval_overrides;
    CLI::App* eval = app.add_subcommand("eval", "cross-validated evaluation report");
    eval->fallthrough();
    eval->add_option("config", eval_config, "experiment config file")->required();
    eval->add_option("--out", eval_out, "output path prefix (.tsv and .json appended)");
    add_override_flags(eval, eval_overrides);

    std::string ablate_config, ablate_group, ablate_out;
    Pairs ablate_overrides;
    CLI::App* ablate = app.add_subcommand("ablate", "feature-group ablation report");
    ablate->fallthrough();
    ablate->add_option("config", ablate_config, "experiment config file")->required();
    ablate->add_option("--group", ablate_group, "feature group to hold out")->required();
    ablate->add_option("--out", ablate_out, "output path prefix (.tsv and .json appended)");
    add_override_flags(ablate, ablate_overrides);

    std::string gen_spec, gen_corpus, gen_lexicons;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic corpus");
    gen->fallthrough();
    gen->add_option("spec", gen_spec, "generator spec JSON")->required();
    gen->add_option("--out", gen_corpus, "output corpus JSONL path")->required();
    gen->add_option("--lexicons", gen_lexicons, "also write matching lexicon resources here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        unsigned jobs = 1;
        if (global_overrides.count("jobs"))
            jobs = static_cast<unsigned>(parse_count_flag("--jobs", global_overrides.at("jobs")));
        uint64_t seed = 42;
        if (global_overrides.count("seed"))
            seed = parse_count_flag("--seed", global_overrides.at("seed"));

        if (stats->parsed()) return cmd_stats(stats_corpus, json_flag);
        if (train->parsed())
            return cmd_train(build_config(train_config, train_overrides, global_overrides),
                             train_out);
        if (predict->parsed())
            return cmd_predict(predict_model, predict_corpus, predict_lexicons, jobs);
        if (eval->parsed())
            return cmd_eval(build_config(eval_config, eval_overrides, global_overrides),
                            eval_out);
        if (ablate->parsed())
            return cmd_ablate(build_config(ablate_config, ablate_overrides, global_overrides),
                              ablate_group, ablate_out);
        if (gen->parsed()) return cmd_gen(gen_spec, gen_corpus, gen_lexicons, seed);
        return 0;
    } catch (const evdet::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
