#include "evdet/syngen.hpp"

#include <cstdio>
#include <filesystem>
#include <set>

#include "evdet/util.hpp"

namespace evdet {

namespace {

// Howard Hinnant's civil-date algorithms.
long days_from_civil(const Date& d) {
    int y = d.year - (d.month <= 2);
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        (153u * static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9)) + 2u) / 5u +
        static_cast<unsigned>(d.day) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

Date civil_from_days(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned month = mp < 10 ? mp + 3 : mp - 9;
    return Date{static_cast<int>(y + (month <= 2)), static_cast<int>(month),
                static_cast<int>(day)};
}

void require_unit(double v, const std::string& what) {
    if (!(v >= 0.0 && v <= 1.0)) throw InputError(what + " must be in [0,1]");
}

}  // namespace

void validate_syn_spec(const SynSpec& spec) {
    if (spec.labels.empty()) throw InputError("syn spec declares no labels");
    require_unit(spec.noise, "noise");
    if (spec.sources.empty()) throw InputError("syn spec needs at least one source id");
    if (spec.filler_tokens.empty()) throw InputError("syn spec needs filler tokens");

    std::set<std::string> names;
    std::set<std::string> triggers;
    for (const auto& label : spec.labels) {
        if (label.name.empty()) throw InputError("syn label with empty name");
        if (label.name == kNoEventClass)
            throw InputError("label name '" + kNoEventClass + "' is reserved for no-event");
        if (!names.insert(label.name).second)
            throw InputError("duplicate syn label '" + label.name + "'");
        require_unit(label.prior, "prior of '" + label.name + "'");
        require_unit(label.trigger_dropout, "trigger_dropout of '" + label.name + "'");
        require_unit(label.false_trigger_rate, "false_trigger_rate of '" + label.name + "'");
        if (label.trigger.empty()) throw InputError("empty trigger for '" + label.name + "'");
        triggers.insert(label.trigger);
        for (const auto& tmpl : label.templates) {
            bool has_trigger = false;
            for (const auto& tok : tmpl) has_trigger = has_trigger || tok == label.trigger;
            if (!has_trigger)
                throw InputError("a template of '" + label.name + "' lacks its trigger '" +
                                 label.trigger + "'");
        }
    }
    for (const auto& tok : spec.filler_tokens)
        if (triggers.count(tok))
            throw InputError("filler token '" + tok + "' collides with a trigger");

    for (const auto& rule : spec.rules) {
        if (!names.count(rule.if_label))
            throw InputError("rule refers to unknown label '" + rule.if_label + "'");
        if (!names.count(rule.then_label))
            throw InputError("rule refers to unknown label '" + rule.then_label + "'");
        require_unit(rule.probability, "rule probability");
    }

    if (spec.date_start.day < 1 || spec.date_end.day < 1)
        throw InputError("syn spec dates need a concrete day");
    if (days_from_civil(spec.date_start) > days_from_civil(spec.date_end))
        throw InputError("date_start is after date_end");
}

namespace {

std::vector<std::vector<std::string>> default_templates(const std::string& trigger) {
    return {{trigger, "was", "reported", "by", "officials"},
            {"witnesses", "said", "the", trigger, "happened"}};
}

}  // namespace

SynSpec syn_spec_from_json(const nlohmann::json& obj) {
    if (!obj.is_object()) throw InputError("syn spec must be a JSON object");
    SynSpec spec;

    if (!obj.contains("n_sentences") || !obj["n_sentences"].is_number_unsigned())
        throw InputError("syn spec field 'n_sentences' must be a non-negative integer");
    spec.n_sentences = obj["n_sentences"].get<std::size_t>();

    if (!obj.contains("labels") || !obj["labels"].is_array())
        throw InputError("syn spec field 'labels' must be an array");
    for (const auto& entry : obj["labels"]) {
        SynLabel label;
        if (!entry.contains("name") || !entry["name"].is_string())
            throw InputError("syn label needs a string 'name'");
        label.name = entry["name"].get<std::string>();
        if (!entry.contains("prior") || !entry["prior"].is_number())
            throw InputError("syn label '" + label.name + "' needs a numeric 'prior'");
        label.prior = entry["prior"].get<double>();
        label.trigger = entry.contains("trigger") ? entry["trigger"].get<std::string>()
                                                  : "trg_" + lowercase_ascii(label.name);
        if (entry.contains("templates")) {
            for (const auto& tmpl : entry["templates"])
                label.templates.push_back(tmpl.get<std::vector<std::string>>());
        } else {
            label.templates = default_templates(label.trigger);
        }
        if (entry.contains("trigger_dropout"))
            label.trigger_dropout = entry["trigger_dropout"].get<double>();
        if (entry.contains("false_trigger_rate"))
            label.false_trigger_rate = entry["false_trigger_rate"].get<double>();
        spec.labels.push_back(std::move(label));
    }

    if (obj.contains("rules")) {
        for (const auto& entry : obj["rules"]) {
            SynRule rule;
            rule.if_label = entry.at("if").get<std::string>();
            rule.then_label = entry.at("then").get<std::string>();
            rule.probability = entry.at("p").get<double>();
            spec.rules.push_back(std::move(rule));
        }
    }

    if (obj.contains("noise")) spec.noise = obj["noise"].get<double>();
    if (obj.contains("sources"))
        spec.sources = obj["sources"].get<std::vector<std::string>>();
    if (obj.contains("date_start"))
        spec.date_start = parse_date(obj["date_start"].get<std::string>());
    if (obj.contains("date_end")) spec.date_end = parse_date(obj["date_end"].get<std::string>());
    if (obj.contains("filler_tokens"))
        spec.filler_tokens = obj["filler_tokens"].get<std::vector<std::string>>();

    validate_syn_spec(spec);
    return spec;
}

SynSpec load_syn_spec(const std::string& path) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("invalid JSON in " + path + ": " + e.what());
    }
    try {
        return syn_spec_from_json(obj);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("bad syn spec in " + path + ": " + e.what());
    }
}

Corpus generate_corpus(const SynSpec& spec, uint64_t seed) {
    validate_syn_spec(spec);

    Corpus corpus;
    for (const auto& label : spec.labels) corpus.label_vocabulary.push_back(label.name);

    const long start_serial = days_from_civil(spec.date_start);
    const long n_days = days_from_civil(spec.date_end) - start_serial + 1;

    auto pick_filler = [&](Rng& rng) {
        return spec.filler_tokens[rng.uniform_index(spec.filler_tokens.size())];
    };

    for (std::size_t i = 0; i < spec.n_sentences; ++i) {
        Rng rng(mix_seed(seed, i));

        std::set<std::string> labels;
        for (const auto& label : spec.labels)
            if (rng.uniform01() < label.prior) labels.insert(label.name);
        for (const auto& rule : spec.rules)
            if (labels.count(rule.if_label) && rng.uniform01() < rule.probability)
                labels.insert(rule.then_label);

        std::vector<std::string> tokens;
        for (const auto& label : spec.labels) {
            if (!labels.count(label.name)) continue;
            if (label.templates.empty())
                throw InputError("label '" + label.name + "' selected but has no templates");
            const auto& tmpl = label.templates[rng.uniform_index(label.templates.size())];
            tokens.insert(tokens.end(), tmpl.begin(), tmpl.end());
        }
        if (tokens.empty()) {
            std::size_t n = 4 + rng.uniform_index(4);
            for (std::size_t t = 0; t < n; ++t) tokens.push_back(pick_filler(rng));
        }

        for (const auto& label : spec.labels) {
            if (!labels.count(label.name) || label.trigger_dropout <= 0.0) continue;
            if (rng.uniform01() < label.trigger_dropout)
                for (auto& tok : tokens)
                    if (tok == label.trigger) tok = pick_filler(rng);
        }

        for (const auto& label : spec.labels) {
            if (labels.count(label.name)) continue;
            double p = 1.0 - (1.0 - spec.noise) * (1.0 - label.false_trigger_rate);
            if (p > 0.0 && rng.uniform01() < p) {
                std::size_t pos = rng.uniform_index(tokens.size() + 1);
                tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), label.trigger);
            }
        }

        Sentence s;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "d%05zu", i / 10);
        s.doc_id = buf;
        std::snprintf(buf, sizeof(buf), "s%06zu", i);
        s.sentence_id = buf;
        s.source_id = spec.sources[i % spec.sources.size()];
        s.date = civil_from_days(start_serial + static_cast<long>(i) % n_days);
        s.tokens = std::move(tokens);
        s.labels = std::move(labels);
        corpus.sentences.push_back(std::move(s));
    }
    return corpus;
}

void write_syn_resources(const SynSpec& spec, const std::string& dir) {
    validate_syn_spec(spec);
    std::filesystem::create_directories(dir);

    std::set<std::string> triggers;
    for (const auto& label : spec.labels) triggers.insert(label.trigger);

    std::string verbs = "# label trigger verbs\n";
    for (const auto& trigger : triggers) verbs += trigger + "\n";
    atomic_write_file(dir + "/verbs.txt", verbs);
}

}  // namespace evdet
