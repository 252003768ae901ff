#include "evdet/multilabel.hpp"

#include <algorithm>
#include <cmath>

#include "evdet/util.hpp"

namespace evdet {

namespace {

void check_label_order(const std::vector<std::string>& order) {
    if (order.empty()) throw InputError("multi-label training: empty label vocabulary");
    std::set<std::string> seen(order.begin(), order.end());
    if (seen.size() != order.size())
        throw InputError("multi-label training: duplicate label in order");
}

// Label membership uses a strict threshold: decision > 0 predicts the label.
bool link_positive(const LinearModel& model, const SparseVector& x) {
    return decision(model, x) > 0.0;
}

}  // namespace

SparseVector augment_vector(const SparseVector& base, const std::vector<char>& bits) {
    SparseVector out = base;
    out.dimension = base.dimension + bits.size();
    for (std::size_t j = 0; j < bits.size(); ++j)
        if (bits[j]) out.entries.emplace_back(base.dimension + j, 1.0);
    return out;
}

BRModel train_br(const std::vector<SparseVector>& xs, const std::vector<LabelSet>& label_sets,
                 const std::vector<std::string>& label_order, const LinearHyper& hyper,
                 unsigned jobs) {
    if (xs.size() != label_sets.size()) throw InputError("train_br: inputs differ in length");
    check_label_order(label_order);

    std::vector<double> uniform(xs.size(), 1.0 / static_cast<double>(xs.size()));
    BRModel model;
    model.labels = label_order;
    model.per_label.resize(label_order.size());
    parallel_for(label_order.size(), jobs, [&](std::size_t l) {
        std::vector<int> ys(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            ys[i] = label_sets[i].count(label_order[l]) ? 1 : -1;
        model.per_label[l] = train_binary(xs, ys, uniform, hyper);
    });
    return model;
}

LabelSet predict_br(const BRModel& model, const SparseVector& x) {
    LabelSet out;
    for (std::size_t l = 0; l < model.labels.size(); ++l)
        if (link_positive(model.per_label[l], x)) out.insert(model.labels[l]);
    return out;
}

ChainModel train_cc(const std::vector<SparseVector>& xs, const std::vector<LabelSet>& label_sets,
                    const std::vector<std::string>& order, const LinearHyper& hyper) {
    if (xs.size() != label_sets.size()) throw InputError("train_cc: inputs differ in length");
    check_label_order(order);
    if (xs.empty()) throw InputError("train_cc: empty training set");

    ChainModel model;
    model.order = order;
    model.base_dimension = xs.front().dimension;

    // gold 0/1 indicators of the labels earlier in the chain (teacher forcing)
    std::vector<std::vector<char>> prefix_bits(xs.size());
    for (std::size_t j = 0; j < order.size(); ++j) {
        std::vector<SparseVector> augmented;
        augmented.reserve(xs.size());
        std::vector<int> ys(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            augmented.push_back(augment_vector(xs[i], prefix_bits[i]));
            ys[i] = label_sets[i].count(order[j]) ? 1 : -1;
        }
        std::vector<double> uniform(xs.size(), 1.0 / static_cast<double>(xs.size()));
        model.links.push_back(train_binary(augmented, ys, uniform, hyper));
        for (std::size_t i = 0; i < xs.size(); ++i)
            prefix_bits[i].push_back(ys[i] > 0 ? 1 : 0);
    }
    return model;
}

LabelSet predict_cc(const ChainModel& model, const SparseVector& x) {
    if (x.dimension != model.base_dimension) throw InputError("predict_cc: dimension mismatch");
    LabelSet out;
    std::vector<char> bits;
    for (std::size_t j = 0; j < model.order.size(); ++j) {
        bool positive = link_positive(model.links[j], augment_vector(x, bits));
        bits.push_back(positive ? 1 : 0);
        if (positive) out.insert(model.order[j]);
    }
    return out;
}

EnsembleModel train_ecc(const std::vector<SparseVector>& xs,
                        const std::vector<LabelSet>& label_sets,
                        const std::vector<std::string>& label_order, std::size_t m,
                        uint64_t seed, double sample_fraction, double vote_threshold,
                        const LinearHyper& hyper, unsigned jobs) {
    if (m < 1) throw InputError("train_ecc: m must be >= 1");
    if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
        throw InputError("train_ecc: sample_fraction must be in (0,1]");
    if (!(vote_threshold > 0.0 && vote_threshold <= 1.0))
        throw InputError("train_ecc: vote_threshold must be in (0,1]");
    check_label_order(label_order);

    std::size_t sample_size = static_cast<std::size_t>(
        std::ceil(sample_fraction * static_cast<double>(xs.size())));
    if (sample_size < 2) throw InputError("train_ecc: subsample smaller than 2 instances");

    EnsembleModel model;
    model.labels = label_order;
    model.seed = seed;
    model.sample_fraction = sample_fraction;
    model.vote_threshold = vote_threshold;
    model.chains.resize(m);

    parallel_for(m, jobs, [&](std::size_t c) {
        Rng rng(mix_seed(seed, c));
        std::vector<std::string> order = label_order;
        shuffle(order, rng);

        std::vector<std::size_t> indices(xs.size());
        for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
        shuffle(indices, rng);
        indices.resize(sample_size);
        // keep the drawn subset in corpus order; fraction 1.0 is then the
        // identity and ECC(m=1) degenerates to a plain chain
        std::sort(indices.begin(), indices.end());

        std::vector<SparseVector> sub_xs;
        std::vector<LabelSet> sub_labels;
        sub_xs.reserve(sample_size);
        sub_labels.reserve(sample_size);
        for (std::size_t i : indices) {
            sub_xs.push_back(xs[i]);
            sub_labels.push_back(label_sets[i]);
        }
        model.chains[c] = train_cc(sub_xs, sub_labels, order, hyper);
    });
    return model;
}

LabelSet predict_ecc(const EnsembleModel& model, const SparseVector& x) {
    if (model.chains.empty()) throw InputError("predict_ecc: empty ensemble");
    std::map<std::string, std::size_t> votes;
    for (const auto& chain : model.chains)
        for (const auto& label : predict_cc(chain, x)) ++votes[label];

    LabelSet out;
    auto m = static_cast<double>(model.chains.size());
    for (const auto& label : model.labels) {
        auto it = votes.find(label);
        if (it == votes.end()) continue;
        if (static_cast<double>(it->second) / m >= model.vote_threshold) out.insert(label);
    }
    return out;
}

nlohmann::ordered_json br_to_json(const BRModel& model) {
    nlohmann::ordered_json obj;
    obj["labels"] = model.labels;
    auto models = nlohmann::ordered_json::object();
    for (std::size_t l = 0; l < model.labels.size(); ++l)
        models[model.labels[l]] = linear_to_json(model.per_label[l]);
    obj["per_label"] = std::move(models);
    return obj;
}

BRModel br_from_json(const nlohmann::json& obj) {
    BRModel model;
    model.labels = obj.at("labels").get<std::vector<std::string>>();
    for (const auto& label : model.labels)
        model.per_label.push_back(linear_from_json(obj.at("per_label").at(label)));
    return model;
}

nlohmann::ordered_json cc_to_json(const ChainModel& model) {
    nlohmann::ordered_json obj;
    obj["order"] = model.order;
    obj["base_dimension"] = model.base_dimension;
    auto links = nlohmann::ordered_json::array();
    for (const auto& link : model.links) links.push_back(linear_to_json(link));
    obj["links"] = std::move(links);
    return obj;
}

ChainModel cc_from_json(const nlohmann::json& obj) {
    ChainModel model;
    model.order = obj.at("order").get<std::vector<std::string>>();
    model.base_dimension = obj.at("base_dimension").get<std::size_t>();
    for (const auto& link : obj.at("links")) model.links.push_back(linear_from_json(link));
    return model;
}

nlohmann::ordered_json ecc_to_json(const EnsembleModel& model) {
    nlohmann::ordered_json obj;
    obj["labels"] = model.labels;
    obj["seed"] = model.seed;
    obj["sample_fraction"] = model.sample_fraction;
    obj["vote_threshold"] = model.vote_threshold;
    auto chains = nlohmann::ordered_json::array();
    for (const auto& chain : model.chains) chains.push_back(cc_to_json(chain));
    obj["chains"] = std::move(chains);
    return obj;
}

EnsembleModel ecc_from_json(const nlohmann::json& obj) {
    EnsembleModel model;
    model.labels = obj.at("labels").get<std::vector<std::string>>();
    model.seed = obj.at("seed").get<uint64_t>();
    model.sample_fraction = obj.at("sample_fraction").get<double>();
    model.vote_threshold = obj.at("vote_threshold").get<double>();
    for (const auto& chain : obj.at("chains")) model.chains.push_back(cc_from_json(chain));
    return model;
}

}  // namespace evdet
