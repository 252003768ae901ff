#include "evdet/multiclass.hpp"

#include <algorithm>
#include <set>

#include "evdet/corpus.hpp"
#include "evdet/util.hpp"

namespace evdet {

OvRModel train_ovr(const std::vector<SparseVector>& xs,
                   const std::vector<std::string>& class_labels,
                   const std::vector<std::string>& label_order, const LinearHyper& hyper,
                   std::vector<double> sample_weights, unsigned jobs) {
    if (xs.size() != class_labels.size())
        throw InputError("train_ovr: inputs differ in length");
    if (xs.empty()) throw InputError("train_ovr: empty training set");
    if (sample_weights.empty())
        sample_weights.assign(xs.size(), 1.0 / static_cast<double>(xs.size()));
    if (sample_weights.size() != xs.size())
        throw InputError("train_ovr: sample weights differ in length");

    std::set<std::string> observed(class_labels.begin(), class_labels.end());
    if (observed.size() < 2)
        throw InputError(
            "train_ovr: single class in training data; train a degenerate binary "
            "classifier instead");

    OvRModel model;
    model.dimension = xs.front().dimension;
    if (observed.count(kNoEventClass)) model.classes.push_back(kNoEventClass);
    for (const auto& label : label_order)
        if (observed.count(label)) model.classes.push_back(label);
    if (model.classes.size() != observed.size())
        throw InputError("train_ovr: class observed in data but missing from label order");

    std::vector<LinearModel> trained(model.classes.size());
    parallel_for(model.classes.size(), jobs, [&](std::size_t c) {
        const std::string& cls = model.classes[c];
        std::vector<int> ys(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            ys[i] = class_labels[i] == cls ? 1 : -1;
        trained[c] = train_binary(xs, ys, sample_weights, hyper);
    });
    for (std::size_t c = 0; c < model.classes.size(); ++c)
        model.per_class.emplace(model.classes[c], std::move(trained[c]));
    return model;
}

std::vector<double> ovr_decisions(const OvRModel& model, const SparseVector& x) {
    if (x.dimension != model.dimension) throw InputError("predict_ovr: dimension mismatch");
    std::vector<double> out;
    out.reserve(model.classes.size());
    for (const auto& cls : model.classes) out.push_back(decision(model.per_class.at(cls), x));
    return out;
}

std::string predict_ovr(const OvRModel& model, const SparseVector& x) {
    std::vector<double> scores = ovr_decisions(model, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c)
        if (scores[c] > scores[best]) best = c;  // ties keep the earlier class
    return model.classes[best];
}

nlohmann::ordered_json ovr_to_json(const OvRModel& model) {
    nlohmann::ordered_json obj;
    obj["classes"] = model.classes;
    obj["dimension"] = model.dimension;
    auto models = nlohmann::ordered_json::object();
    for (const auto& cls : model.classes) models[cls] = linear_to_json(model.per_class.at(cls));
    obj["per_class"] = std::move(models);
    return obj;
}

OvRModel ovr_from_json(const nlohmann::json& obj) {
    OvRModel model;
    model.classes = obj.at("classes").get<std::vector<std::string>>();
    model.dimension = obj.at("dimension").get<std::size_t>();
    for (const auto& cls : model.classes)
        model.per_class.emplace(cls, linear_from_json(obj.at("per_class").at(cls)));
    return model;
}

}  // namespace evdet
