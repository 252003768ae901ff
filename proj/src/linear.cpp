#include "evdet/linear.hpp"

#include <algorithm>
#include <cmath>

#include "evdet/util.hpp"

namespace evdet {

namespace {

void check_dimensions(const std::vector<SparseVector>& xs) {
    for (const auto& x : xs) {
        if (x.dimension != xs.front().dimension)
            throw InputError("train_binary: vectors with mismatched dimensions");
        for (const auto& [i, v] : x.entries)
            if (i >= x.dimension) throw InputError("train_binary: index out of range");
    }
}

}  // namespace

LinearModel train_binary(const std::vector<SparseVector>& xs, const std::vector<int>& ys,
                         std::vector<double> sample_weights, const LinearHyper& hyper) {
    if (xs.size() != ys.size() || xs.size() != sample_weights.size())
        throw InputError("train_binary: inputs differ in length");
    if (xs.size() < 2) throw InputError("train_binary: need at least 2 instances");
    if (hyper.C <= 0 || hyper.epochs < 1 || hyper.eta0 <= 0)
        throw InputError("train_binary: invalid hyperparameters");
    check_dimensions(xs);
    for (int y : ys)
        if (y != 1 && y != -1) throw InputError("train_binary: labels must be -1/+1");

    double weight_sum = 0.0;
    for (double w : sample_weights) {
        if (w < 0) throw InputError("train_binary: negative sample weight");
        weight_sum += w;
    }
    if (weight_sum <= 0) throw InputError("train_binary: sample weights sum to zero");
    for (double& w : sample_weights) w /= weight_sum;

    LinearModel model;
    model.hyper = hyper;
    model.dimension = xs.front().dimension;
    model.weights.assign(model.dimension, 0.0);

    bool has_pos = false, has_neg = false;
    for (int y : ys) (y > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) {
        model.bias = has_pos ? 1.0 : -1.0;
        model.degenerate = true;
        return model;
    }

    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(hyper.seed);

    auto& w = model.weights;
    double& b = model.bias;
    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        double eta = hyper.eta0 /
                     (1.0 + static_cast<double>(epoch) / static_cast<double>(hyper.epochs));
        shuffle(order, rng);
        for (std::size_t i : order) {
            double sw = sample_weights[i];
            if (sw == 0.0) continue;
            const SparseVector& x = xs[i];
            double margin = ys[i] * (dot(w, x) + b);
            // per-instance share of the regularizer subgradient: sw * w / C
            double shrink = 1.0 - eta * sw / hyper.C;
            if (shrink < 0.0) shrink = 0.0;
            for (double& wj : w) wj *= shrink;
            if (margin < 1.0) {
                double step = eta * sw * ys[i];
                for (const auto& [j, v] : x.entries) w[j] += step * v;
                b += step;  // bias is unregularized
            }
        }
    }
    return model;
}

double decision(const LinearModel& model, const SparseVector& x) {
    if (x.dimension != model.dimension)
        throw InputError("decision: dimension mismatch");
    return dot(model.weights, x) + model.bias;
}

int predict_binary(const LinearModel& model, const SparseVector& x) {
    return decision(model, x) >= 0.0 ? 1 : -1;
}

double training_hinge_loss(const LinearModel& model, const std::vector<SparseVector>& xs,
                           const std::vector<int>& ys,
                           const std::vector<double>& sample_weights) {
    double loss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double margin = ys[i] * decision(model, xs[i]);
        loss += sample_weights[i] * std::max(0.0, 1.0 - margin);
    }
    return loss;
}

double training_objective(const LinearModel& model, const std::vector<SparseVector>& xs,
                          const std::vector<int>& ys,
                          const std::vector<double>& sample_weights) {
    double reg = 0.0;
    for (double wj : model.weights) reg += wj * wj;
    reg /= 2.0 * model.hyper.C;
    return reg + training_hinge_loss(model, xs, ys, sample_weights);
}

nlohmann::ordered_json linear_to_json(const LinearModel& model) {
    nlohmann::ordered_json obj;
    obj["dimension"] = model.dimension;
    obj["bias"] = model.bias;
    auto weights = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < model.weights.size(); ++i)
        if (std::abs(model.weights[i]) > 1e-12)
            weights.push_back({i, model.weights[i]});
    obj["weights"] = std::move(weights);
    obj["hyper"] = {{"C", model.hyper.C},
                    {"epochs", model.hyper.epochs},
                    {"seed", model.hyper.seed},
                    {"eta0", model.hyper.eta0}};
    obj["degenerate"] = model.degenerate;
    return obj;
}

LinearModel linear_from_json(const nlohmann::json& obj) {
    LinearModel model;
    model.dimension = obj.at("dimension").get<std::size_t>();
    model.bias = obj.at("bias").get<double>();
    model.weights.assign(model.dimension, 0.0);
    for (const auto& pair : obj.at("weights")) {
        auto index = pair.at(0).get<std::size_t>();
        if (index >= model.dimension) throw InputError("model file: weight index out of range");
        model.weights[index] = pair.at(1).get<double>();
    }
    const auto& hyper = obj.at("hyper");
    model.hyper.C = hyper.at("C").get<double>();
    model.hyper.epochs = hyper.at("epochs").get<std::size_t>();
    model.hyper.seed = hyper.at("seed").get<uint64_t>();
    model.hyper.eta0 = hyper.at("eta0").get<double>();
    model.degenerate = obj.value("degenerate", false);
    return model;
}

}  // namespace evdet
