#include "evdet/boost.hpp"

#include <cmath>

#include "evdet/util.hpp"

namespace evdet {

double compute_beta(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw InputError("compute_beta: epsilon must be in (0, 0.5)");
    return epsilon / (1.0 - epsilon);
}

double weighted_error(const std::vector<std::string>& predicted,
                      const std::vector<std::string>& gold,
                      const std::vector<double>& distribution) {
    if (predicted.size() != gold.size() || predicted.size() != distribution.size())
        throw InputError("weighted_error: inputs differ in length");
    double err = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        if (predicted[i] != gold[i]) err += distribution[i];
    return err;
}

std::vector<double> update_distribution(const std::vector<double>& distribution,
                                        const std::vector<char>& correct, double beta) {
    if (distribution.size() != correct.size())
        throw InputError("update_distribution: inputs differ in length");
    std::vector<double> next(distribution.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < distribution.size(); ++i) {
        next[i] = correct[i] ? distribution[i] * beta : distribution[i];
        sum += next[i];
    }
    if (sum <= 0) throw InputError("update_distribution: degenerate distribution");
    for (double& d : next) d /= sum;
    return next;
}

BoostModel train_adaboost_m1(const std::vector<SparseVector>& xs,
                             const std::vector<std::string>& class_labels,
                             const std::vector<std::string>& label_order, std::size_t t_rounds,
                             const LinearHyper& base_hyper, uint64_t seed, BoostTrace* trace,
                             unsigned jobs) {
    if (t_rounds < 1) throw InputError("train_adaboost_m1: T must be >= 1");
    const std::size_t n = xs.size();

    BoostModel model;
    model.t_requested = t_rounds;

    std::vector<double> dist(n, 1.0 / static_cast<double>(n));
    for (std::size_t t = 0; t < t_rounds; ++t) {
        LinearHyper round_hyper = base_hyper;
        round_hyper.seed = mix_seed(seed, t);
        OvRModel base = train_ovr(xs, class_labels, label_order, round_hyper, dist, jobs);
        if (t == 0) model.classes = base.classes;

        std::vector<std::string> predicted(n);
        std::vector<char> correct(n);
        for (std::size_t i = 0; i < n; ++i) {
            predicted[i] = predict_ovr(base, xs[i]);
            correct[i] = predicted[i] == class_labels[i];
        }
        double epsilon = weighted_error(predicted, class_labels, dist);

        if (epsilon >= 0.5) {
            // discard this round; keep the unweighted base when nothing is
            // stored yet so the ensemble is never worse-defined than the base
            if (model.rounds.empty()) {
                model.rounds.push_back({std::move(base), 0.5});
                if (trace) trace->rounds.push_back({epsilon, 0.5, correct, dist});
            }
            break;
        }
        if (epsilon == 0.0) {
            model.rounds.push_back({std::move(base), 1e-10});
            if (trace) trace->rounds.push_back({0.0, 1e-10, correct, dist});
            break;
        }
        double beta = compute_beta(epsilon);
        dist = update_distribution(dist, correct, beta);
        model.rounds.push_back({std::move(base), beta});
        if (trace) trace->rounds.push_back({epsilon, beta, correct, dist});
    }
    model.t_effective = model.rounds.size();
    return model;
}

std::string predict_boost(const BoostModel& model, const SparseVector& x) {
    if (model.rounds.empty()) throw InputError("predict_boost: empty model");
    std::vector<double> votes(model.classes.size(), 0.0);
    for (const auto& round : model.rounds) {
        std::string cls = predict_ovr(round.base, x);
        for (std::size_t c = 0; c < model.classes.size(); ++c) {
            if (model.classes[c] == cls) {
                votes[c] += std::log(1.0 / round.beta);
                break;
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c)
        if (votes[c] > votes[best]) best = c;
    return model.classes[best];
}

nlohmann::ordered_json boost_to_json(const BoostModel& model) {
    nlohmann::ordered_json obj;
    obj["classes"] = model.classes;
    obj["t_requested"] = model.t_requested;
    auto rounds = nlohmann::ordered_json::array();
    for (const auto& round : model.rounds)
        rounds.push_back({{"beta", round.beta}, {"base", ovr_to_json(round.base)}});
    obj["rounds"] = std::move(rounds);
    return obj;
}

BoostModel boost_from_json(const nlohmann::json& obj) {
    BoostModel model;
    model.classes = obj.at("classes").get<std::vector<std::string>>();
    model.t_requested = obj.at("t_requested").get<std::size_t>();
    for (const auto& round : obj.at("rounds"))
        model.rounds.push_back(
            {ovr_from_json(round.at("base")), round.at("beta").get<double>()});
    model.t_effective = model.rounds.size();
    return model;
}

}  // namespace evdet
