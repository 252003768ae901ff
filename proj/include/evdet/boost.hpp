// AdaBoost.M1 over the one-vs-rest base: instance reweighting by
// beta_t = eps_t/(1-eps_t), decoding by weighted vote with log(1/beta_t).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "evdet/multiclass.hpp"

namespace evdet {

struct BoostRound {
    OvRModel base;
    double beta = 0.0;  // in (0,1)

    bool operator==(const BoostRound&) const = default;
};

struct BoostModel {
    std::vector<BoostRound> rounds;
    std::vector<std::string> classes;
    std::size_t t_requested = 0;
    std::size_t t_effective = 0;  // == rounds.size()

    bool operator==(const BoostModel&) const = default;
};

// Per-round diagnostics, filled when a trace pointer is supplied to training.
struct BoostTrace {
    struct Round {
        double epsilon = 0.0;
        double beta = 0.0;
        std::vector<char> correct;               // h_t(x_i) == y_i
        std::vector<double> distribution_after;  // D_{t+1}
    };
    std::vector<Round> rounds;
};

// beta = eps/(1-eps) for eps in (0, 0.5); the caller handles the
// termination cases outside this range.
double compute_beta(double epsilon);

// Weighted error of predictions under a distribution.
double weighted_error(const std::vector<std::string>& predicted,
                      const std::vector<std::string>& gold,
                      const std::vector<double>& distribution);

// D_{t+1}(i) = D_t(i)*beta if correct else D_t(i), then normalized to sum 1.
std::vector<double> update_distribution(const std::vector<double>& distribution,
                                        const std::vector<char>& correct, double beta);

BoostModel train_adaboost_m1(const std::vector<SparseVector>& xs,
                             const std::vector<std::string>& class_labels,
                             const std::vector<std::string>& label_order, std::size_t t_rounds,
                             const LinearHyper& base_hyper, uint64_t seed,
                             BoostTrace* trace = nullptr, unsigned jobs = 1);

std::string predict_boost(const BoostModel& model, const SparseVector& x);

nlohmann::ordered_json boost_to_json(const BoostModel& model);
BoostModel boost_from_json(const nlohmann::json& obj);

}  // namespace evdet
