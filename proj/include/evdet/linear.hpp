// Weighted binary linear classifier: L2-regularized hinge loss trained with
// deterministic epoch-wise subgradient descent. The base learner under the
// one-vs-rest, boosting and multi-label stacks.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "evdet/sparse.hpp"

namespace evdet {

struct LinearHyper {
    double C = 1.0;          // inverse regularization strength
    std::size_t epochs = 50;
    uint64_t seed = 1;
    double eta0 = 0.1;       // eta_t = eta0 / (1 + t/epochs), t = epoch index

    bool operator==(const LinearHyper&) const = default;
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    LinearHyper hyper;
    std::size_t dimension = 0;
    // set when training saw a single class; the model is the constant
    // classifier with bias = sign of that class
    bool degenerate = false;

    bool operator==(const LinearModel&) const = default;
};

// Minimizes (1/(2C))*||w||^2 + sum_i sample_weights[i]*max(0, 1 - y_i(w.x_i + b)).
// ys entries are -1/+1; sample_weights are non-negative and normalized to sum 1.
LinearModel train_binary(const std::vector<SparseVector>& xs, const std::vector<int>& ys,
                         std::vector<double> sample_weights, const LinearHyper& hyper);

// w.x + b
double decision(const LinearModel& model, const SparseVector& x);

// sign of decision; exactly 0 maps to +1
int predict_binary(const LinearModel& model, const SparseVector& x);

// The trained objective value, for oracle comparisons.
double training_objective(const LinearModel& model, const std::vector<SparseVector>& xs,
                          const std::vector<int>& ys, const std::vector<double>& sample_weights);

// Weighted hinge term alone (no regularizer).
double training_hinge_loss(const LinearModel& model, const std::vector<SparseVector>& xs,
                           const std::vector<int>& ys,
                           const std::vector<double>& sample_weights);

nlohmann::ordered_json linear_to_json(const LinearModel& model);
LinearModel linear_from_json(const nlohmann::json& obj);

}  // namespace evdet
