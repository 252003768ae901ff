// Binary Relevance, Classifier Chain and Ensemble of Classifier Chains over
// the linear base. Chains augment each link's input with the 0/1 values of
// all earlier labels: gold at train time, predicted at inference.
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "evdet/linear.hpp"
#include "evdet/sparse.hpp"

namespace evdet {

using LabelSet = std::set<std::string>;

struct BRModel {
    std::vector<std::string> labels;  // canonical order
    std::vector<LinearModel> per_label;

    bool operator==(const BRModel&) const = default;
};

struct ChainModel {
    std::vector<std::string> order;  // permutation of the label vocabulary
    std::vector<LinearModel> links;  // link j has dimension base + j
    std::size_t base_dimension = 0;

    bool operator==(const ChainModel&) const = default;
};

struct EnsembleModel {
    std::vector<std::string> labels;
    std::vector<ChainModel> chains;
    uint64_t seed = 0;
    double sample_fraction = 0.67;
    double vote_threshold = 0.5;

    bool operator==(const EnsembleModel&) const = default;
};

// Extend a base vector with `slots` augmentation columns holding the given
// 0/1 bits.
SparseVector augment_vector(const SparseVector& base, const std::vector<char>& bits);

BRModel train_br(const std::vector<SparseVector>& xs, const std::vector<LabelSet>& label_sets,
                 const std::vector<std::string>& label_order, const LinearHyper& hyper,
                 unsigned jobs = 1);
LabelSet predict_br(const BRModel& model, const SparseVector& x);

ChainModel train_cc(const std::vector<SparseVector>& xs, const std::vector<LabelSet>& label_sets,
                    const std::vector<std::string>& order, const LinearHyper& hyper);
LabelSet predict_cc(const ChainModel& model, const SparseVector& x);

EnsembleModel train_ecc(const std::vector<SparseVector>& xs,
                        const std::vector<LabelSet>& label_sets,
                        const std::vector<std::string>& label_order, std::size_t m,
                        uint64_t seed, double sample_fraction, double vote_threshold,
                        const LinearHyper& hyper, unsigned jobs = 1);
LabelSet predict_ecc(const EnsembleModel& model, const SparseVector& x);

nlohmann::ordered_json br_to_json(const BRModel& model);
BRModel br_from_json(const nlohmann::json& obj);
nlohmann::ordered_json cc_to_json(const ChainModel& model);
ChainModel cc_from_json(const nlohmann::json& obj);
nlohmann::ordered_json ecc_to_json(const EnsembleModel& model);
EnsembleModel ecc_from_json(const nlohmann::json& obj);

}  // namespace evdet
