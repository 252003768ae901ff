// One-vs-rest multiclass classifier over the linear base, with "N"
// (no event) as an explicit class.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "evdet/linear.hpp"
#include "evdet/sparse.hpp"

namespace evdet {

struct OvRModel {
    // "N" first when present, then canonical label order; only classes
    // observed in training appear.
    std::vector<std::string> classes;
    std::map<std::string, LinearModel> per_class;
    std::size_t dimension = 0;

    bool operator==(const OvRModel&) const = default;
};

// `label_order` is the canonical label order (no "N" entry needed); it fixes
// class order and the argmax tie-break. Empty `sample_weights` means uniform.
OvRModel train_ovr(const std::vector<SparseVector>& xs,
                   const std::vector<std::string>& class_labels,
                   const std::vector<std::string>& label_order, const LinearHyper& hyper,
                   std::vector<double> sample_weights = {}, unsigned jobs = 1);

std::string predict_ovr(const OvRModel& model, const SparseVector& x);

// Per-class decision values in class order.
std::vector<double> ovr_decisions(const OvRModel& model, const SparseVector& x);

nlohmann::ordered_json ovr_to_json(const OvRModel& model);
OvRModel ovr_from_json(const nlohmann::json& obj);

}  // namespace evdet
