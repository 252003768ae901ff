#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "evdet/boost.hpp"
#include "evdet/util.hpp"
#include "test_helpers.hpp"

using namespace evdet;
using testutil::sv;

namespace {

LinearHyper base_hyper() {
    LinearHyper h;
    h.C = 50.0;
    h.epochs = 20;
    h.eta0 = 0.3;
    return h;
}

LinearModel constant_model(std::size_t dimension, double bias) {
    LinearModel m;
    m.dimension = dimension;
    m.weights.assign(dimension, 0.0);
    m.bias = bias;
    return m;
}

// OvR model over classes [A, B] predicting `winner` everywhere
OvRModel constant_voter(const std::string& winner) {
    OvRModel m;
    m.dimension = 1;
    m.classes = {"A", "B"};
    for (const auto& cls : m.classes)
        m.per_class.emplace(cls, constant_model(1, cls == winner ? 1.0 : -1.0));
    return m;
}

// noisy two-class data: class signal on separate axes, a fraction of labels flipped
struct NoisySet {
    std::vector<SparseVector> xs;
    std::vector<std::string> labels;
};

NoisySet noisy_two_class(std::size_t n, double flip_rate, uint64_t seed) {
    Rng rng(seed);
    NoisySet out;
    for (std::size_t i = 0; i < n; ++i) {
        bool is_a = rng.uniform_index(2) == 0;
        SparseVector x;
        x.dimension = 4;
        std::size_t axis = is_a ? 0 : 2;
        x.entries.emplace_back(axis, 1.0 + rng.uniform01() * 0.5);
        double spill = rng.uniform01() * 0.6;
        if (spill > 0) x.entries.emplace_back(axis + 1, spill);
        bool flip = rng.uniform01() < flip_rate;
        out.xs.push_back(std::move(x));
        out.labels.push_back((is_a != flip) ? "A" : "B");
    }
    return out;
}

}  // namespace

TEST_CASE("compute_beta maps error to odds and rejects the termination range") {
    CHECK(compute_beta(0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(compute_beta(0.1) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(compute_beta(0.4999) > 0.999);
    CHECK_THROWS_AS((void)compute_beta(0.0), InputError);
    CHECK_THROWS_AS((void)compute_beta(0.5), InputError);
    CHECK_THROWS_AS((void)compute_beta(0.7), InputError);
    CHECK_THROWS_AS((void)compute_beta(-0.1), InputError);
}

TEST_CASE("weighted_error sums the distribution over mismatches") {
    std::vector<std::string> pred = {"A", "B", "A", "B"};
    std::vector<std::string> gold = {"A", "A", "A", "B"};
    CHECK(weighted_error(pred, gold, {0.1, 0.2, 0.3, 0.4}) == doctest::Approx(0.2));
    CHECK(weighted_error(gold, gold, {0.25, 0.25, 0.25, 0.25}) == 0.0);
    CHECK_THROWS_AS((void)weighted_error(pred, gold, {0.5, 0.5}), InputError);
}

TEST_CASE("the quarter-error update yields the textbook distribution exactly") {
    std::vector<double> d = {0.25, 0.25, 0.25, 0.25};
    std::vector<char> correct = {1, 1, 1, 0};
    double beta = compute_beta(0.25);
    std::vector<double> next = update_distribution(d, correct, beta);
    REQUIRE(next.size() == 4);
    CHECK(std::abs(next[0] - 1.0 / 6.0) <= 1e-12);
    CHECK(std::abs(next[1] - 1.0 / 6.0) <= 1e-12);
    CHECK(std::abs(next[2] - 1.0 / 6.0) <= 1e-12);
    CHECK(std::abs(next[3] - 1.0 / 2.0) <= 1e-12);
}

TEST_CASE("updated distributions always sum to one") {
    Rng rng(90);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 3 + rng.uniform_index(10);
        std::vector<double> d(n);
        double sum = 0.0;
        for (auto& v : d) {
            v = rng.uniform01() + 0.01;
            sum += v;
        }
        for (auto& v : d) v /= sum;
        std::vector<char> correct(n);
        bool any_wrong = false;
        for (auto& c : correct) {
            c = rng.uniform_index(2) ? 1 : 0;
            if (!c) any_wrong = true;
        }
        if (!any_wrong) correct[0] = 0;
        std::vector<double> next = update_distribution(d, correct, 0.3);
        double total = 0.0;
        for (double v : next) total += v;
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS((void)update_distribution({0.0, 0.0}, {1, 1}, 0.5), InputError);
}

TEST_CASE("separable data stops after one perfect round") {
    std::vector<SparseVector> xs;
    std::vector<std::string> labels;
    for (int i = 0; i < 10; ++i) {
        xs.push_back(sv(2, {{0, 1.0 + 0.05 * i}}));
        labels.push_back("A");
        xs.push_back(sv(2, {{1, 1.0 + 0.05 * i}}));
        labels.push_back("B");
    }
    BoostTrace trace;
    BoostModel m = train_adaboost_m1(xs, labels, {"A", "B"}, 10, base_hyper(), 7, &trace);
    CHECK(m.t_requested == 10);
    CHECK(m.t_effective == 1);
    REQUIRE(m.rounds.size() == 1);
    CHECK(m.rounds[0].beta == 1e-10);
    REQUIRE(trace.rounds.size() == 1);
    CHECK(trace.rounds[0].epsilon == 0.0);

    // the single-round ensemble is the base classifier
    for (const auto& x : testutil::random_vectors(500, 2, 91))
        CHECK(predict_boost(m, x) == predict_ovr(m.rounds[0].base, x));
}

TEST_CASE("a first round at error one half keeps the unweighted base") {
    // identical inputs with contradictory classes: the base must get exactly
    // one of the two instances wrong under the uniform distribution
    std::vector<SparseVector> xs = {sv(1, {}), sv(1, {})};
    std::vector<std::string> labels = {"A", "B"};
    BoostTrace trace;
    BoostModel m = train_adaboost_m1(xs, labels, {"A", "B"}, 5, base_hyper(), 3, &trace);
    CHECK(m.t_effective == 1);
    REQUIRE(m.rounds.size() == 1);
    CHECK(m.rounds[0].beta == 0.5);
    REQUIRE(trace.rounds.size() == 1);
    CHECK(trace.rounds[0].epsilon == doctest::Approx(0.5));

    for (const auto& x : testutil::random_vectors(100, 1, 92))
        CHECK(predict_boost(m, x) == predict_ovr(m.rounds[0].base, x));
}

TEST_CASE("noisy data boosts through several rounds with sane internals") {
    NoisySet data = noisy_two_class(200, 0.2, 31);
    BoostTrace trace;
    BoostModel m =
        train_adaboost_m1(data.xs, data.labels, {"A", "B"}, 10, base_hyper(), 99, &trace);

    REQUIRE(m.t_effective >= 3);  // enough productive rounds to say anything
    REQUIRE(trace.rounds.size() == m.t_effective);

    double bound = 1.0;
    double previous_bound = 2.0;
    for (std::size_t t = 0; t < trace.rounds.size(); ++t) {
        const auto& round = trace.rounds[t];
        if (!(round.epsilon > 0.0 && round.epsilon < 0.5)) continue;

        // training-error bound product decreases round over round; strictly
        // so once epsilon sits measurably below one half (at 0.5 the factor
        // 2*sqrt(eps*(1-eps)) rounds to exactly 1 in double precision)
        bound *= 2.0 * std::sqrt(round.epsilon * (1.0 - round.epsilon));
        CHECK(bound <= previous_bound);
        if (round.epsilon < 0.5 - 1e-6) CHECK(bound < previous_bound);
        previous_bound = bound;

        // the updated distribution makes this round's hypothesis look random:
        // its weighted error under D_{t+1} is exactly one half
        double err = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < round.correct.size(); ++i) {
            if (!round.correct[i]) err += round.distribution_after[i];
            total += round.distribution_after[i];
        }
        CHECK(std::abs(err - 0.5) <= 1e-9);
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
    CHECK(bound < 1.0);
}

TEST_CASE("boosting is deterministic for a fixed seed") {
    NoisySet data = noisy_two_class(80, 0.15, 77);
    BoostModel a = train_adaboost_m1(data.xs, data.labels, {"A", "B"}, 5, base_hyper(), 42);
    BoostModel b = train_adaboost_m1(data.xs, data.labels, {"A", "B"}, 5, base_hyper(), 42);
    CHECK(a == b);
}

TEST_CASE("decoding weighs voters by log(1/beta)") {
    BoostModel m;
    m.classes = {"A", "B"};
    m.rounds.push_back({constant_voter("A"), 1.0 / 3.0});
    m.rounds.push_back({constant_voter("B"), 1.0 / 9.0});
    m.t_requested = m.t_effective = 2;
    // log(9) beats log(3)
    CHECK(predict_boost(m, sv(1, {})) == "B");

    // equal betas tie; the earlier class wins
    m.rounds[1].beta = 1.0 / 3.0;
    CHECK(predict_boost(m, sv(1, {})) == "A");
}

TEST_CASE("decoding matches a brute-force tally on random inputs") {
    Rng rng(93);
    BoostModel m;
    m.classes = {"A", "B", "C"};
    for (int t = 0; t < 3; ++t) {
        OvRModel base;
        base.dimension = 3;
        base.classes = m.classes;
        for (const auto& cls : base.classes) {
            LinearModel lin;
            lin.dimension = 3;
            for (int j = 0; j < 3; ++j) lin.weights.push_back(rng.uniform01() * 2 - 1);
            lin.bias = rng.uniform01() - 0.5;
            base.per_class.emplace(cls, lin);
        }
        m.rounds.push_back({std::move(base), 0.1 + 0.2 * t});
    }
    m.t_requested = m.t_effective = 3;

    for (const auto& x : testutil::random_vectors(100, 3, 94)) {
        std::vector<double> tally(m.classes.size(), 0.0);
        for (const auto& round : m.rounds) {
            std::string cls = predict_ovr(round.base, x);
            for (std::size_t c = 0; c < m.classes.size(); ++c)
                if (m.classes[c] == cls) tally[c] += std::log(1.0 / round.beta);
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < tally.size(); ++c)
            if (tally[c] > tally[best]) best = c;
        CHECK(predict_boost(m, x) == m.classes[best]);
    }
}

TEST_CASE("train_adaboost_m1 validates T") {
    std::vector<SparseVector> xs = {sv(1, {{0, 1.0}}), sv(1, {{0, -1.0}})};
    CHECK_THROWS_AS((void)train_adaboost_m1(xs, {"A", "B"}, {"A", "B"}, 0, base_hyper(), 1),
                    InputError);
}

TEST_CASE("boost JSON round trip preserves predictions and metadata") {
    NoisySet data = noisy_two_class(100, 0.15, 55);
    BoostModel m = train_adaboost_m1(data.xs, data.labels, {"A", "B"}, 6, base_hyper(), 13);

    BoostModel back = boost_from_json(boost_to_json(m));
    CHECK(back.classes == m.classes);
    CHECK(back.t_requested == m.t_requested);
    CHECK(back.t_effective == m.t_effective);
    REQUIRE(back.rounds.size() == m.rounds.size());
    for (std::size_t t = 0; t < m.rounds.size(); ++t)
        CHECK(back.rounds[t].beta == m.rounds[t].beta);
    for (const auto& x : testutil::random_vectors(100, 4, 56))
        CHECK(predict_boost(back, x) == predict_boost(m, x));
}
