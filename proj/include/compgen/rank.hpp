#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compgen/featurize.hpp"
#include "compgen/generate.hpp"
#include "compgen/lexicon.hpp"
#include "compgen/term.hpp"

namespace compgen {

struct TrainingRow {
    Term target;
    Term candidate;
    int label = 0;  // 1 = solution, 0 = distractor
    FeatureVector features;
};

struct TrainingSet {
    Task task = Task::composition;
    Flavor flavor = Flavor::standard;
    bool augmented = false;  // rows carry three-block domain-tagged features
    std::vector<TrainingRow> rows;
    std::vector<std::string> warnings;

    std::size_t count_label(int label) const;
};

using FeaturizeFn = std::function<FeatureVector(const Triple&)>;

// Triple orientation is determined by shape: a bigram candidate is a
// decomposition split, anything else a composition paraphrase.
Triple triple_for(const Term& target, const Term& candidate);

// Training rows from the train-split targets: all in-pool solutions as
// class 1, a seeded uniform sample (without replacement) of ratio_01
// distractors per solution as class 0. Targets with no in-pool solution are
// dropped; pools short on distractors contribute what they have plus a
// warning. Without a featurizer the rows carry empty feature vectors.
TrainingSet assemble_training(const Dataset& dataset, const std::map<Term, RankedList>& pools,
                              std::size_t ratio_01, std::uint64_t seed,
                              const FeaturizeFn& featurizer = nullptr);

// Three-block feature layout for training across dataset flavors: shared
// copy, then a standard-only copy, then a holistic-only copy.
enum class DomainTag : std::uint8_t { standard, holistic };
FeatureVector augment_domains(const FeatureVector& fv, DomainTag tag);
// Concatenation of both training sets with augmented features.
TrainingSet augment_training(const TrainingSet& standard_set, const TrainingSet& holistic_set);

// Kernel SVM ranker with Platt-calibrated probability outputs. The kernel is
// the degree-d inhomogeneous polynomial, cosine-normalized:
//   K(x, y) = (<x, y> + 1)^d / sqrt((<x, x> + 1)^d (<y, y> + 1)^d)
// Features are min-max scaled to [0, 1] using training ranges; prediction
// applies the same affine map, values outside the range allowed.
struct RankerModel {
    std::size_t dim = 0;
    int degree = 3;
    double cost = 1.0;
    bool augmented = false;
    std::vector<double> feat_min, feat_max;
    std::vector<FeatureVector> support;  // scaled
    std::vector<double> coef;            // alpha_i * y_i
    double rho = 0.0;
    double platt_a = 0.0, platt_b = 0.0;

    FeatureVector scale(const FeatureVector& raw) const;
    double decision(const FeatureVector& raw) const;
    double probability(const FeatureVector& raw) const;  // of class 1

    void save(const std::filesystem::path& path, const std::string& config_hash = "0",
              std::uint64_t seed = 0) const;
    static RankerModel load(const std::filesystem::path& path);
};

// SMO on the dual problem, KKT tolerance 1e-3, then a maximum-likelihood
// sigmoid fit on the training decision values.
RankerModel train(const TrainingSet& ts, int degree = 3, double cost = 1.0);

// Re-rank a pool by model probability (ties by surface). Candidate set is
// preserved exactly.
RankedList rescore(const RankerModel& m, const Term& target, const RankedList& pool,
                   const FeaturizeFn& featurizer, DomainTag tag = DomainTag::standard);

// Unsupervised baselines. Any missing row gives 0.
//   addition:       cos(row_a + row_b, row_c) in a space view
//   multiplication: cos(row_a . row_b, row_c) on sparse PPMI rows
//   holistic:       cos(row_x, row_y) in the merged space view
double baseline_add(const Term& a, const Term& b, const Term& c, const FactorizedSpace& space,
                    SpaceView view = {1000, -0.1});
double baseline_mult(const Term& a, const Term& b, const Term& c,
                     const SparseCooccurrence& ppmi);
double baseline_holistic(const Term& x, const Term& y, const FactorizedSpace& mono,
                         SpaceView view = {1300, -0.5});

}  // namespace compgen
