#pragma once

#include <cstddef>
#include <vector>

#include "compgen/cooccur.hpp"
#include "compgen/corpus.hpp"
#include "compgen/spaces.hpp"
#include "compgen/term.hpp"

namespace compgen {

// Ordered triple for supervised scoring: a and b are the parts of the
// modifier-head pair, c the candidate. In composition (a, b) is the target
// and c a candidate; in decomposition a is the target and (b, c) a candidate
// split. At most one member is a pseudo-unigram.
struct Triple {
    Term a, b, c;
};

using FeatureVector = std::vector<double>;

// Grids shared by both similarity blocks.
std::vector<std::size_t> default_feature_ks();  // 100, 200, ..., 1000
std::vector<double> default_feature_ps();       // 0.0, 0.1, ..., 1.0

// Feature layout, in order:
//   3   log unigram frequencies              luf(a), luf(b), luf(c)
//   6   log bigram frequencies               lbf over ordered pairs
//                                            (a,b) (a,c) (b,a) (b,c) (c,a) (c,b)
//   12  handed PPMI                          same 6 pairs x {left, right}
//   330 domain-space similarities            unordered pairs (a,b) (a,c) (b,c)
//                                            x k in K x p in P, pair-major
//   330 function-space similarities          same grid
// Equals 681 for the default grids.
inline constexpr std::size_t kLufFeatures = 3;
inline constexpr std::size_t kLbfFeatures = 6;
inline constexpr std::size_t kPpmiFeatures = 12;
std::size_t similarity_block_size(std::size_t n_k, std::size_t n_p);
std::size_t feature_count(std::size_t n_k, std::size_t n_p);
inline constexpr std::size_t kDefaultFeatureCount = 681;

class Featurizer {
  public:
    Featurizer(const CorpusStats& stats, const SparseCooccurrence& ppmi,
               const FactorizedSpace& domain, const FactorizedSpace& function,
               std::vector<std::size_t> ks = default_feature_ks(),
               std::vector<double> ps = default_feature_ps());

    FeatureVector operator()(const Triple& t) const;
    std::size_t size() const { return feature_count(ks_.size(), ps_.size()); }

  private:
    // All (k, p) cosines of one term pair in one space, one cumulative pass
    // per p; bit-identical to similarity() at each grid point.
    void pair_block(const FactorizedSpace& s, const std::vector<std::vector<double>>& sigpow,
                    const Term& x, const Term& y, double* out) const;

    const CorpusStats& stats_;
    const SparseCooccurrence& ppmi_;
    const FactorizedSpace& domain_;
    const FactorizedSpace& function_;
    std::vector<std::size_t> ks_;
    std::vector<double> ps_;
    std::vector<std::vector<double>> domain_sigpow_;    // per p, length k_max
    std::vector<std::vector<double>> function_sigpow_;  // per p
};

// One-shot convenience wrapper over Featurizer.
FeatureVector featurize(const Triple& t, const CorpusStats& stats,
                        const SparseCooccurrence& ppmi, const FactorizedSpace& domain,
                        const FactorizedSpace& function,
                        const std::vector<std::size_t>& ks = default_feature_ks(),
                        const std::vector<double>& ps = default_feature_ps());

// Feature dump line: target \t candidate \t label \t comma-joined values.
std::string feature_dump_line(const Term& target, const Term& candidate, int label,
                              const FeatureVector& fv);

}  // namespace compgen
