#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <unordered_set>
#include <vector>

#include "compgen/cooccur.hpp"
#include "compgen/corpus.hpp"
#include "compgen/spaces.hpp"
#include "compgen/term.hpp"

namespace compgen {

// Width and view parameters for the unsupervised generators.
struct GenConfig {
    SpaceView domain_view{800, 0.3};    // modifier-candidate similarity
    SpaceView function_view{100, 0.6};  // head-candidate similarity
    std::size_t max_unigrams = 2000;    // composition pool width
    std::size_t max_modifiers = 1000;   // decomposition stage-1 widths
    std::size_t max_heads = 1000;
    std::size_t max_bigrams = 2000;     // decomposition pool width

    void validate() const;
};

struct RankedItem {
    Term candidate;
    double score = 0.0;
};

// Descending score; ties ascending surface. Zero-score items are kept so a
// pool always fills its width when enough candidates exist.
struct RankedList {
    Term target;
    std::vector<RankedItem> items;

    void save(const std::filesystem::path& path, const std::string& config_hash = "0",
              std::uint64_t seed = 0) const;
    static RankedList load(const std::filesystem::path& path);
};

void sort_ranked(std::vector<RankedItem>& items);

inline double nn(double x) { return x > 0.0 ? x : 0.0; }

// Composition score of candidate c for the pair (a, b): geometric mean of the
// clamped modifier and head similarities.
double comp_score(const Term& a, const Term& b, const Term& c, const FactorizedSpace& domain,
                  const FactorizedSpace& function, const GenConfig& cfg);

// Rank every vocabulary term as a single-word paraphrase of the pair ab.
// Bulk evaluation; item-for-item equal to scoring candidates one at a time.
RankedList comp(const Term& ab, const std::vector<Term>& vocab, const FactorizedSpace& domain,
                const FactorizedSpace& function, const GenConfig& cfg);

// Decomposition stage scores for target a: how well b works as a modifier,
// c as a head, and (b, c) as a full split.
double decomp_modifier_score(const Term& a, const Term& b, const FactorizedSpace& domain,
                             const SparseCooccurrence& ppmi, const GenConfig& cfg);
double decomp_head_score(const Term& a, const Term& c, const FactorizedSpace& function,
                         const SparseCooccurrence& ppmi, const GenConfig& cfg);
double decomp_bigram_score(const Term& a, const Term& b, const Term& c,
                           const FactorizedSpace& domain, const FactorizedSpace& function,
                           const SparseCooccurrence& ppmi, const CorpusStats& stats,
                           const GenConfig& cfg);

// Two-stage decomposition: top modifiers x top heads, rescored jointly.
// With stage widths at least the vocabulary size this equals the exhaustive
// ranking of all ordered pairs.
RankedList decomp(const Term& a, const std::vector<Term>& vocab, const FactorizedSpace& domain,
                  const FactorizedSpace& function, const SparseCooccurrence& ppmi,
                  const CorpusStats& stats, const GenConfig& cfg);

// Order-preserving restriction of a ranked list to an allowed set.
RankedList filter_candidates(const RankedList& list, const std::unordered_set<Term>& allowed);

}  // namespace compgen
