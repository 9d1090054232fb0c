#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "compgen/generate.hpp"
#include "compgen/lexicon.hpp"
#include "compgen/term.hpp"

namespace compgen {

// Generation quality over the test split of a dataset. Mean and median rank
// cover only targets whose solution was found; the percentage metrics cover
// all test targets.
struct EvalReport {
    std::size_t n_targets = 0;
    std::size_t n_found = 0;
    double mean_rank = 0.0;    // over found targets
    double median_rank = 0.0;  // over found targets, midpoint on even counts
    double pct_top1 = 0.0;
    double pct_top10 = 0.0;
    double pct_top100 = 0.0;
    double pct_in_pool = 0.0;
    std::vector<std::pair<Term, std::optional<std::size_t>>> per_target;

    std::vector<double> percentages() const { return {pct_top1, pct_top10, pct_top100, pct_in_pool}; }

    void save(const std::filesystem::path& path, const std::string& config_hash = "0",
              std::uint64_t seed = 0) const;
};

// Rank of the first solution per test target. Every test target must have a
// ranked list in results (an empty list counts as nothing found).
EvalReport evaluate(const std::map<Term, RankedList>& results, const Dataset& dataset);

// Median over all targets with misses imputed at worst_rank.
double imputed_median(const EvalReport& report, std::size_t worst_rank);

// Two-sided Fisher exact test on success counts s1/n1 vs s2/n2: the sum of
// hypergeometric probabilities of tables at least as extreme as observed.
double fisher_exact(std::size_t s1, std::size_t n1, std::size_t s2, std::size_t n2);

// Predicted percentages for a chain of two independent stages.
std::vector<double> cross_domain_predict(const std::vector<double>& p_hh,
                                         const std::vector<double>& q_ss);

// Scale holistic partial-search results by the full/partial ratio.
std::vector<double> full_search_extrapolation(const std::vector<double>& full,
                                              const std::vector<double>& partial,
                                              const std::vector<double>& holistic_partial);

}  // namespace compgen
