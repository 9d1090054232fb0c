#include "compgen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "compgen/io.hpp"

namespace compgen {

namespace {

double median_of_sorted(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

EvalReport evaluate(const std::map<Term, RankedList>& results, const Dataset& dataset) {
    EvalReport r;
    std::vector<double> found_ranks;
    for (const auto* e : dataset.split_entries(Split::test)) {
        auto it = results.find(e->target);
        if (it == results.end())
            throw std::runtime_error("evaluate: no ranked list for target " + e->target.surface);
        std::optional<std::size_t> rank;
        const auto& items = it->second.items;
        for (std::size_t i = 0; i < items.size(); ++i) {
            bool is_solution = false;
            for (const auto& s : e->solutions)
                if (s == items[i].candidate) is_solution = true;
            if (is_solution) {
                rank = i + 1;
                break;
            }
        }
        r.per_target.emplace_back(e->target, rank);
        if (rank) found_ranks.push_back(static_cast<double>(*rank));
        ++r.n_targets;
    }
    r.n_found = found_ranks.size();
    if (!found_ranks.empty()) {
        double sum = 0.0;
        for (double x : found_ranks) sum += x;
        r.mean_rank = sum / static_cast<double>(found_ranks.size());
        std::sort(found_ranks.begin(), found_ranks.end());
        r.median_rank = median_of_sorted(found_ranks);
    }
    if (r.n_targets > 0) {
        auto pct_where = [&](std::size_t cutoff) {
            std::size_t n = 0;
            for (const auto& [t, rank] : r.per_target)
                if (rank && *rank <= cutoff) ++n;
            return 100.0 * static_cast<double>(n) / static_cast<double>(r.n_targets);
        };
        r.pct_top1 = pct_where(1);
        r.pct_top10 = pct_where(10);
        r.pct_top100 = pct_where(100);
        r.pct_in_pool = 100.0 * static_cast<double>(r.n_found) / static_cast<double>(r.n_targets);
    }
    return r;
}

double imputed_median(const EvalReport& report, std::size_t worst_rank) {
    std::vector<double> ranks;
    ranks.reserve(report.per_target.size());
    for (const auto& [t, rank] : report.per_target)
        ranks.push_back(static_cast<double>(rank.value_or(worst_rank)));
    std::sort(ranks.begin(), ranks.end());
    return median_of_sorted(ranks);
}

namespace {

double log_choose(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

double fisher_exact(std::size_t s1, std::size_t n1, std::size_t s2, std::size_t n2) {
    if (s1 > n1 || s2 > n2)
        throw std::invalid_argument("fisher_exact: successes exceed group size");
    if (n1 == 0 || n2 == 0) throw std::invalid_argument("fisher_exact: empty group");
    const std::size_t s = s1 + s2;
    const std::size_t n = n1 + n2;
    const double denom = log_choose(n, s);
    auto log_p = [&](std::size_t k) {
        return log_choose(n1, k) + log_choose(n2, s - k) - denom;
    };
    const std::size_t k_min = s > n2 ? s - n2 : 0;
    const std::size_t k_max = std::min(n1, s);
    const double observed = log_p(s1);
    // Tables whose probability is at most the observed one, with a relative
    // slack so exact symmetric counterparts are never lost to rounding.
    const double cutoff = observed + std::log1p(1e-7);
    double p = 0.0;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        double lp = log_p(k);
        if (lp <= cutoff) p += std::exp(lp);
    }
    return std::min(p, 1.0);
}

std::vector<double> cross_domain_predict(const std::vector<double>& p_hh,
                                         const std::vector<double>& q_ss) {
    if (p_hh.size() != q_ss.size())
        throw std::invalid_argument("cross_domain_predict: length mismatch");
    std::vector<double> out(p_hh.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p_hh[i] * q_ss[i] / 100.0;
    return out;
}

std::vector<double> full_search_extrapolation(const std::vector<double>& full,
                                              const std::vector<double>& partial,
                                              const std::vector<double>& holistic_partial) {
    if (full.size() != partial.size() || full.size() != holistic_partial.size())
        throw std::invalid_argument("full_search_extrapolation: length mismatch");
    std::vector<double> out(full.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (partial[i] == 0.0)
            throw std::invalid_argument("full_search_extrapolation: zero partial entry");
        out[i] = full[i] / partial[i] * holistic_partial[i];
    }
    return out;
}

void EvalReport::save(const std::filesystem::path& path, const std::string& config_hash,
                      std::uint64_t seed) const {
    std::ostringstream os;
    os << io::header_line({"report", 1, config_hash, seed}) << "\n";
    os << "targets\t" << n_targets << "\n";
    os << "found\t" << n_found << "\n";
    os << "mean_rank\t" << io::fmt_full(mean_rank) << "\n";
    os << "median_rank\t" << io::fmt_full(median_rank) << "\n";
    // Percentages match table style: one decimal place.
    char buf[32];
    auto pct = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.1f", v);
        return std::string(buf);
    };
    os << "pct_top1\t" << pct(pct_top1) << "\n";
    os << "pct_top10\t" << pct(pct_top10) << "\n";
    os << "pct_top100\t" << pct(pct_top100) << "\n";
    os << "pct_in_pool\t" << pct(pct_in_pool) << "\n";
    for (const auto& [t, rank] : per_target) {
        os << "rank\t" << t.surface << "\t";
        if (rank)
            os << *rank;
        else
            os << "-";
        os << "\n";
    }
    io::atomic_write(path, os.str());
}

}  // namespace compgen
