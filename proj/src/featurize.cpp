#include "compgen/featurize.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "compgen/io.hpp"

namespace compgen {

std::vector<std::size_t> default_feature_ks() {
    std::vector<std::size_t> ks;
    for (std::size_t k = 100; k <= 1000; k += 100) ks.push_back(k);
    return ks;
}

std::vector<double> default_feature_ps() {
    std::vector<double> ps;
    for (int i = 0; i <= 10; ++i) ps.push_back(static_cast<double>(i) / 10.0);
    return ps;
}

std::size_t similarity_block_size(std::size_t n_k, std::size_t n_p) { return 3 * n_k * n_p; }

std::size_t feature_count(std::size_t n_k, std::size_t n_p) {
    return kLufFeatures + kLbfFeatures + kPpmiFeatures + 2 * similarity_block_size(n_k, n_p);
}

namespace {

std::vector<std::vector<double>> sigpow_table(const FactorizedSpace& s,
                                              const std::vector<double>& ps) {
    std::vector<std::vector<double>> table(ps.size());
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        table[pi].resize(s.n_factors());
        for (std::size_t i = 0; i < s.n_factors(); ++i)
            table[pi][i] = std::pow(s.sigma[static_cast<Eigen::Index>(i)], ps[pi]);
    }
    return table;
}

}  // namespace

Featurizer::Featurizer(const CorpusStats& stats, const SparseCooccurrence& ppmi,
                       const FactorizedSpace& domain, const FactorizedSpace& function,
                       std::vector<std::size_t> ks, std::vector<double> ps)
    : stats_(stats),
      ppmi_(ppmi),
      domain_(domain),
      function_(function),
      ks_(std::move(ks)),
      ps_(std::move(ps)),
      domain_sigpow_(sigpow_table(domain, ps_)),
      function_sigpow_(sigpow_table(function, ps_)) {
    if (ks_.empty() || ps_.empty())
        throw std::invalid_argument("featurizer needs non-empty k and p grids");
}

void Featurizer::pair_block(const FactorizedSpace& s,
                            const std::vector<std::vector<double>>& sigpow, const Term& x,
                            const Term& y, double* out) const {
    const std::size_t n_k = ks_.size(), n_p = ps_.size();
    auto rx = s.row_of(x);
    auto ry = s.row_of(y);
    if (!rx || !ry) {
        for (std::size_t i = 0; i < n_k * n_p; ++i) out[i] = 0.0;
        return;
    }
    const auto ix = static_cast<Eigen::Index>(*rx);
    const auto iy = static_cast<Eigen::Index>(*ry);
    const std::size_t avail = s.n_factors();
    for (std::size_t pi = 0; pi < n_p; ++pi) {
        const auto& sp = sigpow[pi];
        double dot = 0.0, nx = 0.0, ny = 0.0;
        std::size_t i = 0;
        for (std::size_t ki = 0; ki < n_k; ++ki) {
            std::size_t k_eff = std::min(ks_[ki], avail);
            // Running sums reach each checkpoint in the same order as a
            // fresh loop of that length would, so each grid point equals
            // similarity() exactly.
            for (; i < k_eff; ++i) {
                double vx = s.u(ix, static_cast<Eigen::Index>(i)) * sp[i];
                double vy = s.u(iy, static_cast<Eigen::Index>(i)) * sp[i];
                dot += vx * vy;
                nx += vx * vx;
                ny += vy * vy;
            }
            double v = 0.0;
            if (nx != 0.0 && ny != 0.0) v = dot / (std::sqrt(nx) * std::sqrt(ny));
            out[ki * n_p + pi] = v;
        }
    }
}

FeatureVector Featurizer::operator()(const Triple& t) const {
    int pseudo_count = t.a.is_pseudo() + t.b.is_pseudo() + t.c.is_pseudo();
    if (pseudo_count > 1)
        throw std::invalid_argument("featurize: more than one pseudo-unigram in triple");

    FeatureVector fv(size(), 0.0);
    std::size_t at = 0;
    fv[at++] = luf(stats_, t.a);
    fv[at++] = luf(stats_, t.b);
    fv[at++] = luf(stats_, t.c);

    const std::pair<const Term*, const Term*> ordered[6] = {
        {&t.a, &t.b}, {&t.a, &t.c}, {&t.b, &t.a}, {&t.b, &t.c}, {&t.c, &t.a}, {&t.c, &t.b}};
    for (const auto& [x, y] : ordered) fv[at++] = lbf(stats_, *x, *y);
    for (const auto& [x, y] : ordered) {
        fv[at++] = ppmi_lookup(ppmi_, *x, *y, Hand::left);
        fv[at++] = ppmi_lookup(ppmi_, *x, *y, Hand::right);
    }

    const std::size_t block = ks_.size() * ps_.size();
    const std::pair<const Term*, const Term*> unordered[3] = {
        {&t.a, &t.b}, {&t.a, &t.c}, {&t.b, &t.c}};
    for (const auto& [x, y] : unordered) {
        pair_block(domain_, domain_sigpow_, *x, *y, fv.data() + at);
        at += block;
    }
    for (const auto& [x, y] : unordered) {
        pair_block(function_, function_sigpow_, *x, *y, fv.data() + at);
        at += block;
    }
    return fv;
}

FeatureVector featurize(const Triple& t, const CorpusStats& stats,
                        const SparseCooccurrence& ppmi, const FactorizedSpace& domain,
                        const FactorizedSpace& function, const std::vector<std::size_t>& ks,
                        const std::vector<double>& ps) {
    return Featurizer(stats, ppmi, domain, function, ks, ps)(t);
}

std::string feature_dump_line(const Term& target, const Term& candidate, int label,
                              const FeatureVector& fv) {
    std::ostringstream os;
    os << target.surface << "\t" << candidate.surface << "\t" << label << "\t";
    for (std::size_t i = 0; i < fv.size(); ++i) os << (i ? "," : "") << io::fmt_short(fv[i]);
    return os.str();
}

}  // namespace compgen
