#include "compgen/generate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "compgen/io.hpp"

namespace compgen {

void GenConfig::validate() const {
    if (max_bigrams > max_modifiers * max_heads)
        throw std::invalid_argument("max_bigrams exceeds max_modifiers * max_heads");
    if (max_unigrams == 0 || max_modifiers == 0 || max_heads == 0 || max_bigrams == 0)
        throw std::invalid_argument("generator widths must be positive");
}

void sort_ranked(std::vector<RankedItem>& items) {
    std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.candidate < b.candidate;
    });
}

namespace {

void truncate(std::vector<RankedItem>& items, std::size_t width) {
    if (items.size() > width) items.resize(width);
}

}  // namespace

double comp_score(const Term& a, const Term& b, const Term& c, const FactorizedSpace& domain,
                  const FactorizedSpace& function, const GenConfig& cfg) {
    double ds = similarity(domain, cfg.domain_view, a, c);
    double fs = similarity(function, cfg.function_view, b, c);
    return std::sqrt(nn(ds) * nn(fs));
}

RankedList comp(const Term& ab, const std::vector<Term>& vocab, const FactorizedSpace& domain,
                const FactorizedSpace& function, const GenConfig& cfg) {
    if (!ab.is_pair()) throw std::invalid_argument("comp: target must be a modifier-head pair");
    cfg.validate();
    Term a = Term::make_unigram(ab.modifier);
    Term b = Term::make_unigram(ab.head);

    auto ra = domain.row_of(a);
    auto rb = function.row_of(b);
    std::optional<ViewScorer> ds_scorer, fs_scorer;
    if (ra) ds_scorer.emplace(domain, cfg.domain_view, *ra);
    if (rb) fs_scorer.emplace(function, cfg.function_view, *rb);

    RankedList out;
    out.target = ab;
    out.items.reserve(vocab.size());
    for (const auto& c : vocab) {
        double ds = 0.0, fs = 0.0;
        if (ds_scorer) {
            auto rc = domain.row_of(c);
            if (rc) ds = ds_scorer->score_row(*rc);
        }
        if (fs_scorer) {
            auto rc = function.row_of(c);
            if (rc) fs = fs_scorer->score_row(*rc);
        }
        out.items.push_back({c, std::sqrt(nn(ds) * nn(fs))});
    }
    sort_ranked(out.items);
    truncate(out.items, cfg.max_unigrams);
    return out;
}

namespace {

double handed_sum(const SparseCooccurrence& ppmi, const Term& x, const Term& y) {
    return ppmi_lookup(ppmi, x, y, Hand::left) + ppmi_lookup(ppmi, x, y, Hand::right);
}

}  // namespace

double decomp_modifier_score(const Term& a, const Term& b, const FactorizedSpace& domain,
                             const SparseCooccurrence& ppmi, const GenConfig& cfg) {
    return nn(similarity(domain, cfg.domain_view, a, b)) * handed_sum(ppmi, a, b);
}

double decomp_head_score(const Term& a, const Term& c, const FactorizedSpace& function,
                         const SparseCooccurrence& ppmi, const GenConfig& cfg) {
    return nn(similarity(function, cfg.function_view, a, c)) * handed_sum(ppmi, a, c);
}

double decomp_bigram_score(const Term& a, const Term& b, const Term& c,
                           const FactorizedSpace& domain, const FactorizedSpace& function,
                           const SparseCooccurrence& ppmi, const CorpusStats& stats,
                           const GenConfig& cfg) {
    double sm = decomp_modifier_score(a, b, domain, ppmi, cfg);
    double sh = decomp_head_score(a, c, function, ppmi, cfg);
    return sm * sh * lbf(stats, Term::make_unigram(b.surface), Term::make_unigram(c.surface)) *
           ppmi_lookup(ppmi, b, c, Hand::right);
}

RankedList decomp(const Term& a, const std::vector<Term>& vocab, const FactorizedSpace& domain,
                  const FactorizedSpace& function, const SparseCooccurrence& ppmi,
                  const CorpusStats& stats, const GenConfig& cfg) {
    cfg.validate();

    // Stage 1: independent modifier and head shortlists.
    std::vector<RankedItem> modifiers, heads;
    modifiers.reserve(vocab.size());
    heads.reserve(vocab.size());
    auto ra_d = domain.row_of(a);
    auto ra_f = function.row_of(a);
    std::optional<ViewScorer> ds_scorer, fs_scorer;
    if (ra_d) ds_scorer.emplace(domain, cfg.domain_view, *ra_d);
    if (ra_f) fs_scorer.emplace(function, cfg.function_view, *ra_f);
    for (const auto& t : vocab) {
        double ds = 0.0, fs = 0.0;
        if (ds_scorer) {
            auto rt = domain.row_of(t);
            if (rt) ds = ds_scorer->score_row(*rt);
        }
        if (fs_scorer) {
            auto rt = function.row_of(t);
            if (rt) fs = fs_scorer->score_row(*rt);
        }
        modifiers.push_back({t, nn(ds) * handed_sum(ppmi, a, t)});
        heads.push_back({t, nn(fs) * handed_sum(ppmi, a, t)});
    }
    sort_ranked(modifiers);
    truncate(modifiers, cfg.max_modifiers);
    sort_ranked(heads);
    truncate(heads, cfg.max_heads);

    // Stage 2: joint score over the cross product.
    RankedList out;
    out.target = a;
    out.items.reserve(modifiers.size() * heads.size());
    for (const auto& m : modifiers) {
        for (const auto& h : heads) {
            double s = m.score * h.score *
                       lbf(stats, m.candidate, h.candidate) *
                       ppmi_lookup(ppmi, m.candidate, h.candidate, Hand::right);
            out.items.push_back({Term::make_bigram(m.candidate.surface, h.candidate.surface), s});
        }
    }
    sort_ranked(out.items);
    truncate(out.items, cfg.max_bigrams);
    return out;
}

RankedList filter_candidates(const RankedList& list, const std::unordered_set<Term>& allowed) {
    RankedList out;
    out.target = list.target;
    for (const auto& item : list.items)
        if (allowed.count(item.candidate)) out.items.push_back(item);
    return out;
}

void RankedList::save(const std::filesystem::path& path, const std::string& config_hash,
                      std::uint64_t seed) const {
    std::ostringstream os;
    os << io::header_line({"pool", 1, config_hash, seed}) << "\n";
    os << "target\t" << target.surface << "\n";
    for (std::size_t i = 0; i < items.size(); ++i)
        os << (i + 1) << "\t" << items[i].candidate.surface << "\t" << io::fmt_full(items[i].score)
           << "\n";
    io::atomic_write(path, os.str());
}

namespace {

Term parse_pool_term(const std::string& s) {
    auto sp = s.find(' ');
    if (sp != std::string::npos) return Term::make_bigram(s.substr(0, sp), s.substr(sp + 1));
    auto us = s.find('_');
    if (us != std::string::npos && us > 0 && us + 1 < s.size())
        return Term::make_pseudo(s.substr(0, us), s.substr(us + 1));
    return Term::make_unigram(s);
}

}  // namespace

RankedList RankedList::load(const std::filesystem::path& path) {
    auto is = io::open_input(path, "pool file");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty pool file: " + path.string());
    io::parse_header_line(line, "pool");
    if (!std::getline(is, line)) throw std::runtime_error("pool missing target line");
    auto meta = io::split(line, '\t');
    if (meta.size() != 2 || meta[0] != "target")
        throw std::runtime_error("bad pool target line: " + line);
    RankedList out;
    out.target = parse_pool_term(meta[1]);
    std::size_t expect_rank = 1;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto parts = io::split(line, '\t');
        if (parts.size() != 3) throw std::runtime_error("bad pool line: " + line);
        if (std::stoull(parts[0]) != expect_rank)
            throw std::runtime_error("pool ranks not consecutive at: " + line);
        ++expect_rank;
        out.items.push_back({parse_pool_term(parts[1]), io::parse_double(parts[2])});
    }
    return out;
}

}  // namespace compgen
