#include "compgen/cooccur.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "compgen/io.hpp"
#include "compgen/lexicon.hpp"
#include "compgen/rng.hpp"

namespace compgen {

const char* context_mode_name(ContextMode m) {
    switch (m) {
        case ContextMode::handed_unigram: return "handed_unigram";
        case ContextMode::nearest_noun: return "nearest_noun";
        case ContextMode::verb_pattern: return "verb_pattern";
    }
    return "?";
}

const char* weighting_name(Weighting w) {
    switch (w) {
        case Weighting::counts: return "counts";
        case Weighting::ppmi_raw: return "ppmi_raw";
        case Weighting::ppmi_normalized: return "ppmi_normalized";
    }
    return "?";
}

ContextMode parse_context_mode(const std::string& s) {
    if (s == "handed_unigram" || s == "handed") return ContextMode::handed_unigram;
    if (s == "nearest_noun" || s == "noun") return ContextMode::nearest_noun;
    if (s == "verb_pattern" || s == "verb") return ContextMode::verb_pattern;
    throw std::invalid_argument("unknown context mode: " + s);
}

std::optional<std::size_t> SparseCooccurrence::row_of(const Term& t) const {
    auto it = row_ids.find(t.row_key());
    if (it == row_ids.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> SparseCooccurrence::col_of(const std::string& key) const {
    auto it = col_ids.find(key);
    if (it == col_ids.end()) return std::nullopt;
    return it->second;
}

double SparseCooccurrence::at(std::size_t row, std::size_t col) const {
    auto lo = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[row]);
    auto hi = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[row + 1]);
    auto it = std::lower_bound(lo, hi, col);
    if (it == hi || *it != col) return 0.0;
    return vals[static_cast<std::size_t>(it - cols.begin())];
}

CooccurrenceBuilder::CooccurrenceBuilder(ContextMode mode, std::vector<std::string> row_names)
    : mode_(mode), row_names_(std::move(row_names)), cells_(row_names_.size()) {}

void CooccurrenceBuilder::add(std::size_t row, const std::string& col_key, double amount) {
    auto [it, inserted] = col_ids_.try_emplace(col_key, col_names_.size());
    if (inserted) col_names_.push_back(col_key);
    cells_[row][it->second] += amount;
}

SparseCooccurrence CooccurrenceBuilder::finish() {
    SparseCooccurrence m;
    m.mode = mode_;
    m.weighting = Weighting::counts;
    m.row_names = std::move(row_names_);
    // Column order must not depend on first-seen order, which sampling can
    // perturb: sort columns by name and renumber.
    std::vector<std::size_t> order(col_names_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return col_names_[a] < col_names_[b]; });
    std::vector<std::size_t> new_id(col_names_.size());
    m.col_names.resize(col_names_.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        new_id[order[rank]] = rank;
        m.col_names[rank] = col_names_[order[rank]];
    }
    for (std::size_t i = 0; i < m.row_names.size(); ++i) m.row_ids[m.row_names[i]] = i;
    for (std::size_t j = 0; j < m.col_names.size(); ++j) m.col_ids[m.col_names[j]] = j;

    m.row_ptr.assign(m.row_names.size() + 1, 0);
    std::vector<std::pair<std::size_t, double>> row_cells;
    for (std::size_t r = 0; r < cells_.size(); ++r) {
        row_cells.clear();
        for (const auto& [c, v] : cells_[r])
            if (v != 0.0) row_cells.emplace_back(new_id[c], v);
        std::sort(row_cells.begin(), row_cells.end());
        for (const auto& [c, v] : row_cells) {
            m.cols.push_back(c);
            m.vals.push_back(v);
        }
        m.row_ptr[r + 1] = m.cols.size();
    }
    return m;
}

namespace {

// One located occurrence of a row term inside a document: token index range
// [begin, end) and the flat token list of the document plus sentence spans.
struct FlatDoc {
    std::vector<const std::string*> toks;
    std::vector<std::size_t> sentence_of;  // per token
    std::vector<std::pair<std::size_t, std::size_t>> sentence_span;
};

FlatDoc flatten(const Document& doc) {
    FlatDoc f;
    for (std::size_t s = 0; s < doc.size(); ++s) {
        std::size_t begin = f.toks.size();
        for (const auto& t : doc[s]) {
            f.toks.push_back(&t);
            f.sentence_of.push_back(s);
        }
        f.sentence_span.emplace_back(begin, f.toks.size());
    }
    return f;
}

// Context keys contributed by one occurrence (at most two for handed mode).
using ContextKeys = std::vector<std::string>;

ContextKeys handed_contexts(const FlatDoc& d, std::size_t begin, std::size_t end,
                            const Lexicon& lex) {
    ContextKeys out;
    for (std::size_t i = begin; i-- > 0;) {
        if (lex.has_unigram(*d.toks[i])) {
            out.push_back(std::string("left:") + *d.toks[i]);
            break;
        }
    }
    for (std::size_t i = end; i < d.toks.size(); ++i) {
        if (lex.has_unigram(*d.toks[i])) {
            out.push_back(std::string("right:") + *d.toks[i]);
            break;
        }
    }
    return out;
}

// Closest member of `allowed` on either side within the sentence; ties go
// left. Returns (index, distance) or nullopt.
template <typename Pred>
std::optional<std::pair<std::size_t, std::size_t>> closest_in_sentence(
    const FlatDoc& d, std::size_t begin, std::size_t end, Pred allowed) {
    std::size_t sb = d.sentence_span[d.sentence_of[begin]].first;
    std::size_t se = d.sentence_span[d.sentence_of[end - 1]].second;
    std::optional<std::pair<std::size_t, std::size_t>> left, right;
    for (std::size_t i = begin; i-- > sb;) {
        if (allowed(*d.toks[i])) {
            left = {{i, begin - i}};
            break;
        }
    }
    for (std::size_t i = end; i < se; ++i) {
        if (allowed(*d.toks[i])) {
            right = {{i, i - (end - 1)}};
            break;
        }
    }
    if (left && right) return left->second <= right->second ? left : right;
    return left ? left : right;
}

ContextKeys noun_contexts(const FlatDoc& d, std::size_t begin, std::size_t end,
                          const Lexicon& lex) {
    auto hit = closest_in_sentence(d, begin, end,
                                   [&](const std::string& w) { return lex.nouns.count(w) > 0; });
    if (!hit) return {};
    return {*d.toks[hit->first]};
}

ContextKeys verb_contexts(const FlatDoc& d, std::size_t begin, std::size_t end,
                          const Lexicon& lex) {
    auto hit = closest_in_sentence(d, begin, end,
                                   [&](const std::string& w) { return lex.verbs.count(w) > 0; });
    if (!hit) return {};
    std::size_t dist = std::min<std::size_t>(hit->second, 4);
    const char* side = hit->first < begin ? "left" : "right";
    return {std::string(side) + ":" + std::to_string(dist) + ":" + *d.toks[hit->first]};
}

ContextKeys contexts_for(ContextMode mode, const FlatDoc& d, std::size_t begin, std::size_t end,
                         const Lexicon& lex) {
    switch (mode) {
        case ContextMode::handed_unigram: return handed_contexts(d, begin, end, lex);
        case ContextMode::nearest_noun: return noun_contexts(d, begin, end, lex);
        case ContextMode::verb_pattern: return verb_contexts(d, begin, end, lex);
    }
    return {};
}

}  // namespace

SparseCooccurrence extract_contexts(const std::vector<Document>& docs, const Lexicon& lexicon,
                                    ContextMode mode, std::optional<std::size_t> sample_cap,
                                    std::uint64_t seed) {
    // Fixed row universe: sorted unigrams, then sorted bigram keys.
    std::vector<std::string> rows(lexicon.unigrams.begin(), lexicon.unigrams.end());
    std::sort(rows.begin(), rows.end());
    std::size_t n_unigrams = rows.size();
    {
        std::vector<std::string> bg;
        bg.reserve(lexicon.bigrams.size());
        for (const auto& [k, b] : lexicon.bigrams) bg.push_back(k);
        std::sort(bg.begin(), bg.end());
        rows.insert(rows.end(), bg.begin(), bg.end());
    }
    std::unordered_map<std::string, std::size_t> row_ids;
    for (std::size_t i = 0; i < rows.size(); ++i) row_ids[rows[i]] = i;

    CooccurrenceBuilder builder(mode, rows);

    std::mt19937_64 rng(seed);
    std::vector<Reservoir<ContextKeys>> reservoirs;
    if (sample_cap) reservoirs.assign(rows.size(), Reservoir<ContextKeys>(*sample_cap, rng));

    auto emit = [&](std::size_t row, ContextKeys keys) {
        if (keys.empty()) return;
        if (sample_cap) {
            reservoirs[row].offer(std::move(keys));
        } else {
            for (const auto& k : keys) builder.add(row, k);
        }
    };

    for (const auto& doc : docs) {
        FlatDoc d = flatten(doc);
        for (std::size_t i = 0; i < d.toks.size(); ++i) {
            auto it = row_ids.find(*d.toks[i]);
            if (it != row_ids.end() && it->second < n_unigrams)
                emit(it->second, contexts_for(mode, d, i, i + 1, lexicon));
            if (i + 1 < d.toks.size()) {
                auto bit = row_ids.find(*d.toks[i] + " " + *d.toks[i + 1]);
                if (bit != row_ids.end())
                    emit(bit->second, contexts_for(mode, d, i, i + 2, lexicon));
            }
        }
    }

    if (sample_cap) {
        for (std::size_t r = 0; r < reservoirs.size(); ++r)
            for (const auto& keys : reservoirs[r].items())
                for (const auto& k : keys) builder.add(r, k);
    }
    return builder.finish();
}

SparseCooccurrence to_ppmi(const SparseCooccurrence& counts, bool normalized) {
    if (counts.weighting != Weighting::counts)
        throw std::invalid_argument("to_ppmi: input must be a count matrix");
    SparseCooccurrence m;
    m.mode = counts.mode;
    m.weighting = normalized ? Weighting::ppmi_normalized : Weighting::ppmi_raw;
    m.row_names = counts.row_names;
    m.col_names = counts.col_names;
    m.row_ids = counts.row_ids;
    m.col_ids = counts.col_ids;
    m.row_ptr.assign(counts.n_rows() + 1, 0);

    // Marginals in integer arithmetic; counts are integral by construction.
    std::vector<std::uint64_t> row_sum(counts.n_rows(), 0), col_sum(counts.n_cols(), 0);
    std::uint64_t total = 0;
    for (std::size_t r = 0; r < counts.n_rows(); ++r) {
        for (std::size_t i = counts.row_ptr[r]; i < counts.row_ptr[r + 1]; ++i) {
            auto v = static_cast<std::uint64_t>(counts.vals[i]);
            row_sum[r] += v;
            col_sum[counts.cols[i]] += v;
            total += v;
        }
    }
    for (std::size_t r = 0; r < counts.n_rows(); ++r) {
        for (std::size_t i = counts.row_ptr[r]; i < counts.row_ptr[r + 1]; ++i) {
            double n = counts.vals[i];
            double expect = static_cast<double>(row_sum[r]) *
                            static_cast<double>(col_sum[counts.cols[i]]);
            double joint = n * static_cast<double>(total);
            // p(a,c) > p(a) p(c)  <=>  n * N > row_sum * col_sum
            if (joint <= expect) continue;
            double v = normalized ? 2.0 / (1.0 + expect / joint) - 1.0 : std::log(joint / expect);
            if (v <= 0.0) continue;
            m.cols.push_back(counts.cols[i]);
            m.vals.push_back(v);
        }
        m.row_ptr[r + 1] = m.cols.size();
    }
    return m;
}

double ppmi_lookup(const SparseCooccurrence& m, const Term& a, const Term& b, Hand h) {
    if (m.mode != ContextMode::handed_unigram || m.weighting != Weighting::ppmi_normalized)
        throw std::invalid_argument("ppmi_lookup: matrix must be normalized handed PPMI");
    if (b.is_pair()) {
        if (a.is_pair())
            throw std::invalid_argument("ppmi_lookup: both terms are modifier-head pairs");
        return ppmi_lookup(m, b, a, opposite(h));
    }
    auto row = m.row_of(a);
    if (!row) return 0.0;
    auto col = m.col_of(std::string(hand_name(h)) + ":" + b.surface);
    if (!col) return 0.0;
    return m.at(*row, *col);
}

void SparseCooccurrence::save(const std::filesystem::path& path, const std::string& config_hash,
                              std::uint64_t seed) const {
    std::ostringstream os;
    os << io::header_line({"matrix", 1, config_hash, seed}) << "\n";
    os << "mode\t" << context_mode_name(mode) << "\n";
    os << "weighting\t" << weighting_name(weighting) << "\n";
    os << "rows\t" << n_rows() << "\ncols\t" << n_cols() << "\nnnz\t" << nnz() << "\n";
    for (const auto& r : row_names) os << "R\t" << r << "\n";
    for (const auto& c : col_names) os << "C\t" << c << "\n";
    for (std::size_t r = 0; r < n_rows(); ++r)
        for (std::size_t i = row_ptr[r]; i < row_ptr[r + 1]; ++i)
            os << "E\t" << r << "\t" << cols[i] << "\t" << io::fmt_full(vals[i]) << "\n";
    io::atomic_write(path, os.str());
}

SparseCooccurrence SparseCooccurrence::load(const std::filesystem::path& path) {
    auto is = io::open_input(path, "matrix file");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty matrix file: " + path.string());
    io::parse_header_line(line, "matrix");
    SparseCooccurrence m;
    std::size_t n_rows = 0, n_cols = 0, nnz = 0;
    auto expect_kv = [&](const char* key) {
        if (!std::getline(is, line)) throw std::runtime_error("truncated matrix file");
        auto parts = io::split(line, '\t');
        if (parts.size() != 2 || parts[0] != key)
            throw std::runtime_error(std::string("expected ") + key + " line, got: " + line);
        return parts[1];
    };
    m.mode = parse_context_mode(expect_kv("mode"));
    std::string w = expect_kv("weighting");
    if (w == "counts")
        m.weighting = Weighting::counts;
    else if (w == "ppmi_raw")
        m.weighting = Weighting::ppmi_raw;
    else if (w == "ppmi_normalized")
        m.weighting = Weighting::ppmi_normalized;
    else
        throw std::runtime_error("bad weighting: " + w);
    n_rows = std::stoull(expect_kv("rows"));
    n_cols = std::stoull(expect_kv("cols"));
    nnz = std::stoull(expect_kv("nnz"));

    m.row_names.reserve(n_rows);
    m.col_names.reserve(n_cols);
    std::size_t last_row = 0;
    m.row_ptr.assign(n_rows + 1, 0);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto parts = io::split(line, '\t');
        if (parts[0] == "R" && parts.size() == 2) {
            m.row_names.push_back(parts[1]);
        } else if (parts[0] == "C" && parts.size() == 2) {
            m.col_names.push_back(parts[1]);
        } else if (parts[0] == "E" && parts.size() == 4) {
            std::size_t r = std::stoull(parts[1]);
            if (r + 1 >= m.row_ptr.size()) throw std::runtime_error("row id out of range: " + line);
            if (r < last_row) throw std::runtime_error("matrix triplets out of order: " + line);
            last_row = r;
            m.cols.push_back(std::stoull(parts[2]));
            m.vals.push_back(io::parse_double(parts[3]));
            m.row_ptr[r + 1] = m.cols.size();
        } else {
            throw std::runtime_error("bad matrix line: " + line);
        }
    }
    if (m.row_names.size() != n_rows || m.col_names.size() != n_cols || m.vals.size() != nnz)
        throw std::runtime_error("matrix file counts do not match contents: " + path.string());
    for (std::size_t r = 1; r <= n_rows; ++r) m.row_ptr[r] = std::max(m.row_ptr[r], m.row_ptr[r - 1]);
    for (std::size_t i = 0; i < m.row_names.size(); ++i) m.row_ids[m.row_names[i]] = i;
    for (std::size_t j = 0; j < m.col_names.size(); ++j) m.col_ids[m.col_names[j]] = j;
    return m;
}

}  // namespace compgen
