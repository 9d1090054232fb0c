#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "compgen/corpus.hpp"
#include "compgen/term.hpp"

namespace compgen {

struct Lexicon;

// Context definitions for the three co-occurrence matrices:
//   handed_unigram: nearest lexicon unigram on each side (stop words skipped),
//                   column key "left:word" / "right:word"
//   nearest_noun:   single closest lexicon noun on either side, same sentence,
//                   column key is the noun itself
//   verb_pattern:   single closest lexicon verb on either side, same sentence,
//                   column key "side:distance:verb" with distance capped at 4
enum class ContextMode : std::uint8_t { handed_unigram, nearest_noun, verb_pattern };

enum class Weighting : std::uint8_t { counts, ppmi_raw, ppmi_normalized };

const char* context_mode_name(ContextMode m);
const char* weighting_name(Weighting w);
ContextMode parse_context_mode(const std::string& s);

// Sparse row-major matrix over named rows (lexicon unigrams and bigrams) and
// named context columns. Cells hold counts or PPMI values; zeros are never
// stored. A pseudo-unigram resolves to its bigram's row.
struct SparseCooccurrence {
    ContextMode mode = ContextMode::handed_unigram;
    Weighting weighting = Weighting::counts;
    std::vector<std::string> row_names;
    std::vector<std::string> col_names;
    std::unordered_map<std::string, std::size_t> row_ids;
    std::unordered_map<std::string, std::size_t> col_ids;
    // CSR: row_ptr has row_names.size()+1 entries; cols ascending in each row.
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> cols;
    std::vector<double> vals;

    std::size_t n_rows() const { return row_names.size(); }
    std::size_t n_cols() const { return col_names.size(); }
    std::size_t nnz() const { return vals.size(); }

    std::optional<std::size_t> row_of(const Term& t) const;
    std::optional<std::size_t> col_of(const std::string& key) const;
    double at(std::size_t row, std::size_t col) const;

    void save(const std::filesystem::path& path, const std::string& config_hash = "0",
              std::uint64_t seed = 0) const;
    static SparseCooccurrence load(const std::filesystem::path& path);
};

// Builder that accumulates (row, column) increments and finalizes to CSR.
class CooccurrenceBuilder {
  public:
    CooccurrenceBuilder(ContextMode mode, std::vector<std::string> row_names);
    void add(std::size_t row, const std::string& col_key, double amount = 1.0);
    SparseCooccurrence finish();

  private:
    ContextMode mode_;
    std::vector<std::string> row_names_;
    std::vector<std::string> col_names_;
    std::unordered_map<std::string, std::size_t> col_ids_;
    std::vector<std::unordered_map<std::size_t, double>> cells_;
};

// Count context co-occurrences for every lexicon unigram and bigram (bigram
// occurrences are located by adjacency of their components). When sample_cap
// is set, at most that many occurrences per row term contribute, chosen by a
// seeded reservoir over the corpus stream.
SparseCooccurrence extract_contexts(const std::vector<Document>& docs, const Lexicon& lexicon,
                                    ContextMode mode,
                                    std::optional<std::size_t> sample_cap = std::nullopt,
                                    std::uint64_t seed = 0);

// PPMI over a count matrix. Raw cells are max(0, ln(p(a,c) / (p(a) p(c)))).
// Normalized cells squash the same quantity through the logistic map scaled
// to (-1, 1), computed in closed form:
//   2 / (1 + (p(a) p(c)) / p(a,c)) - 1   when p(a,c) > p(a) p(c), else 0.
SparseCooccurrence to_ppmi(const SparseCooccurrence& counts, bool normalized);

// Handed PPMI value of target a with context word b on side h. When b is a
// modifier-head pair the roles flip: the pair's row is probed with a as the
// context on the opposite side. Both arguments pairs is a contract violation.
double ppmi_lookup(const SparseCooccurrence& m, const Term& a, const Term& b, Hand h);

}  // namespace compgen
