#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "compgen/cooccur.hpp"
#include "compgen/corpus.hpp"
#include "compgen/io.hpp"
#include "compgen/lexicon.hpp"

using namespace compgen;
namespace fs = std::filesystem;

namespace {

Lexicon zoo_lexicon() {
    Lexicon lex;
    lex.unigrams = {"cat", "dog", "bird", "chased", "small", "the"};
    Term b = Term::make_bigram("small", "cat");
    lex.bigrams[b.surface] = b;
    lex.nouns = {"cat", "dog", "bird"};
    lex.verbs = {"chased"};
    return lex;
}

// "the small cat chased a dog. bird fled" — two sentences, one document.
std::vector<Document> zoo_docs() {
    Document d;
    d.push_back({"the", "small", "cat", "chased", "a", "dog"});
    d.push_back({"bird", "fled"});
    return {d};
}

double cell(const SparseCooccurrence& m, const std::string& row, const std::string& col) {
    auto r = m.row_ids.find(row);
    auto c = m.col_ids.find(col);
    if (r == m.row_ids.end() || c == m.col_ids.end()) return 0.0;
    return m.at(r->second, c->second);
}

}  // namespace

TEST_CASE("handed contexts take the nearest lexicon unigram on each side, document-wide") {
    auto m = extract_contexts(zoo_docs(), zoo_lexicon(), ContextMode::handed_unigram);
    CHECK(m.mode == ContextMode::handed_unigram);
    CHECK(m.weighting == Weighting::counts);
    // Rows: sorted unigrams then sorted bigram surfaces.
    CHECK(m.row_names == std::vector<std::string>{"bird", "cat", "chased", "dog", "small", "the",
                                                  "small cat"});
    // Columns sorted by key.
    CHECK(std::is_sorted(m.col_names.begin(), m.col_names.end()));
    CHECK(m.nnz() == 12);
    CHECK(cell(m, "the", "right:small") == 1);
    CHECK(cell(m, "small", "left:the") == 1);
    CHECK(cell(m, "small", "right:cat") == 1);
    CHECK(cell(m, "cat", "left:small") == 1);
    CHECK(cell(m, "cat", "right:chased") == 1);
    CHECK(cell(m, "chased", "left:cat") == 1);
    CHECK(cell(m, "chased", "right:dog") == 1);  // skips non-lexicon "a"
    CHECK(cell(m, "dog", "left:chased") == 1);
    CHECK(cell(m, "dog", "right:bird") == 1);  // neighbour scan crosses the sentence break
    CHECK(cell(m, "bird", "left:dog") == 1);
    // The bigram occurrence looks outward from both ends, never at its own parts.
    CHECK(cell(m, "small cat", "left:the") == 1);
    CHECK(cell(m, "small cat", "right:chased") == 1);
}

TEST_CASE("noun contexts take the closest noun within the sentence only") {
    auto m = extract_contexts(zoo_docs(), zoo_lexicon(), ContextMode::nearest_noun);
    CHECK(m.nnz() == 6);
    CHECK(m.col_names == std::vector<std::string>{"cat", "dog"});
    CHECK(cell(m, "the", "cat") == 1);
    CHECK(cell(m, "small", "cat") == 1);
    CHECK(cell(m, "cat", "dog") == 1);
    CHECK(cell(m, "chased", "cat") == 1);  // cat at distance 1 beats dog at 2
    CHECK(cell(m, "dog", "cat") == 1);     // bird is in the next sentence
    CHECK(cell(m, "small cat", "dog") == 1);
    // bird's sentence has no other noun, so its row is empty.
    CHECK(m.row_ptr[*m.row_of(Term::make_unigram("bird"))] ==
          m.row_ptr[*m.row_of(Term::make_unigram("bird")) + 1]);
}

TEST_CASE("equidistant nouns resolve to the left") {
    Document d;
    d.push_back({"dog", "chased", "cat"});
    auto m = extract_contexts({d}, zoo_lexicon(), ContextMode::nearest_noun);
    CHECK(cell(m, "chased", "dog") == 1);
    CHECK(cell(m, "chased", "cat") == 0);
}

TEST_CASE("verb contexts record side and capped distance") {
    auto m = extract_contexts(zoo_docs(), zoo_lexicon(), ContextMode::verb_pattern);
    CHECK(m.nnz() == 5);
    CHECK(cell(m, "the", "right:3:chased") == 1);
    CHECK(cell(m, "small", "right:2:chased") == 1);
    CHECK(cell(m, "cat", "right:1:chased") == 1);
    CHECK(cell(m, "dog", "left:2:chased") == 1);
    CHECK(cell(m, "small cat", "right:1:chased") == 1);  // distance from the head token

    Document far;
    far.push_back({"cat", "a", "a", "a", "a", "a", "chased"});
    auto f = extract_contexts({far}, zoo_lexicon(), ContextMode::verb_pattern);
    CHECK(cell(f, "cat", "right:4:chased") == 1);  // distance 6 capped at 4

    Document mid;
    mid.push_back({"cat", "a", "a", "chased"});
    auto g = extract_contexts({mid}, zoo_lexicon(), ContextMode::verb_pattern);
    CHECK(cell(g, "cat", "right:3:chased") == 1);
}

TEST_CASE("a bigram straddling a sentence break still sees both sentences") {
    Document d;
    d.push_back({"small"});
    d.push_back({"cat", "chased"});
    auto v = extract_contexts({d}, zoo_lexicon(), ContextMode::verb_pattern);
    CHECK(cell(v, "small cat", "right:1:chased") == 1);
    auto h = extract_contexts({d}, zoo_lexicon(), ContextMode::handed_unigram);
    CHECK(cell(h, "small cat", "right:chased") == 1);
}

TEST_CASE("occurrence sampling caps per-row contexts and keeps sides paired") {
    Lexicon lex;
    lex.unigrams = {"dog", "cat", "bird"};
    std::vector<Document> docs(50);
    for (auto& d : docs) d.push_back({"dog", "cat", "bird"});

    auto full = extract_contexts(docs, lex, ContextMode::handed_unigram);
    CHECK(cell(full, "cat", "left:dog") == 50);
    CHECK(cell(full, "cat", "right:bird") == 50);

    auto capped = extract_contexts(docs, lex, ContextMode::handed_unigram, 5, 7);
    CHECK(cell(capped, "cat", "left:dog") == 5);
    CHECK(cell(capped, "cat", "right:bird") == 5);
    CHECK(cell(capped, "dog", "right:cat") == 5);
    CHECK(cell(capped, "bird", "left:cat") == 5);

    auto again = extract_contexts(docs, lex, ContextMode::handed_unigram, 5, 7);
    CHECK(capped.vals == again.vals);
    CHECK(capped.cols == again.cols);

    // A cap above the number of occurrences changes nothing.
    auto loose = extract_contexts(docs, lex, ContextMode::handed_unigram, 1000, 7);
    CHECK(loose.vals == full.vals);
    CHECK(loose.cols == full.cols);
    CHECK(loose.col_names == full.col_names);
}

TEST_CASE("raw PPMI matches hand-computed values and drops non-positive cells") {
    CooccurrenceBuilder b(ContextMode::nearest_noun, {"a", "b"});
    b.add(0, "x", 4);
    b.add(0, "y", 1);
    b.add(1, "x", 1);
    b.add(1, "y", 2);
    auto counts = b.finish();
    auto raw = to_ppmi(counts, false);
    CHECK(raw.weighting == Weighting::ppmi_raw);
    CHECK(raw.mode == counts.mode);
    // N=8, rows a=5 b=3, cols x=5 y=3.
    CHECK(cell(raw, "a", "x") == doctest::Approx(std::log(32.0 / 25.0)).epsilon(1e-15));
    CHECK(cell(raw, "b", "y") == doctest::Approx(std::log(16.0 / 9.0)).epsilon(1e-15));
    CHECK(cell(raw, "a", "y") == 0.0);  // 8 <= 15: below independence
    CHECK(cell(raw, "b", "x") == 0.0);
    CHECK(raw.nnz() == 2);

    auto norm = to_ppmi(counts, true);
    CHECK(cell(norm, "a", "x") == doctest::Approx(7.0 / 57.0).epsilon(1e-15));
    CHECK(cell(norm, "b", "y") == doctest::Approx(7.0 / 25.0).epsilon(1e-15));
    CHECK(norm.nnz() == 2);

    CHECK_THROWS_AS(to_ppmi(raw, true), std::invalid_argument);
}

TEST_CASE("independent counts give exactly zero, not epsilon") {
    CooccurrenceBuilder b(ContextMode::nearest_noun, {"a"});
    b.add(0, "x", 2);
    b.add(0, "y", 2);
    auto counts = b.finish();
    // joint = 2*4 = 8 equals expected = 4*2 = 8 for both cells.
    CHECK(to_ppmi(counts, false).nnz() == 0);
    CHECK(to_ppmi(counts, true).nnz() == 0);
}

TEST_CASE("normalized PPMI equals the logistic transform of raw PPMI") {
    std::mt19937_64 rng(11);
    std::vector<std::string> rows;
    for (int r = 0; r < 8; ++r) rows.push_back("r" + std::to_string(r));
    CooccurrenceBuilder b(ContextMode::handed_unigram, rows);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 12; ++c) {
            auto n = rng() % 7;
            if (n) b.add(static_cast<std::size_t>(r), "c" + std::to_string(c),
                         static_cast<double>(n));
        }
    auto counts = b.finish();
    auto raw = to_ppmi(counts, false);
    auto norm = to_ppmi(counts, true);
    CHECK(raw.nnz() == norm.nnz());
    CHECK(raw.cols == norm.cols);
    for (std::size_t i = 0; i < raw.vals.size(); ++i)
        CHECK(norm.vals[i] == doctest::Approx(std::tanh(raw.vals[i] / 2.0)).epsilon(1e-14));

    // Raw values agree with the probability-ratio definition computed separately.
    std::vector<double> row_sum(counts.n_rows(), 0), col_sum(counts.n_cols(), 0);
    double total = 0;
    for (std::size_t r = 0; r < counts.n_rows(); ++r)
        for (std::size_t i = counts.row_ptr[r]; i < counts.row_ptr[r + 1]; ++i) {
            row_sum[r] += counts.vals[i];
            col_sum[counts.cols[i]] += counts.vals[i];
            total += counts.vals[i];
        }
    for (std::size_t r = 0; r < counts.n_rows(); ++r)
        for (std::size_t i = counts.row_ptr[r]; i < counts.row_ptr[r + 1]; ++i) {
            double p_joint = counts.vals[i] / total;
            double p_indep = (row_sum[r] / total) * (col_sum[counts.cols[i]] / total);
            double expect = p_joint > p_indep ? std::log(p_joint / p_indep) : 0.0;
            CHECK(raw.at(r, counts.cols[i]) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("handed PPMI lookup resolves hands, pairs, and misses") {
    auto counts = extract_contexts(zoo_docs(), zoo_lexicon(), ContextMode::handed_unigram);
    auto m = to_ppmi(counts, true);
    Term cat = Term::make_unigram("cat");
    Term small = Term::make_unigram("small");
    Term the = Term::make_unigram("the");
    Term pair = Term::make_bigram("small", "cat");

    // N=12; row cat sum 2, col left:small sum 1, n=1.
    CHECK(ppmi_lookup(m, cat, small, Hand::left) == doctest::Approx(5.0 / 7.0).epsilon(1e-15));
    CHECK(ppmi_lookup(m, small, cat, Hand::right) == doctest::Approx(5.0 / 7.0).epsilon(1e-15));

    // A pair in second position flips to first position with the opposite hand:
    // "the to the right of (small cat)" never occurs, but to its left it does.
    double direct = ppmi_lookup(m, pair, the, Hand::left);
    CHECK(direct == doctest::Approx(0.5).epsilon(1e-15));  // n=1, row 2, col 2, N=12
    CHECK(ppmi_lookup(m, the, pair, Hand::right) == direct);
    CHECK(ppmi_lookup(m, pair.as_pseudo(), the, Hand::left) == direct);
    CHECK(ppmi_lookup(m, the, pair, Hand::left) == ppmi_lookup(m, pair, the, Hand::right));

    CHECK(ppmi_lookup(m, cat, Term::make_unigram("zzz"), Hand::left) == 0.0);
    CHECK(ppmi_lookup(m, Term::make_unigram("zzz"), cat, Hand::left) == 0.0);
    CHECK_THROWS_AS(ppmi_lookup(m, pair, pair, Hand::left), std::invalid_argument);
    CHECK_THROWS_AS(ppmi_lookup(counts, cat, small, Hand::left), std::invalid_argument);
    auto nouns = to_ppmi(extract_contexts(zoo_docs(), zoo_lexicon(), ContextMode::nearest_noun),
                         true);
    CHECK_THROWS_AS(ppmi_lookup(nouns, cat, small, Hand::left), std::invalid_argument);
}

TEST_CASE("matrix save/load round-trips byte-for-byte") {
    auto counts = extract_contexts(zoo_docs(), zoo_lexicon(), ContextMode::verb_pattern);
    auto m = to_ppmi(counts, true);
    fs::path f1 = fs::temp_directory_path() / "compgen_matrix_rt1.tsv";
    fs::path f2 = fs::temp_directory_path() / "compgen_matrix_rt2.tsv";
    m.save(f1, "deadbeef", 42);
    auto back = SparseCooccurrence::load(f1);
    CHECK(back.mode == m.mode);
    CHECK(back.weighting == m.weighting);
    CHECK(back.row_names == m.row_names);
    CHECK(back.col_names == m.col_names);
    CHECK(back.row_ptr == m.row_ptr);
    CHECK(back.cols == m.cols);
    CHECK(back.vals == m.vals);
    back.save(f2, "deadbeef", 42);
    CHECK(io::read_file(f1) == io::read_file(f2));
    fs::remove(f1);
    fs::remove(f2);
}
