#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "compgen/corpus.hpp"
#include "compgen/lexicon.hpp"

using namespace compgen;
namespace fs = std::filesystem;

TEST_CASE("tokenizer lowercases, splits sentences, and ends documents at blank lines") {
    auto docs = tokenize_documents("The red salmon swam. Red salmon! A fish?\n\n"
                                   "don't stop o'clock 'quoted' end-of-line\n");
    REQUIRE(docs.size() == 2);
    REQUIRE(docs[0].size() == 3);
    CHECK(docs[0][0] == Sentence{"the", "red", "salmon", "swam"});
    CHECK(docs[0][1] == Sentence{"red", "salmon"});
    CHECK(docs[0][2] == Sentence{"a", "fish"});
    REQUIRE(docs[1].size() == 1);
    CHECK(docs[1][0] == Sentence{"don't", "stop", "o'clock", "quoted", "end", "of", "line"});
}

TEST_CASE("tokenizer keeps UTF-8 bytes and drops stray apostrophes") {
    auto docs = tokenize_documents("caf\xc3\xa9 rock 'n' roll");
    REQUIRE(docs.size() == 1);
    CHECK(docs[0][0] == Sentence{"caf\xc3\xa9", "rock", "n", "roll"});
}

TEST_CASE("tokenizer treats newlines inside a paragraph as plain whitespace") {
    auto docs = tokenize_documents("one two\nthree four\n\nfive");
    REQUIRE(docs.size() == 2);
    CHECK(docs[0][0] == Sentence{"one", "two", "three", "four"});
    CHECK(docs[1][0] == Sentence{"five"});
    // Whitespace-only lines still separate documents; numbers split on '.'.
    auto more = tokenize_documents("a 3.5 b\n \t\nc");
    REQUIRE(more.size() == 2);
    REQUIRE(more[0].size() == 2);
    CHECK(more[0][0] == Sentence{"a", "3"});
    CHECK(more[0][1] == Sentence{"5", "b"});
}

TEST_CASE("tokenize_flat flattens sentence and document structure") {
    CHECK(tokenize_flat("A b. C\n\nd") == std::vector<std::string>{"a", "b", "c", "d"});
}

namespace {

Lexicon fish_lexicon() {
    Lexicon lex;
    lex.unigrams = {"red", "salmon", "swam", "the", "fish"};
    Term b = Term::make_bigram("red", "salmon");
    lex.bigrams[b.surface] = b;
    return lex;
}

const char* kFishText = "The red salmon swam. Red salmon! A fish?\n\n"
                        "don't stop o'clock 'quoted' end-of-line\n";

}  // namespace

TEST_CASE("n-gram counts match a hand count") {
    Lexicon lex = fish_lexicon();
    CorpusStats s = count_ngrams(tokenize_documents(kFishText), lex);

    CHECK(s.total_tokens == 15);  // 8 in the fish document, 7 in the other

    CHECK(s.uf.at("red") == 2);
    CHECK(s.uf.at("salmon") == 2);
    CHECK(s.uf.at("the") == 1);
    CHECK(s.uf.at("swam") == 1);
    CHECK(s.uf.at("fish") == 1);
    CHECK(s.uf.count("a") == 0);  // not in the lexicon
    CHECK(s.uf.size() == 5);

    // Adjacency crosses the sentence boundary (swam . red) but pairs with
    // non-lexicon tokens are not counted.
    CHECK(s.bf.at("the red") == 1);
    CHECK(s.bf.at("red salmon") == 2);
    CHECK(s.bf.at("salmon swam") == 1);
    CHECK(s.bf.at("swam red") == 1);
    CHECK(s.bf.size() == 4);

    // Triples anchored on the lexicon bigram at either end.
    CHECK(s.tf.at("the red salmon") == 1);
    CHECK(s.tf.at("red salmon swam") == 1);
    CHECK(s.tf.at("swam red salmon") == 1);
    CHECK(s.tf.at("red salmon a") == 1);  // third token need not be in the lexicon
    CHECK(s.tf.size() == 4);
}

TEST_CASE("adjacency never crosses a document boundary") {
    Lexicon lex = fish_lexicon();
    CorpusStats s = count_ngrams(tokenize_documents("red\n\nsalmon"), lex);
    CHECK(s.uf.at("red") == 1);
    CHECK(s.uf.at("salmon") == 1);
    CHECK(s.bf.empty());
}

TEST_CASE("pair frequency lookups treat bigram and pseudo-unigram alike") {
    Lexicon lex = fish_lexicon();
    CorpusStats s = count_ngrams(tokenize_documents(kFishText), lex);
    CHECK(s.uf_of(Term::make_unigram("red")) == 2);
    CHECK(s.uf_of(Term::make_bigram("red", "salmon")) == 2);
    CHECK(s.uf_of(Term::make_pseudo("red", "salmon")) == 2);
    CHECK(s.uf_of(Term::make_bigram("swam", "fish")) == 0);
}

TEST_CASE("log frequency features") {
    Lexicon lex = fish_lexicon();
    CorpusStats s = count_ngrams(tokenize_documents(kFishText), lex);
    Term red = Term::make_unigram("red");
    Term salmon = Term::make_unigram("salmon");
    Term the = Term::make_unigram("the");
    Term swam = Term::make_unigram("swam");
    Term pair = Term::make_bigram("red", "salmon");

    CHECK(luf(s, red) == std::log(3.0));
    CHECK(luf(s, pair) == std::log(3.0));
    CHECK(luf(s, Term::make_unigram("ghost")) == 0.0);

    CHECK(lbf(s, red, salmon) == std::log(3.0));       // plain adjacency
    CHECK(lbf(s, the, pair) == std::log(2.0));         // the . (red salmon)
    CHECK(lbf(s, pair, swam) == std::log(2.0));        // (red salmon) . swam
    CHECK(lbf(s, pair.as_pseudo(), swam) == std::log(2.0));
    CHECK(lbf(s, swam, pair) == std::log(2.0));        // swam . (red salmon)
    CHECK(lbf(s, Term::make_unigram("fish"), pair) == 0.0);  // unattested order
    CHECK_THROWS(lbf(s, pair, pair));
}

TEST_CASE("stats save/load round-trips") {
    Lexicon lex = fish_lexicon();
    CorpusStats s = count_ngrams(tokenize_documents(kFishText), lex);
    fs::path f = fs::temp_directory_path() / "compgen_stats_roundtrip.tsv";
    s.save(f, "abc", 3);
    CorpusStats back = CorpusStats::load(f);
    CHECK(back.total_tokens == s.total_tokens);
    CHECK(back.uf == s.uf);
    CHECK(back.bf == s.bf);
    CHECK(back.tf == s.tf);
    fs::remove(f);
}
