#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "compgen/cooccur.hpp"
#include "compgen/corpus.hpp"
#include "compgen/generate.hpp"
#include "compgen/io.hpp"
#include "compgen/lexicon.hpp"
#include "compgen/spaces.hpp"

using namespace compgen;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    Lexicon lex;
    CorpusStats stats;
    SparseCooccurrence ppmi;
    FactorizedSpace domain;
    FactorizedSpace function;
    std::vector<Term> vocab;

    Fixture() {
        lex.unigrams = {"cat", "dog", "bird", "fish", "mouse", "chased", "ate",
                        "small", "big", "old", "the"};
        for (auto [m, h] : {std::pair{"small", "cat"}, {"big", "dog"}, {"old", "fish"}}) {
            Term b = Term::make_bigram(m, h);
            lex.bigrams[b.surface] = b;
        }
        lex.nouns = {"cat", "dog", "bird", "fish", "mouse"};
        lex.verbs = {"chased", "ate"};

        auto docs = tokenize_documents(
            "the small cat chased the bird. the big dog ate the fish. old fish ate mouse.\n\n"
            "small cat ate fish. big dog chased cat. bird chased small cat. mouse ate old fish\n\n"
            "the dog ate the small cat. big dog big dog chased bird. the old fish\n\n"
            "fish ate bird. the cat chased small cat. dog ate big dog. mouse chased mouse");
        stats = count_ngrams(docs, lex);
        ppmi = to_ppmi(extract_contexts(docs, lex, ContextMode::handed_unigram), true);
        domain = truncated_svd(to_ppmi(extract_contexts(docs, lex, ContextMode::nearest_noun),
                                       false),
                               8, 1e-12, 42, SpaceKind::domain);
        function = truncated_svd(to_ppmi(extract_contexts(docs, lex, ContextMode::verb_pattern),
                                         false),
                                 8, 1e-12, 42, SpaceKind::function);
        for (const auto& u : std::vector<std::string>{"cat", "dog", "bird", "fish", "mouse",
                                                      "chased", "ate", "small", "big", "old",
                                                      "the"})
            vocab.push_back(Term::make_unigram(u));
        std::sort(vocab.begin(), vocab.end());
    }

    GenConfig small_views() const {
        GenConfig cfg;
        cfg.domain_view = {4, 0.3};
        cfg.function_view = {3, 0.6};
        return cfg;
    }
};

}  // namespace

TEST_CASE("composition ranking equals scoring every candidate one at a time") {
    Fixture f;
    GenConfig cfg = f.small_views();
    Term ab = Term::make_bigram("small", "cat");
    RankedList got = comp(ab, f.vocab, f.domain, f.function, cfg);
    CHECK(got.target == ab);
    REQUIRE(got.items.size() == f.vocab.size());

    std::vector<RankedItem> want;
    for (const auto& c : f.vocab)
        want.push_back({c, comp_score(Term::make_unigram("small"), Term::make_unigram("cat"), c,
                                      f.domain, f.function, cfg)});
    sort_ranked(want);
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(got.items[i].candidate == want[i].candidate);
        CHECK(got.items[i].score == want[i].score);  // bitwise, not approximately
    }
    // Scores are geometric means of clamped similarities, so never negative.
    for (const auto& it : got.items) CHECK(it.score >= 0.0);
    CHECK(std::is_sorted(got.items.begin(), got.items.end(),
                         [](const RankedItem& x, const RankedItem& y) {
                             return x.score > y.score ||
                                    (x.score == y.score && x.candidate < y.candidate);
                         }));

    GenConfig narrow = cfg;
    narrow.max_unigrams = 3;
    RankedList top = comp(ab, f.vocab, f.domain, f.function, narrow);
    REQUIRE(top.items.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(top.items[i].candidate == got.items[i].candidate);
        CHECK(top.items[i].score == got.items[i].score);
    }
}

TEST_CASE("composition keeps zero-score padding and breaks ties by surface") {
    Fixture f;
    GenConfig cfg = f.small_views();
    Term ghost = Term::make_bigram("ghost", "wraith");  // parts unseen anywhere
    RankedList got = comp(ghost, f.vocab, f.domain, f.function, cfg);
    REQUIRE(got.items.size() == f.vocab.size());
    for (std::size_t i = 0; i < got.items.size(); ++i) {
        CHECK(got.items[i].score == 0.0);
        CHECK(got.items[i].candidate == f.vocab[i]);  // vocab is pre-sorted by surface
    }
    CHECK_THROWS_AS(comp(Term::make_unigram("cat"), f.vocab, f.domain, f.function, cfg),
                    std::invalid_argument);
}

TEST_CASE("full-width decomposition equals the exhaustive pair scan") {
    Fixture f;
    GenConfig cfg = f.small_views();
    cfg.max_modifiers = f.vocab.size();
    cfg.max_heads = f.vocab.size();
    cfg.max_bigrams = f.vocab.size() * f.vocab.size();

    for (const auto& target : {Term::make_unigram("cat"), Term::make_unigram("chased"),
                               Term::make_pseudo("old", "fish")}) {
        RankedList got = decomp(target, f.vocab, f.domain, f.function, f.ppmi, f.stats, cfg);
        REQUIRE(got.items.size() == f.vocab.size() * f.vocab.size());

        std::vector<RankedItem> want;
        for (const auto& b : f.vocab)
            for (const auto& c : f.vocab)
                want.push_back({Term::make_bigram(b.surface, c.surface),
                                decomp_bigram_score(target, b, c, f.domain, f.function, f.ppmi,
                                                    f.stats, cfg)});
        sort_ranked(want);
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got.items[i].candidate == want[i].candidate);
            CHECK(got.items[i].score == want[i].score);
        }
    }
}

TEST_CASE("decomposition stage widths truncate exactly like hand-built shortlists") {
    Fixture f;
    GenConfig cfg = f.small_views();
    cfg.max_modifiers = 3;
    cfg.max_heads = 2;
    cfg.max_bigrams = 5;
    Term a = Term::make_unigram("cat");

    std::vector<RankedItem> mods, heads;
    for (const auto& t : f.vocab) {
        double hs = ppmi_lookup(f.ppmi, a, t, Hand::left) + ppmi_lookup(f.ppmi, a, t, Hand::right);
        mods.push_back({t, nn(similarity(f.domain, cfg.domain_view, a, t)) * hs});
        heads.push_back({t, nn(similarity(f.function, cfg.function_view, a, t)) * hs});
    }
    sort_ranked(mods);
    mods.resize(3);
    sort_ranked(heads);
    heads.resize(2);
    std::vector<RankedItem> want;
    for (const auto& m : mods)
        for (const auto& h : heads)
            want.push_back({Term::make_bigram(m.candidate.surface, h.candidate.surface),
                            m.score * h.score * lbf(f.stats, m.candidate, h.candidate) *
                                ppmi_lookup(f.ppmi, m.candidate, h.candidate, Hand::right)});
    sort_ranked(want);
    want.resize(5);

    RankedList got = decomp(a, f.vocab, f.domain, f.function, f.ppmi, f.stats, cfg);
    REQUIRE(got.items.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(got.items[i].candidate == want[i].candidate);
        CHECK(got.items[i].score == want[i].score);
    }
}

TEST_CASE("per-pair decomposition scores factor as documented") {
    Fixture f;
    GenConfig cfg = f.small_views();
    Term a = Term::make_unigram("cat"), b = Term::make_unigram("small"),
         c = Term::make_unigram("cat");
    double sm = decomp_modifier_score(a, b, f.domain, f.ppmi, cfg);
    double sh = decomp_head_score(a, c, f.function, f.ppmi, cfg);
    double expect = sm * sh * lbf(f.stats, b, c) * ppmi_lookup(f.ppmi, b, c, Hand::right);
    CHECK(decomp_bigram_score(a, b, c, f.domain, f.function, f.ppmi, f.stats, cfg) == expect);
    CHECK(sm >= 0.0);
    CHECK(sh >= 0.0);
}

TEST_CASE("generator width configuration is validated") {
    GenConfig cfg;
    cfg.max_modifiers = 10;
    cfg.max_heads = 10;
    cfg.max_bigrams = 101;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.max_bigrams = 100;
    CHECK_NOTHROW(cfg.validate());
    cfg.max_unigrams = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("candidate filtering keeps order, scores, and target") {
    RankedList list;
    list.target = Term::make_unigram("x");
    list.items = {{Term::make_bigram("a", "b"), 3.0},
                  {Term::make_bigram("c", "d"), 2.0},
                  {Term::make_bigram("e", "f"), 1.0}};
    std::unordered_set<Term> allowed{Term::make_bigram("e", "f"), Term::make_bigram("a", "b")};
    RankedList kept = filter_candidates(list, allowed);
    CHECK(kept.target == list.target);
    REQUIRE(kept.items.size() == 2);
    CHECK(kept.items[0].candidate == Term::make_bigram("a", "b"));
    CHECK(kept.items[0].score == 3.0);
    CHECK(kept.items[1].candidate == Term::make_bigram("e", "f"));
    CHECK(kept.items[1].score == 1.0);
}

TEST_CASE("ranked list save/load round-trips all term kinds") {
    RankedList list;
    list.target = Term::make_pseudo("old", "fish");
    list.items = {{Term::make_bigram("old", "fish"), 0.75},
                  {Term::make_unigram("trout"), 0.5},
                  {Term::make_pseudo("big", "dog"), 0.0}};
    fs::path f1 = fs::temp_directory_path() / "compgen_pool_rt1.tsv";
    fs::path f2 = fs::temp_directory_path() / "compgen_pool_rt2.tsv";
    list.save(f1, "beef", 4);
    RankedList back = RankedList::load(f1);
    CHECK(back.target == list.target);
    REQUIRE(back.items.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.items[i].candidate == list.items[i].candidate);
        CHECK(back.items[i].score == list.items[i].score);
    }
    back.save(f2, "beef", 4);
    CHECK(io::read_file(f1) == io::read_file(f2));

    // Ranks must be consecutive from 1.
    std::string text = io::read_file(f1);
    auto pos = text.find("\n2\t");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 3, "\n9\t");
    io::atomic_write(f2, text);
    CHECK_THROWS(RankedList::load(f2));
    fs::remove(f1);
    fs::remove(f2);
}
