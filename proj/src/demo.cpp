#include <algorithm>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "compgen/io.hpp"
#include "compgen/lexicon.hpp"
#include "compgen/pipeline.hpp"
#include "compgen/rng.hpp"

namespace compgen {
namespace fs = std::filesystem;

namespace {

std::string numbered(const char* stem, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%02zu", stem, i);
    return buf;
}

// One synonym group: a planted bigram "mod head", a unigram synonym "syn",
// and the nouns/verbs that give syn the same domain row as mod and the same
// function row as head.
struct Group {
    std::string topic, theme, mod, head, syn, verb, vact;
};

}  // namespace

PipelineConfig write_demo_input(const fs::path& workdir, std::uint64_t seed) {
    constexpr std::size_t n_groups = 24;
    constexpr std::size_t alpha = 120;  // strong contexts shared by mod/syn and head/syn
    constexpr std::size_t gamma = 90;   // secondary contexts, also the bigram's frequency
    constexpr std::size_t delta = 60;   // syn-mod / head-syn adjacency for decomposition

    std::vector<Group> groups;
    for (std::size_t i = 0; i < n_groups; ++i)
        groups.push_back({numbered("topic", i), numbered("theme", i), numbered("mod", i),
                          numbered("head", i), numbered("syn", i), numbered("verb", i),
                          numbered("vact", i)});

    std::vector<std::string> fillers, fill_nouns, fill_verbs;
    for (std::size_t i = 0; i < 20; ++i) fillers.push_back(numbered("fill", i));
    for (std::size_t i = 0; i < 8; ++i) fill_nouns.push_back(numbered("fnoun", i));
    for (std::size_t i = 0; i < 6; ++i) fill_verbs.push_back(numbered("fverb", i));

    std::vector<std::string> docs;
    auto emit = [&](std::size_t n, const std::string& doc) {
        for (std::size_t i = 0; i < n; ++i) docs.push_back(doc);
    };
    for (const Group& g : groups) {
        // mod and syn share the domain contexts {topic, theme} with equal
        // counts; head and syn share the function contexts {verb, vact}.
        emit(alpha, g.topic + " " + g.mod);
        emit(alpha, g.topic + " " + g.syn);
        emit(gamma, g.theme + " " + g.syn);
        emit(alpha, g.head + " " + g.verb);
        emit(alpha, g.syn + " " + g.verb);
        emit(gamma, g.syn + " " + g.vact);
        // The bigram itself, with its own noun and verb context.
        emit(gamma, g.theme + " " + g.mod + " " + g.head + " " + g.vact);
        // Adjacency evidence for the decomposition stages.
        emit(delta, g.syn + " " + g.mod);
        emit(delta, g.head + " " + g.syn);
    }
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < 13500; ++i) {
        const std::string& fn = fill_nouns[uniform_below(rng, fill_nouns.size())];
        const std::string& fa = fillers[uniform_below(rng, fillers.size())];
        const std::string& fb = fillers[uniform_below(rng, fillers.size())];
        const std::string& fv = fill_verbs[uniform_below(rng, fill_verbs.size())];
        docs.push_back(fn + " " + fa + " " + fb + " " + fv);
    }
    for (std::size_t i = docs.size(); i > 1; --i)
        std::swap(docs[i - 1], docs[uniform_below(rng, i)]);

    fs::path input = workdir / "input";
    fs::create_directories(input);
    std::string corpus;
    for (const std::string& d : docs) corpus += d + "\n\n";
    io::atomic_write(input / "corpus.txt", corpus);

    Lexicon lex;
    auto add_words = [&](const std::vector<std::string>& ws) {
        for (const auto& w : ws) lex.unigrams.insert(w);
    };
    add_words(fillers);
    add_words(fill_nouns);
    add_words(fill_verbs);
    for (const auto& n : fill_nouns) lex.nouns.insert(n);
    for (const auto& v : fill_verbs) lex.verbs.insert(v);
    std::string stems, targets;
    for (std::size_t i = 0; i < n_groups; ++i) {
        const Group& g = groups[i];
        add_words({g.topic, g.theme, g.mod, g.head, g.syn, g.verb, g.vact});
        lex.nouns.insert(g.topic);
        lex.nouns.insert(g.theme);
        lex.verbs.insert(g.verb);
        lex.verbs.insert(g.vact);
        Term bigram = Term::make_bigram(g.mod, g.head);
        lex.bigrams[bigram.surface] = bigram;
        lex.synsets[numbered("g", i)] = {Term::make_unigram(g.syn), bigram};
        lex.glosses[bigram.surface] = {"a " + g.mod + " " + g.head + " also called " + g.syn};
        const char* split = i % 2 == 0 ? "train" : "test";
        stems += bigram.surface + "\t" + split + "\n";
        targets += g.syn + "\t" + split + "\n";
    }
    lex.save(input / "lexicon.tsv");
    io::atomic_write(input / "stems.tsv", stems);
    io::atomic_write(input / "decomp_targets.tsv", targets);

    PipelineConfig cfg;
    cfg.corpus = {input / "corpus.txt"};
    cfg.lexicon = input / "lexicon.tsv";
    cfg.workdir = workdir;
    cfg.seed = seed;
    cfg.stems_file = input / "stems.tsv";
    cfg.decomp_targets_file = input / "decomp_targets.tsv";
    cfg.holistic_train = n_groups / 2;
    cfg.holistic_test = n_groups / 2;

    // The saved config carries paths relative to its own directory, so the
    // whole demo tree is relocatable and byte-identical wherever it is built.
    PipelineConfig disk = cfg;
    disk.corpus = {fs::path("corpus.txt")};
    disk.lexicon = "lexicon.tsv";
    disk.stems_file = fs::path("stems.tsv");
    disk.decomp_targets_file = fs::path("decomp_targets.tsv");
    disk.workdir = "..";
    disk.save_json(input / "config.json");
    return cfg;
}

DemoOutcome run_demo(const fs::path& workdir, std::uint64_t seed) {
    DemoOutcome out;
    out.config = write_demo_input(workdir, seed);
    run_pipeline(out.config, all_stages());

    Dataset ds = Dataset::load(out.config.dataset_file("comp_standard"));
    for (std::size_t i = 0; i < ds.entries.size(); ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04zu", i);
        RankedList pool = RankedList::load(out.config.pool_dir("pools", "comp_standard") /
                                           (std::string(buf) + ".tsv"));
        ++out.planted_groups;
        const auto& sols = ds.entries[i].solutions;
        if (!pool.items.empty() &&
            std::find(sols.begin(), sols.end(), pool.items.front().candidate) != sols.end())
            ++out.planted_top1;
    }
    return out;
}

}  // namespace compgen
