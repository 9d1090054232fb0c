// Command-line front end: one subcommand per pipeline stage, ad-hoc
// composition/decomposition queries, and a self-contained demo run.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "compgen/cooccur.hpp"
#include "compgen/corpus.hpp"
#include "compgen/generate.hpp"
#include "compgen/io.hpp"
#include "compgen/lexicon.hpp"
#include "compgen/pipeline.hpp"
#include "compgen/spaces.hpp"

namespace {

using namespace compgen;

PipelineConfig load_config(const std::string& path) {
    return PipelineConfig::from_json_file(path);
}

std::vector<Term> query_vocab(const Lexicon& lex, bool with_pseudo) {
    std::vector<std::string> surfaces(lex.unigrams.begin(), lex.unigrams.end());
    std::sort(surfaces.begin(), surfaces.end());
    std::vector<Term> vocab;
    for (const auto& s : surfaces) vocab.push_back(Term::make_unigram(s));
    if (with_pseudo) {
        surfaces.clear();
        for (const auto& [s, _] : lex.bigrams) surfaces.push_back(s);
        std::sort(surfaces.begin(), surfaces.end());
        for (const auto& s : surfaces) {
            auto words = io::split(s, ' ');
            vocab.push_back(Term::make_pseudo(words[0], words[1]));
        }
    }
    return vocab;
}

void print_top(const RankedList& list, std::size_t top) {
    for (std::size_t i = 0; i < list.items.size() && i < top; ++i)
        std::printf("%4zu  %-30s  %s\n", i + 1, list.items[i].candidate.surface.c_str(),
                    io::fmt_short(list.items[i].score).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributional composition and decomposition pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string target_str;
    std::string workdir;
    std::uint64_t seed = 42;
    std::size_t top = 20;
    bool with_pseudo = false;
    bool only_bigrams = false;
    std::vector<std::string> stage_names;

    auto add_stage_cmd = [&](const std::string& name, const std::string& desc) {
        CLI::App* c = app.add_subcommand(name, desc);
        c->add_option("-c,--config", config_path, "pipeline config (JSON)")->required();
        return c;
    };
    add_stage_cmd("ingest", "count corpus n-grams");
    add_stage_cmd("cooccur", "build co-occurrence and PPMI matrices");
    add_stage_cmd("svd", "factorize the domain, function and merged matrices");
    add_stage_cmd("dataset", "build the evaluation datasets");
    add_stage_cmd("generate", "rank candidate pools for every dataset target");
    add_stage_cmd("features", "dump training feature vectors");
    add_stage_cmd("train", "train the kernel rankers");
    add_stage_cmd("rerank", "re-rank test pools with the trained rankers");
    add_stage_cmd("baseline", "re-rank test pools with the unsupervised baselines");
    add_stage_cmd("eval", "score every system against the datasets");

    CLI::App* run = app.add_subcommand("run", "run pipeline stages in order");
    run->add_option("-c,--config", config_path, "pipeline config (JSON)")->required();
    run->add_option("-s,--stages", stage_names, "stages to run (default: all)");

    CLI::App* comp_cmd = app.add_subcommand("comp", "rank single-word paraphrases of a bigram");
    comp_cmd->add_option("-c,--config", config_path, "pipeline config (JSON)")->required();
    comp_cmd->add_option("-t,--target", target_str, "bigram, e.g. 'traffic light'")->required();
    comp_cmd->add_option("-n,--top", top, "rows to print");
    comp_cmd->add_flag("--pseudo", with_pseudo, "include pseudo-unigrams of lexicon bigrams");

    CLI::App* decomp_cmd = app.add_subcommand("decomp", "rank two-word paraphrases of a unigram");
    decomp_cmd->add_option("-c,--config", config_path, "pipeline config (JSON)")->required();
    decomp_cmd->add_option("-t,--target", target_str, "unigram, e.g. 'streetlight'")->required();
    decomp_cmd->add_option("-n,--top", top, "rows to print");
    decomp_cmd->add_flag("--lexicon-only", only_bigrams, "keep only lexicon bigrams");

    CLI::App* demo_cmd = app.add_subcommand("demo", "generate a synthetic corpus and run everything");
    demo_cmd->add_option("-w,--workdir", workdir, "output directory")->required();
    demo_cmd->add_option("--seed", seed, "corpus and pipeline seed");

    CLI11_PARSE(app, argc, argv);
    CLI::App* sub = app.get_subcommands().front();

    try {
        const std::string name = sub->get_name();
        if (sub == run) {
            std::vector<Stage> stages;
            for (const auto& s : stage_names) stages.push_back(parse_stage(s));
            if (stages.empty()) stages = all_stages();
            run_pipeline(load_config(config_path), stages);
        } else if (sub == demo_cmd) {
            DemoOutcome out = run_demo(workdir, seed);
            std::printf("planted groups: %zu, synonym ranked first: %zu\n", out.planted_groups,
                        out.planted_top1);
            std::printf("reports: %s\n", out.config.report_file("summary").string().c_str());
        } else if (sub == comp_cmd || sub == decomp_cmd) {
            PipelineConfig cfg = load_config(config_path);
            Lexicon lex = Lexicon::load(cfg.lexicon);
            auto domain = FactorizedSpace::load(cfg.space_file("domain"));
            auto function = FactorizedSpace::load(cfg.space_file("function"));
            RankedList list;
            if (sub == comp_cmd) {
                auto words = io::split(target_str, ' ');
                if (words.size() != 2) throw std::runtime_error("target must be two words");
                list = comp(Term::make_bigram(words[0], words[1]), query_vocab(lex, with_pseudo),
                            domain, function, cfg.gen);
            } else {
                auto ppmi = SparseCooccurrence::load(cfg.matrix_file("handed_ppmi"));
                CorpusStats stats = CorpusStats::load(cfg.stats_file());
                list = decomp(Term::make_unigram(target_str), query_vocab(lex, false), domain,
                              function, ppmi, stats, cfg.gen);
                if (only_bigrams) {
                    std::unordered_set<Term> allowed;
                    for (const auto& [_, t] : lex.bigrams) allowed.insert(t);
                    list = filter_candidates(list, allowed);
                }
            }
            print_top(list, top);
        } else {
            run_pipeline(load_config(config_path), {parse_stage(name)});
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
