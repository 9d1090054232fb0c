#include "compgen/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

#include "compgen/cooccur.hpp"
#include "compgen/corpus.hpp"
#include "compgen/eval.hpp"
#include "compgen/featurize.hpp"
#include "compgen/io.hpp"
#include "compgen/lexicon.hpp"
#include "compgen/rank.hpp"
#include "compgen/rng.hpp"
#include "compgen/spaces.hpp"

namespace compgen {
namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

PipelineConfig PipelineConfig::from_json_file(const fs::path& path) {
    std::ifstream in = io::open_input(path, "config file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    static const std::unordered_set<std::string> known = {
        "corpus",       "lexicon",     "workdir",        "seed",
        "sample_cap",   "k_spaces",    "k_mono",         "svd_tol",
        "gen",          "ratio_01",    "degree",         "cost",
        "stems",        "decomp_targets", "holistic_train", "holistic_test",
    };
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw std::runtime_error(path.string() + ": unknown key '" + key + "'");

    PipelineConfig cfg;
    auto base = path.parent_path();
    auto rel = [&](const std::string& p) {
        fs::path q(p);
        return (q.is_absolute() ? q : base / q).lexically_normal();
    };
    for (const auto& c : j.value("corpus", std::vector<std::string>{})) cfg.corpus.push_back(rel(c));
    if (j.contains("lexicon")) cfg.lexicon = rel(j.at("lexicon").get<std::string>());
    if (j.contains("workdir")) cfg.workdir = rel(j.at("workdir").get<std::string>());
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("sample_cap") && !j.at("sample_cap").is_null())
        cfg.sample_cap = j.at("sample_cap").get<std::size_t>();
    cfg.k_spaces = j.value("k_spaces", cfg.k_spaces);
    cfg.k_mono = j.value("k_mono", cfg.k_mono);
    cfg.svd_tol = j.value("svd_tol", cfg.svd_tol);
    if (j.contains("gen")) {
        const json& g = j.at("gen");
        cfg.gen.domain_view.k = g.value("domain_k", cfg.gen.domain_view.k);
        cfg.gen.domain_view.p = g.value("domain_p", cfg.gen.domain_view.p);
        cfg.gen.function_view.k = g.value("function_k", cfg.gen.function_view.k);
        cfg.gen.function_view.p = g.value("function_p", cfg.gen.function_view.p);
        cfg.gen.max_unigrams = g.value("max_unigrams", cfg.gen.max_unigrams);
        cfg.gen.max_modifiers = g.value("max_modifiers", cfg.gen.max_modifiers);
        cfg.gen.max_heads = g.value("max_heads", cfg.gen.max_heads);
        cfg.gen.max_bigrams = g.value("max_bigrams", cfg.gen.max_bigrams);
    }
    cfg.ratio_01 = j.value("ratio_01", cfg.ratio_01);
    cfg.degree = j.value("degree", cfg.degree);
    cfg.cost = j.value("cost", cfg.cost);
    if (j.contains("stems") && !j.at("stems").is_null())
        cfg.stems_file = rel(j.at("stems").get<std::string>());
    if (j.contains("decomp_targets") && !j.at("decomp_targets").is_null())
        cfg.decomp_targets_file = rel(j.at("decomp_targets").get<std::string>());
    cfg.holistic_train = j.value("holistic_train", cfg.holistic_train);
    cfg.holistic_test = j.value("holistic_test", cfg.holistic_test);
    return cfg;
}

void PipelineConfig::save_json(const fs::path& path) const {
    json j;
    std::vector<std::string> cs;
    for (const auto& c : corpus) cs.push_back(c.string());
    j["corpus"] = cs;
    j["lexicon"] = lexicon.string();
    j["workdir"] = workdir.string();
    j["seed"] = seed;
    if (sample_cap) j["sample_cap"] = *sample_cap;
    j["k_spaces"] = k_spaces;
    j["k_mono"] = k_mono;
    j["svd_tol"] = svd_tol;
    j["gen"] = {{"domain_k", gen.domain_view.k},     {"domain_p", gen.domain_view.p},
                {"function_k", gen.function_view.k}, {"function_p", gen.function_view.p},
                {"max_unigrams", gen.max_unigrams},  {"max_modifiers", gen.max_modifiers},
                {"max_heads", gen.max_heads},        {"max_bigrams", gen.max_bigrams}};
    j["ratio_01"] = ratio_01;
    j["degree"] = degree;
    j["cost"] = cost;
    if (stems_file) j["stems"] = stems_file->string();
    if (decomp_targets_file) j["decomp_targets"] = decomp_targets_file->string();
    j["holistic_train"] = holistic_train;
    j["holistic_test"] = holistic_test;
    io::atomic_write(path, j.dump(2) + "\n");
}

std::string PipelineConfig::canonical_json() const {
    // Identifies the computation: parameters plus the content of every input
    // file. Paths (and the workdir) are deliberately absent so the same run
    // from a different location carries the same hash.
    json j;  // json orders keys lexicographically, so this serializes stably
    std::vector<std::string> cs;
    for (const auto& c : corpus) cs.push_back(io::hash_hex(io::read_file(c)));
    j["corpus_sig"] = cs;
    j["lexicon_sig"] = io::hash_hex(io::read_file(lexicon));
    j["seed"] = seed;
    if (sample_cap) j["sample_cap"] = *sample_cap;
    j["k_spaces"] = k_spaces;
    j["k_mono"] = k_mono;
    j["svd_tol"] = svd_tol;
    j["gen"] = {{"domain_k", gen.domain_view.k},     {"domain_p", gen.domain_view.p},
                {"function_k", gen.function_view.k}, {"function_p", gen.function_view.p},
                {"max_unigrams", gen.max_unigrams},  {"max_modifiers", gen.max_modifiers},
                {"max_heads", gen.max_heads},        {"max_bigrams", gen.max_bigrams}};
    j["ratio_01"] = ratio_01;
    j["degree"] = degree;
    j["cost"] = cost;
    if (stems_file) j["stems_sig"] = io::hash_hex(io::read_file(*stems_file));
    if (decomp_targets_file)
        j["decomp_targets_sig"] = io::hash_hex(io::read_file(*decomp_targets_file));
    j["holistic_train"] = holistic_train;
    j["holistic_test"] = holistic_test;
    return j.dump();
}

std::string PipelineConfig::config_hash() const { return io::hash_hex(canonical_json()); }

std::vector<std::string> PipelineConfig::validate() const {
    std::vector<std::string> out;
    if (corpus.empty()) out.push_back("corpus: at least one file required");
    if (lexicon.empty()) out.push_back("lexicon: path required");
    if (workdir.empty()) out.push_back("workdir: path required");
    if (sample_cap && *sample_cap == 0) out.push_back("sample_cap: must be positive when set");
    if (k_spaces == 0) out.push_back("k_spaces: must be positive");
    if (k_mono == 0) out.push_back("k_mono: must be positive");
    if (!(svd_tol > 0.0) || svd_tol >= 1.0) out.push_back("svd_tol: must be in (0, 1)");
    if (gen.domain_view.k == 0) out.push_back("gen.domain_k: must be positive");
    if (gen.function_view.k == 0) out.push_back("gen.function_k: must be positive");
    if (gen.max_unigrams == 0) out.push_back("gen.max_unigrams: must be positive");
    if (gen.max_modifiers == 0) out.push_back("gen.max_modifiers: must be positive");
    if (gen.max_heads == 0) out.push_back("gen.max_heads: must be positive");
    if (gen.max_bigrams == 0) out.push_back("gen.max_bigrams: must be positive");
    if (gen.max_bigrams > gen.max_modifiers * gen.max_heads)
        out.push_back("gen.max_bigrams: exceeds max_modifiers * max_heads");
    if (ratio_01 == 0) out.push_back("ratio_01: must be positive");
    if (degree < 1) out.push_back("degree: must be at least 1");
    if (!(cost > 0.0)) out.push_back("cost: must be positive");
    return out;
}

// ---------------------------------------------------------------------------
// Stage bookkeeping

std::vector<Stage> all_stages() {
    return {Stage::ingest, Stage::cooccur, Stage::svd,    Stage::dataset, Stage::generate,
            Stage::features, Stage::train, Stage::rerank, Stage::baseline, Stage::eval};
}

const char* stage_name(Stage s) {
    switch (s) {
        case Stage::ingest: return "ingest";
        case Stage::cooccur: return "cooccur";
        case Stage::svd: return "svd";
        case Stage::dataset: return "dataset";
        case Stage::generate: return "generate";
        case Stage::features: return "features";
        case Stage::train: return "train";
        case Stage::rerank: return "rerank";
        case Stage::baseline: return "baseline";
        case Stage::eval: return "eval";
    }
    return "?";
}

Stage parse_stage(const std::string& s) {
    for (Stage st : all_stages())
        if (s == stage_name(st)) return st;
    throw std::invalid_argument("unknown stage: " + s);
}

namespace {

void require_input(const fs::path& p, const std::string& producer) {
    if (!fs::exists(p))
        throw std::runtime_error("missing " + p.string() + " (run stage '" + producer + "' first)");
}

std::vector<Document> load_corpus(const PipelineConfig& cfg) {
    std::vector<Document> docs;
    for (const auto& path : cfg.corpus) {
        if (!fs::exists(path)) throw std::runtime_error("corpus file not found: " + path.string());
        auto file_docs = tokenize_documents(io::read_file(path));
        docs.insert(docs.end(), file_docs.begin(), file_docs.end());
    }
    return docs;
}

Lexicon load_lexicon(const PipelineConfig& cfg) {
    if (!fs::exists(cfg.lexicon))
        throw std::runtime_error("lexicon file not found: " + cfg.lexicon.string());
    Lexicon lex = Lexicon::load(cfg.lexicon);
    lex.validate();
    return lex;
}

Split parse_split(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw std::invalid_argument("unknown split: " + s);
}

// Target files: one "<surface>\t<split>" per line, # comments allowed.
std::vector<std::pair<Term, Split>> load_targets(const fs::path& path) {
    std::ifstream in = io::open_input(path, "target list");
    std::vector<std::pair<Term, Split>> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto parts = io::split(line, '\t');
        if (parts.size() != 2) throw std::runtime_error(path.string() + ": bad line: " + line);
        auto words = io::split(parts[0], ' ');
        Term t = words.size() == 2 ? Term::make_bigram(words[0], words[1]) : Term::make_unigram(parts[0]);
        out.emplace_back(t, parse_split(parts[1]));
    }
    return out;
}

struct DatasetSpec {
    std::string name;
    Task task;
    Flavor flavor;
};

std::vector<DatasetSpec> dataset_specs(const PipelineConfig& cfg) {
    std::vector<DatasetSpec> out;
    if (cfg.stems_file)
        out.push_back({"comp_standard", Task::composition, Flavor::standard});
    if (cfg.decomp_targets_file)
        out.push_back({"decomp_standard", Task::decomposition, Flavor::standard});
    if (cfg.holistic_train + cfg.holistic_test > 0) {
        out.push_back({"comp_holistic", Task::composition, Flavor::holistic});
        out.push_back({"decomp_holistic", Task::decomposition, Flavor::holistic});
    }
    return out;
}

fs::path pool_file(const fs::path& dir, std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", index);
    return dir / (std::string(buf) + ".tsv");
}

void report_warnings(const std::string& where, const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << where << ": " << w << "\n";
}

std::uint64_t dataset_seed(const PipelineConfig& cfg, const std::string& name) {
    return cfg.seed ^ io::fnv1a(name);
}

std::vector<Term> unigram_vocab(const Lexicon& lex) {
    std::vector<std::string> surfaces(lex.unigrams.begin(), lex.unigrams.end());
    std::sort(surfaces.begin(), surfaces.end());
    std::vector<Term> out;
    out.reserve(surfaces.size());
    for (const auto& s : surfaces) out.push_back(Term::make_unigram(s));
    return out;
}

std::vector<Term> pseudo_vocab(const Lexicon& lex) {
    std::vector<std::string> surfaces;
    surfaces.reserve(lex.bigrams.size());
    for (const auto& [s, _] : lex.bigrams) surfaces.push_back(s);
    std::sort(surfaces.begin(), surfaces.end());
    std::vector<Term> out;
    out.reserve(surfaces.size());
    for (const auto& s : surfaces) {
        auto words = io::split(s, ' ');
        out.push_back(Term::make_pseudo(words[0], words[1]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stages

void stage_ingest(const PipelineConfig& cfg, const std::string& hash) {
    Lexicon lex = load_lexicon(cfg);
    auto docs = load_corpus(cfg);
    CorpusStats stats = count_ngrams(docs, lex);
    fs::create_directories(cfg.stats_file().parent_path());
    stats.save(cfg.stats_file(), hash, cfg.seed);
}

void stage_cooccur(const PipelineConfig& cfg, const std::string& hash) {
    Lexicon lex = load_lexicon(cfg);
    auto docs = load_corpus(cfg);
    fs::create_directories(cfg.matrix_file("x").parent_path());
    struct Job {
        const char* name;
        ContextMode mode;
        bool normalized;
    };
    // The handed matrix feeds feature extraction and decomposition scoring
    // (normalized PPMI); the other two feed the factorized spaces (raw).
    const Job jobs[] = {{"handed", ContextMode::handed_unigram, true},
                        {"domain", ContextMode::nearest_noun, false},
                        {"function", ContextMode::verb_pattern, false}};
    for (const Job& job : jobs) {
        SparseCooccurrence counts =
            extract_contexts(docs, lex, job.mode, cfg.sample_cap, cfg.seed);
        counts.save(cfg.matrix_file(std::string(job.name) + "_counts"), hash, cfg.seed);
        SparseCooccurrence ppmi = to_ppmi(counts, job.normalized);
        ppmi.save(cfg.matrix_file(std::string(job.name) + "_ppmi"), hash, cfg.seed);
    }
}

void stage_svd(const PipelineConfig& cfg, const std::string& hash) {
    require_input(cfg.matrix_file("domain_ppmi"), "cooccur");
    require_input(cfg.matrix_file("function_ppmi"), "cooccur");
    auto domain_ppmi = SparseCooccurrence::load(cfg.matrix_file("domain_ppmi"));
    auto function_ppmi = SparseCooccurrence::load(cfg.matrix_file("function_ppmi"));
    fs::create_directories(cfg.space_file("x").parent_path());
    truncated_svd(domain_ppmi, cfg.k_spaces, cfg.svd_tol, cfg.seed, SpaceKind::domain)
        .save(cfg.space_file("domain"), hash, cfg.seed);
    truncated_svd(function_ppmi, cfg.k_spaces, cfg.svd_tol, cfg.seed, SpaceKind::function)
        .save(cfg.space_file("function"), hash, cfg.seed);
    build_mono(domain_ppmi, function_ppmi, cfg.k_mono, cfg.svd_tol, cfg.seed)
        .save(cfg.space_file("mono"), hash, cfg.seed);
}

void stage_dataset(const PipelineConfig& cfg, const std::string& hash) {
    Lexicon lex = load_lexicon(cfg);
    fs::create_directories(cfg.dataset_file("x").parent_path());
    if (cfg.stems_file) {
        if (!fs::exists(*cfg.stems_file))
            throw std::runtime_error("stems file not found: " + cfg.stems_file->string());
        auto r = build_standard_composition_dataset(lex, load_targets(*cfg.stems_file));
        report_warnings("comp_standard", r.warnings);
        r.dataset.save(cfg.dataset_file("comp_standard"), hash, cfg.seed);
    }
    if (cfg.decomp_targets_file) {
        if (!fs::exists(*cfg.decomp_targets_file))
            throw std::runtime_error("target file not found: " + cfg.decomp_targets_file->string());
        auto r = build_standard_decomposition_dataset(lex, load_targets(*cfg.decomp_targets_file));
        report_warnings("decomp_standard", r.warnings);
        r.dataset.save(cfg.dataset_file("decomp_standard"), hash, cfg.seed);
    }
    if (cfg.holistic_train + cfg.holistic_test > 0) {
        require_input(cfg.stats_file(), "ingest");
        CorpusStats stats = CorpusStats::load(cfg.stats_file());
        HolisticDatasets h =
            build_holistic_datasets(lex, stats, cfg.holistic_train, cfg.holistic_test);
        h.composition.save(cfg.dataset_file("comp_holistic"), hash, cfg.seed);
        h.decomposition.save(cfg.dataset_file("decomp_holistic"), hash, cfg.seed);
    }
}

void stage_generate(const PipelineConfig& cfg, const std::string& hash) {
    require_input(cfg.space_file("domain"), "svd");
    require_input(cfg.space_file("function"), "svd");
    require_input(cfg.matrix_file("handed_ppmi"), "cooccur");
    require_input(cfg.stats_file(), "ingest");
    Lexicon lex = load_lexicon(cfg);
    auto domain = FactorizedSpace::load(cfg.space_file("domain"));
    auto function = FactorizedSpace::load(cfg.space_file("function"));
    auto ppmi = SparseCooccurrence::load(cfg.matrix_file("handed_ppmi"));
    CorpusStats stats = CorpusStats::load(cfg.stats_file());

    std::vector<Term> unigrams = unigram_vocab(lex);
    std::vector<Term> comp_holistic_vocab = unigrams;
    {
        auto pseudos = pseudo_vocab(lex);
        comp_holistic_vocab.insert(comp_holistic_vocab.end(), pseudos.begin(), pseudos.end());
    }
    std::unordered_set<Term> lexicon_bigrams;
    for (const auto& [_, t] : lex.bigrams) lexicon_bigrams.insert(t);

    // Holistic decomposition searches all splits exhaustively and keeps the
    // attested bigrams, so truncation can never drop a dictionary candidate.
    GenConfig full = cfg.gen;
    full.max_modifiers = unigrams.size();
    full.max_heads = unigrams.size();
    full.max_bigrams = unigrams.size() * unigrams.size();

    for (const DatasetSpec& spec : dataset_specs(cfg)) {
        require_input(cfg.dataset_file(spec.name), "dataset");
        Dataset ds = Dataset::load(cfg.dataset_file(spec.name));
        fs::path dir = cfg.pool_dir("pools", spec.name);
        fs::create_directories(dir);
        for (std::size_t i = 0; i < ds.entries.size(); ++i) {
            const Term& target = ds.entries[i].target;
            RankedList pool;
            if (spec.task == Task::composition) {
                const auto& vocab =
                    spec.flavor == Flavor::standard ? unigrams : comp_holistic_vocab;
                pool = comp(target, vocab, domain, function, cfg.gen);
            } else if (spec.flavor == Flavor::standard) {
                pool = decomp(target, unigrams, domain, function, ppmi, stats, cfg.gen);
            } else {
                pool = decomp(target, unigrams, domain, function, ppmi, stats, full);
                pool = filter_candidates(pool, lexicon_bigrams);
            }
            pool.save(pool_file(dir, i), hash, cfg.seed);
        }
    }
}

// Pools for one split of a dataset, keyed by target, loaded from a stage dir.
std::map<Term, RankedList> load_pools(const PipelineConfig& cfg, const std::string& stage,
                                      const Dataset& ds, const std::string& name,
                                      std::optional<Split> split, const std::string& producer) {
    fs::path dir = cfg.pool_dir(stage, name);
    std::map<Term, RankedList> out;
    for (std::size_t i = 0; i < ds.entries.size(); ++i) {
        if (split && ds.entries[i].split != *split) continue;
        fs::path file = pool_file(dir, i);
        require_input(file, producer);
        out[ds.entries[i].target] = RankedList::load(file);
    }
    return out;
}

// Shared by the features, train and rerank stages.
struct FeaturizeContext {
    FactorizedSpace domain, function;
    SparseCooccurrence ppmi;
    CorpusStats stats;
    std::optional<Featurizer> featurizer;

    explicit FeaturizeContext(const PipelineConfig& cfg) {
        require_input(cfg.space_file("domain"), "svd");
        require_input(cfg.space_file("function"), "svd");
        require_input(cfg.matrix_file("handed_ppmi"), "cooccur");
        require_input(cfg.stats_file(), "ingest");
        domain = FactorizedSpace::load(cfg.space_file("domain"));
        function = FactorizedSpace::load(cfg.space_file("function"));
        ppmi = SparseCooccurrence::load(cfg.matrix_file("handed_ppmi"));
        stats = CorpusStats::load(cfg.stats_file());
        featurizer.emplace(stats, ppmi, domain, function);
    }

    FeaturizeFn fn() const {
        const Featurizer& f = *featurizer;
        return [&f](const Triple& t) { return f(t); };
    }
};

TrainingSet assemble_for(const PipelineConfig& cfg, const FeaturizeContext& ctx,
                         const DatasetSpec& spec, const Dataset& ds) {
    auto pools = load_pools(cfg, "pools", ds, spec.name, Split::train, "generate");
    TrainingSet ts =
        assemble_training(ds, pools, cfg.ratio_01, dataset_seed(cfg, spec.name), ctx.fn());
    ts.task = spec.task;
    ts.flavor = spec.flavor;
    report_warnings(spec.name, ts.warnings);
    return ts;
}

void stage_features(const PipelineConfig& cfg, const std::string& hash) {
    FeaturizeContext ctx(cfg);
    fs::path dir = cfg.workdir / "features";
    fs::create_directories(dir);
    for (const DatasetSpec& spec : dataset_specs(cfg)) {
        require_input(cfg.dataset_file(spec.name), "dataset");
        Dataset ds = Dataset::load(cfg.dataset_file(spec.name));
        TrainingSet ts = assemble_for(cfg, ctx, spec, ds);
        std::string body = io::header_line({"features", 1, hash, cfg.seed}) + "\n";
        for (const TrainingRow& row : ts.rows)
            body += feature_dump_line(row.target, row.candidate, row.label, row.features) + "\n";
        io::atomic_write(dir / (spec.name + ".tsv"), body);
    }
}

void stage_train(const PipelineConfig& cfg, const std::string& hash) {
    FeaturizeContext ctx(cfg);
    fs::create_directories(cfg.model_file("x").parent_path());
    for (Task task : {Task::composition, Task::decomposition}) {
        std::optional<TrainingSet> standard_set, holistic_set;
        for (const DatasetSpec& spec : dataset_specs(cfg)) {
            if (spec.task != task) continue;
            require_input(cfg.dataset_file(spec.name), "dataset");
            Dataset ds = Dataset::load(cfg.dataset_file(spec.name));
            TrainingSet ts = assemble_for(cfg, ctx, spec, ds);
            (spec.flavor == Flavor::standard ? standard_set : holistic_set) = std::move(ts);
        }
        if (!standard_set && !holistic_set) continue;
        TrainingSet ts = standard_set && holistic_set
                             ? augment_training(*standard_set, *holistic_set)
                             : std::move(standard_set ? *standard_set : *holistic_set);
        RankerModel model = train(ts, cfg.degree, cfg.cost);
        model.save(cfg.model_file(task_name(task)), hash, cfg.seed);
    }
}

void stage_rerank(const PipelineConfig& cfg, const std::string& hash) {
    FeaturizeContext ctx(cfg);
    FeaturizeFn featurize_fn = ctx.fn();
    std::map<Task, RankerModel> models;
    for (const DatasetSpec& spec : dataset_specs(cfg)) {
        if (!models.count(spec.task)) {
            require_input(cfg.model_file(task_name(spec.task)), "train");
            models[spec.task] = RankerModel::load(cfg.model_file(task_name(spec.task)));
        }
        require_input(cfg.dataset_file(spec.name), "dataset");
        Dataset ds = Dataset::load(cfg.dataset_file(spec.name));
        fs::path dir = cfg.pool_dir("pools_super", spec.name);
        fs::create_directories(dir);
        DomainTag tag =
            spec.flavor == Flavor::standard ? DomainTag::standard : DomainTag::holistic;
        for (std::size_t i = 0; i < ds.entries.size(); ++i) {
            if (ds.entries[i].split != Split::test) continue;
            fs::path src = pool_file(cfg.pool_dir("pools", spec.name), i);
            require_input(src, "generate");
            RankedList pool = RankedList::load(src);
            RankedList rescored =
                rescore(models[spec.task], ds.entries[i].target, pool, featurize_fn, tag);
            rescored.save(pool_file(dir, i), hash, cfg.seed);
        }
    }
}

void stage_baseline(const PipelineConfig& cfg, const std::string& hash) {
    require_input(cfg.space_file("domain"), "svd");
    require_input(cfg.space_file("mono"), "svd");
    require_input(cfg.matrix_file("handed_ppmi"), "cooccur");
    auto domain = FactorizedSpace::load(cfg.space_file("domain"));
    auto mono = FactorizedSpace::load(cfg.space_file("mono"));
    auto ppmi = SparseCooccurrence::load(cfg.matrix_file("handed_ppmi"));

    for (const DatasetSpec& spec : dataset_specs(cfg)) {
        require_input(cfg.dataset_file(spec.name), "dataset");
        Dataset ds = Dataset::load(cfg.dataset_file(spec.name));
        struct System {
            const char* stage;
            std::function<double(const Term&, const Term&)> score;
        };
        // Composition scores candidate c against the parts of the bigram
        // target; decomposition scores the parts of the candidate bigram
        // against the unigram target. The holistic baseline compares whole
        // rows in the merged space either way.
        auto parts_of = [](const Term& t) {
            return std::pair{Term::make_unigram(t.modifier), Term::make_unigram(t.head)};
        };
        bool is_comp = spec.task == Task::composition;
        System systems[] = {
            {"pools_add",
             [&, is_comp](const Term& target, const Term& cand) {
                 auto [m, h] = parts_of(is_comp ? target : cand);
                 return baseline_add(m, h, is_comp ? cand : target, domain);
             }},
            {"pools_mult",
             [&, is_comp](const Term& target, const Term& cand) {
                 auto [m, h] = parts_of(is_comp ? target : cand);
                 return baseline_mult(m, h, is_comp ? cand : target, ppmi);
             }},
            {"pools_holistic",
             [&](const Term& target, const Term& cand) {
                 return baseline_holistic(target, cand, mono);
             }},
        };
        for (const System& sys : systems) {
            fs::path dir = cfg.pool_dir(sys.stage, spec.name);
            fs::create_directories(dir);
            for (std::size_t i = 0; i < ds.entries.size(); ++i) {
                if (ds.entries[i].split != Split::test) continue;
                fs::path src = pool_file(cfg.pool_dir("pools", spec.name), i);
                require_input(src, "generate");
                RankedList pool = RankedList::load(src);
                RankedList scored;
                scored.target = pool.target;
                scored.items.reserve(pool.items.size());
                for (const RankedItem& item : pool.items)
                    scored.items.push_back(
                        {item.candidate, sys.score(pool.target, item.candidate)});
                sort_ranked(scored.items);
                scored.save(pool_file(dir, i), hash, cfg.seed);
            }
        }
    }
}

void stage_eval(const PipelineConfig& cfg, const std::string& hash) {
    fs::create_directories(cfg.report_file("x").parent_path());
    struct SystemDir {
        const char* label;
        const char* stage;
        bool required;
    };
    // Generated and reranked pools are the canonical chain and must exist;
    // baseline pools are evaluated only when the stage has been run.
    const SystemDir systems[] = {{"generate", "pools", true},
                                 {"super", "pools_super", true},
                                 {"add", "pools_add", false},
                                 {"mult", "pools_mult", false},
                                 {"holistic", "pools_holistic", false}};
    std::string summary = io::header_line({"summary", 1, hash, cfg.seed}) + "\n";
    summary += "report\tn_targets\tn_found\tmean_rank\tmedian_rank\tpct_top1\tpct_top10"
               "\tpct_top100\tpct_in_pool\n";
    for (const DatasetSpec& spec : dataset_specs(cfg)) {
        require_input(cfg.dataset_file(spec.name), "dataset");
        Dataset ds = Dataset::load(cfg.dataset_file(spec.name));
        for (const SystemDir& sys : systems) {
            if (!sys.required && !fs::exists(cfg.pool_dir(sys.stage, spec.name))) continue;
            const char* producer = sys.stage == std::string("pools") ? "generate"
                                   : sys.stage == std::string("pools_super") ? "rerank"
                                                                             : "baseline";
            auto results = load_pools(cfg, sys.stage, ds, spec.name, Split::test, producer);
            EvalReport report = evaluate(results, ds);
            std::string name = std::string(sys.label) + "_" + spec.name;
            report.save(cfg.report_file(name), hash, cfg.seed);
            summary += name + "\t" + std::to_string(report.n_targets) + "\t" +
                       std::to_string(report.n_found) + "\t" + io::fmt_short(report.mean_rank) +
                       "\t" + io::fmt_short(report.median_rank);
            for (double pct : report.percentages()) summary += "\t" + io::fmt_short(pct);
            summary += "\n";
        }
    }
    io::atomic_write(cfg.report_file("summary"), summary);
}

}  // namespace

void run_pipeline(const PipelineConfig& cfg, const std::vector<Stage>& stages) {
    auto violations = cfg.validate();
    if (!violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::invalid_argument(msg);
    }
    fs::create_directories(cfg.workdir);
    std::string hash = cfg.config_hash();
    for (Stage s : all_stages()) {
        if (std::find(stages.begin(), stages.end(), s) == stages.end()) continue;
        std::cerr << "[" << stage_name(s) << "]\n";
        switch (s) {
            case Stage::ingest: stage_ingest(cfg, hash); break;
            case Stage::cooccur: stage_cooccur(cfg, hash); break;
            case Stage::svd: stage_svd(cfg, hash); break;
            case Stage::dataset: stage_dataset(cfg, hash); break;
            case Stage::generate: stage_generate(cfg, hash); break;
            case Stage::features: stage_features(cfg, hash); break;
            case Stage::train: stage_train(cfg, hash); break;
            case Stage::rerank: stage_rerank(cfg, hash); break;
            case Stage::baseline: stage_baseline(cfg, hash); break;
            case Stage::eval: stage_eval(cfg, hash); break;
        }
    }
}

}  // namespace compgen
