#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "compgen/term.hpp"

namespace compgen {

struct CorpusStats;

// Dictionary-like resource: vocabulary, synonym sets, glosses, word classes.
struct Lexicon {
    std::unordered_set<std::string> unigrams;
    // keyed by bigram surface "modifier head"
    std::unordered_map<std::string, Term> bigrams;
    // synset id -> member terms (unigrams and/or bigrams)
    std::map<std::string, std::vector<Term>> synsets;
    // surface -> glosses (each gloss is free text)
    std::unordered_map<std::string, std::vector<std::string>> glosses;
    std::unordered_set<std::string> nouns;
    std::unordered_set<std::string> verbs;

    bool has_unigram(const std::string& s) const { return unigrams.count(s) > 0; }
    bool has_bigram(const std::string& modifier, const std::string& head) const {
        return bigrams.count(modifier + " " + head) > 0;
    }
    bool has_term(const Term& t) const {
        if (t.is_unigram()) return has_unigram(t.surface);
        return bigrams.count(t.row_key()) > 0;
    }
    // All unigrams that share at least one synset with t.
    std::vector<Term> synonym_unigrams(const Term& t) const;
    // All bigrams that share at least one synset with t.
    std::vector<Term> synonym_bigrams(const Term& t) const;

    void validate() const;  // throws on invariant violations

    static Lexicon load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

enum class Task : std::uint8_t { composition, decomposition };
enum class Flavor : std::uint8_t { standard, holistic };

const char* task_name(Task t);
const char* flavor_name(Flavor f);
Task parse_task(const std::string& s);
Flavor parse_flavor(const std::string& s);

enum class Split : std::uint8_t { train, test };

struct DatasetEntry {
    Term target;
    std::vector<Term> solutions;  // deduplicated, sorted
    Split split = Split::train;
};

struct Dataset {
    Task task = Task::composition;
    Flavor flavor = Flavor::standard;
    std::vector<DatasetEntry> entries;

    std::vector<const DatasetEntry*> split_entries(Split s) const;

    static Dataset load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path, const std::string& config_hash = "0",
              std::uint64_t seed = 0) const;
};

struct DatasetBuildResult {
    Dataset dataset;
    std::vector<std::string> warnings;
};

// A bigram is highly compositional when some gloss of it contains its head
// and some gloss (possibly another) contains its modifier. "Contains" is a
// prefix match on the first min(5, |word|) characters, case-insensitive,
// against the gloss tokenized like corpus text.
bool is_highly_compositional(const Term& bigram, const Lexicon& lexicon);

// Composition: targets are bigram stems, solutions their synonymous unigrams.
// Stems missing from the lexicon are rejected with a warning; stems that are
// not highly compositional or have no unigram synonym are silently skipped.
DatasetBuildResult build_standard_composition_dataset(
    const Lexicon& lexicon, const std::vector<std::pair<Term, Split>>& stems);

// Decomposition: targets are unigrams, solutions all synset-sharing bigrams;
// a target is kept only if at least one of those bigrams is highly
// compositional (the others remain as solutions).
DatasetBuildResult build_standard_decomposition_dataset(
    const Lexicon& lexicon, const std::vector<std::pair<Term, Split>>& unigrams);

struct HolisticDatasets {
    Dataset composition;    // bigram -> its pseudo-unigram
    Dataset decomposition;  // pseudo-unigram -> its bigram
};

// The n_train + n_test most corpus-frequent lexicon bigrams (count descending,
// surface ascending), first n_train as train, next n_test as test.
HolisticDatasets build_holistic_datasets(const Lexicon& lexicon, const CorpusStats& stats,
                                         std::size_t n_train, std::size_t n_test);

}  // namespace compgen
