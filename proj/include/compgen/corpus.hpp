#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "compgen/term.hpp"

namespace compgen {

struct Lexicon;

// A document is a list of sentences, a sentence a list of tokens.
// Tokens are lowercased; apostrophes survive only between alphanumerics;
// every other non-alphanumeric byte separates tokens ('.', '!', '?' also end
// the sentence). Documents end at blank lines and file boundaries; counts and
// contexts never cross a document boundary.
using Sentence = std::vector<std::string>;
using Document = std::vector<Sentence>;

std::vector<Document> tokenize_documents(const std::string& text);
std::vector<std::string> tokenize_flat(const std::string& text);  // one sentence's worth

// N-gram counts over a corpus, restricted to the lexicon:
//   uf: unigram occurrences (lexicon unigrams only)
//   bf: adjacent ordered pairs of lexicon unigrams
//   tf: adjacent triples whose first or last pair is a lexicon bigram
// A lexicon bigram's own frequency is bf of its components, so it is not
// stored twice.
struct CorpusStats {
    std::map<std::string, std::uint64_t> uf;
    std::map<std::string, std::uint64_t> bf;  // key "a b"
    std::map<std::string, std::uint64_t> tf;  // key "a b c"
    std::uint64_t total_tokens = 0;

    std::uint64_t uf_of(const Term& t) const;
    std::uint64_t bf_of(const std::string& a, const std::string& b) const;
    std::uint64_t tf_of(const std::string& a, const std::string& b, const std::string& c) const;

    void save(const std::filesystem::path& path, const std::string& config_hash = "0",
              std::uint64_t seed = 0) const;
    static CorpusStats load(const std::filesystem::path& path);
};

CorpusStats count_ngrams(const std::vector<Document>& docs, const Lexicon& lexicon);

// Log frequency features. luf accepts unigrams, bigrams and pseudo-unigrams
// (a pair's count is its components' adjacency count). lbf accepts at most
// one pair argument; tf supplies the count when one side is a pair.
double luf(const CorpusStats& stats, const Term& t);
double lbf(const CorpusStats& stats, const Term& a, const Term& b);

}  // namespace compgen
