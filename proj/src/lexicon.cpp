#include "compgen/lexicon.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "compgen/corpus.hpp"
#include "compgen/io.hpp"

namespace compgen {

const char* task_name(Task t) { return t == Task::composition ? "comp" : "decomp"; }
const char* flavor_name(Flavor f) { return f == Flavor::standard ? "standard" : "holistic"; }

Task parse_task(const std::string& s) {
    if (s == "comp" || s == "composition") return Task::composition;
    if (s == "decomp" || s == "decomposition") return Task::decomposition;
    throw std::invalid_argument("unknown task: " + s);
}

Flavor parse_flavor(const std::string& s) {
    if (s == "standard") return Flavor::standard;
    if (s == "holistic") return Flavor::holistic;
    throw std::invalid_argument("unknown flavor: " + s);
}

std::vector<Term> Lexicon::synonym_unigrams(const Term& t) const {
    std::set<Term> out;
    for (const auto& [id, members] : synsets) {
        bool has_t = false;
        for (const auto& m : members)
            if (m == t) has_t = true;
        if (!has_t) continue;
        for (const auto& m : members)
            if (m.is_unigram() && m != t) out.insert(m);
    }
    return {out.begin(), out.end()};
}

std::vector<Term> Lexicon::synonym_bigrams(const Term& t) const {
    std::set<Term> out;
    for (const auto& [id, members] : synsets) {
        bool has_t = false;
        for (const auto& m : members)
            if (m == t) has_t = true;
        if (!has_t) continue;
        for (const auto& m : members)
            if (m.is_bigram() && m != t) out.insert(m);
    }
    return {out.begin(), out.end()};
}

void Lexicon::validate() const {
    for (const auto& [key, b] : bigrams) {
        if (!has_unigram(b.modifier) || !has_unigram(b.head))
            throw std::runtime_error("bigram components not lexicon unigrams: " + key);
    }
    for (const auto& [id, members] : synsets) {
        for (const auto& m : members) {
            if (!has_term(m))
                throw std::runtime_error("synset " + id + " member not in lexicon: " + m.surface);
        }
    }
    for (const auto& n : nouns)
        if (!has_unigram(n)) throw std::runtime_error("noun not a lexicon unigram: " + n);
    for (const auto& v : verbs)
        if (!has_unigram(v)) throw std::runtime_error("verb not a lexicon unigram: " + v);
}

namespace {

Term parse_member(const std::string& s) {
    auto sp = s.find(' ');
    if (sp == std::string::npos) return Term::make_unigram(s);
    return Term::make_bigram(s.substr(0, sp), s.substr(sp + 1));
}

}  // namespace

Lexicon Lexicon::load(const std::filesystem::path& path) {
    auto is = io::open_input(path, "lexicon");
    Lexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto parts = io::split(line, '\t');
        const std::string& kind = parts[0];
        auto bad = [&](const char* why) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + why);
        };
        if (kind == "U" && parts.size() == 2) {
            lex.unigrams.insert(parts[1]);
        } else if (kind == "B" && parts.size() == 2) {
            Term b = parse_member(parts[1]);
            if (!b.is_bigram()) bad("bigram line without a space");
            lex.bigrams.emplace(b.surface, b);
        } else if (kind == "S" && parts.size() == 3) {
            std::vector<Term> members;
            for (const auto& m : io::split(parts[2], '|'))
                if (!m.empty()) members.push_back(parse_member(m));
            lex.synsets[parts[1]] = std::move(members);
        } else if (kind == "G" && parts.size() == 3) {
            lex.glosses[parts[1]].push_back(parts[2]);
        } else if (kind == "N" && parts.size() == 2) {
            lex.nouns.insert(parts[1]);
        } else if (kind == "V" && parts.size() == 2) {
            lex.verbs.insert(parts[1]);
        } else {
            bad("unrecognized lexicon line");
        }
    }
    lex.validate();
    return lex;
}

void Lexicon::save(const std::filesystem::path& path) const {
    std::ostringstream os;
    std::vector<std::string> keys(unigrams.begin(), unigrams.end());
    std::sort(keys.begin(), keys.end());
    for (const auto& u : keys) os << "U\t" << u << "\n";
    keys.clear();
    for (const auto& [k, b] : bigrams) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    for (const auto& k : keys) os << "B\t" << k << "\n";
    for (const auto& [id, members] : synsets) {
        os << "S\t" << id << "\t";
        for (std::size_t i = 0; i < members.size(); ++i)
            os << (i ? "|" : "") << members[i].surface;
        os << "\n";
    }
    std::vector<std::pair<std::string, std::string>> gl;
    for (const auto& [surf, gs] : glosses)
        for (const auto& g : gs) gl.emplace_back(surf, g);
    std::sort(gl.begin(), gl.end());
    for (const auto& [surf, g] : gl) os << "G\t" << surf << "\t" << g << "\n";
    keys.assign(nouns.begin(), nouns.end());
    std::sort(keys.begin(), keys.end());
    for (const auto& n : keys) os << "N\t" << n << "\n";
    keys.assign(verbs.begin(), verbs.end());
    std::sort(keys.begin(), keys.end());
    for (const auto& v : keys) os << "V\t" << v << "\n";
    io::atomic_write(path, os.str());
}

namespace {

std::string lower_ascii(const std::string& s) {
    std::string out = s;
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Prefix match on min(5, |word|) characters.
bool prefix_match(const std::string& word, const std::string& gloss_word) {
    std::size_t n = std::min<std::size_t>(5, word.size());
    if (n == 0 || gloss_word.size() < n) return false;
    return gloss_word.compare(0, n, word, 0, n) == 0;
}

bool gloss_mentions(const std::vector<std::string>& glosses, const std::string& word) {
    std::string w = lower_ascii(word);
    for (const auto& g : glosses) {
        for (const auto& t : tokenize_flat(g))
            if (prefix_match(w, t)) return true;
    }
    return false;
}

}  // namespace

bool is_highly_compositional(const Term& bigram, const Lexicon& lexicon) {
    if (!bigram.is_pair()) throw std::invalid_argument("is_highly_compositional: not a bigram");
    auto it = lexicon.glosses.find(bigram.row_key());
    if (it == lexicon.glosses.end() || it->second.empty()) return false;
    return gloss_mentions(it->second, bigram.head) && gloss_mentions(it->second, bigram.modifier);
}

std::vector<const DatasetEntry*> Dataset::split_entries(Split s) const {
    std::vector<const DatasetEntry*> out;
    for (const auto& e : entries)
        if (e.split == s) out.push_back(&e);
    return out;
}

DatasetBuildResult build_standard_composition_dataset(
    const Lexicon& lexicon, const std::vector<std::pair<Term, Split>>& stems) {
    DatasetBuildResult r;
    r.dataset.task = Task::composition;
    r.dataset.flavor = Flavor::standard;
    for (const auto& [stem, split] : stems) {
        if (!lexicon.has_term(stem)) {
            r.warnings.push_back("stem not in lexicon: " + stem.surface);
            continue;
        }
        if (!is_highly_compositional(stem, lexicon)) continue;
        auto sols = lexicon.synonym_unigrams(stem);
        if (sols.empty()) continue;
        r.dataset.entries.push_back({stem.as_bigram(), std::move(sols), split});
    }
    return r;
}

DatasetBuildResult build_standard_decomposition_dataset(
    const Lexicon& lexicon, const std::vector<std::pair<Term, Split>>& unigrams) {
    DatasetBuildResult r;
    r.dataset.task = Task::decomposition;
    r.dataset.flavor = Flavor::standard;
    for (const auto& [uni, split] : unigrams) {
        if (!lexicon.has_term(uni)) {
            r.warnings.push_back("unigram not in lexicon: " + uni.surface);
            continue;
        }
        auto sols = lexicon.synonym_bigrams(uni);
        bool any_compositional = false;
        for (const auto& b : sols)
            if (is_highly_compositional(b, lexicon)) any_compositional = true;
        if (!any_compositional) continue;
        r.dataset.entries.push_back({uni, std::move(sols), split});
    }
    return r;
}

HolisticDatasets build_holistic_datasets(const Lexicon& lexicon, const CorpusStats& stats,
                                         std::size_t n_train, std::size_t n_test) {
    std::vector<std::pair<std::uint64_t, std::string>> freq;
    for (const auto& [key, b] : lexicon.bigrams) {
        std::uint64_t n = stats.uf_of(b);
        if (n > 0) freq.emplace_back(n, key);
    }
    if (freq.size() < n_train + n_test)
        throw std::runtime_error(
            "holistic datasets need " + std::to_string(n_train + n_test) +
            " corpus-attested lexicon bigrams, found " + std::to_string(freq.size()));
    std::sort(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    HolisticDatasets out;
    out.composition.task = Task::composition;
    out.composition.flavor = Flavor::holistic;
    out.decomposition.task = Task::decomposition;
    out.decomposition.flavor = Flavor::holistic;
    for (std::size_t i = 0; i < n_train + n_test; ++i) {
        const Term& b = lexicon.bigrams.at(freq[i].second);
        Split split = i < n_train ? Split::train : Split::test;
        out.composition.entries.push_back({b, {b.as_pseudo()}, split});
        out.decomposition.entries.push_back({b.as_pseudo(), {b}, split});
    }
    return out;
}

namespace {

// Dataset files carry surfaces; kind is recovered from shape: a space makes a
// bigram, an underscore whose halves are lexicon-style words makes a
// pseudo-unigram. Targets and solutions in one file never mix shapes.
Term parse_dataset_term(const std::string& s) {
    auto sp = s.find(' ');
    if (sp != std::string::npos) return Term::make_bigram(s.substr(0, sp), s.substr(sp + 1));
    auto us = s.find('_');
    if (us != std::string::npos && us > 0 && us + 1 < s.size())
        return Term::make_pseudo(s.substr(0, us), s.substr(us + 1));
    return Term::make_unigram(s);
}

}  // namespace

Dataset Dataset::load(const std::filesystem::path& path) {
    auto is = io::open_input(path, "dataset");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty dataset: " + path.string());
    io::parse_header_line(line, "dataset");
    if (!std::getline(is, line)) throw std::runtime_error("dataset missing task line");
    auto meta = io::split(line, '\t');
    if (meta.size() != 2) throw std::runtime_error("bad dataset task line: " + line);
    Dataset d;
    d.task = parse_task(meta[0]);
    d.flavor = parse_flavor(meta[1]);
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto parts = io::split(line, '\t');
        if (parts.size() != 3) throw std::runtime_error("bad dataset line: " + line);
        DatasetEntry e;
        e.target = parse_dataset_term(parts[0]);
        for (const auto& s : io::split(parts[1], '|'))
            if (!s.empty()) e.solutions.push_back(parse_dataset_term(s));
        if (parts[2] == "train")
            e.split = Split::train;
        else if (parts[2] == "test")
            e.split = Split::test;
        else
            throw std::runtime_error("bad split on dataset line: " + line);
        d.entries.push_back(std::move(e));
    }
    return d;
}

void Dataset::save(const std::filesystem::path& path, const std::string& config_hash,
                   std::uint64_t seed) const {
    std::ostringstream os;
    os << io::header_line({"dataset", 1, config_hash, seed}) << "\n";
    os << task_name(task) << "\t" << flavor_name(flavor) << "\n";
    for (const auto& e : entries) {
        os << e.target.surface << "\t";
        for (std::size_t i = 0; i < e.solutions.size(); ++i)
            os << (i ? "|" : "") << e.solutions[i].surface;
        os << "\t" << (e.split == Split::train ? "train" : "test") << "\n";
    }
    io::atomic_write(path, os.str());
}

}  // namespace compgen
