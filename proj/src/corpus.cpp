#include "compgen/corpus.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "compgen/io.hpp"
#include "compgen/lexicon.hpp"

namespace compgen {

namespace {

bool is_token_byte(unsigned char c) {
    // Bytes >= 0x80 (UTF-8 continuation/lead) stay inside tokens so non-ASCII
    // words survive; only ASCII is case-folded.
    return std::isalnum(c) || c >= 0x80;
}

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

void flush_token(std::string& tok, Sentence& sent) {
    if (!tok.empty()) {
        sent.push_back(tok);
        tok.clear();
    }
}

void flush_sentence(Sentence& sent, Document& doc) {
    if (!sent.empty()) {
        doc.push_back(sent);
        sent.clear();
    }
}

void flush_document(Document& doc, std::vector<Document>& docs) {
    if (!doc.empty()) {
        docs.push_back(doc);
        doc.clear();
    }
}

}  // namespace

std::vector<Document> tokenize_documents(const std::string& text) {
    std::vector<Document> docs;
    Document doc;
    Sentence sent;
    std::string tok;
    bool line_blank = true;  // current line has no token bytes so far

    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_token_byte(c)) {
            tok.push_back(static_cast<char>(std::tolower(c)));
            line_blank = false;
            continue;
        }
        if (c == '\'' && !tok.empty() && i + 1 < text.size() &&
            is_token_byte(static_cast<unsigned char>(text[i + 1]))) {
            tok.push_back('\'');
            continue;
        }
        flush_token(tok, sent);
        if (is_sentence_end(static_cast<char>(c))) flush_sentence(sent, doc);
        if (c == '\n') {
            if (line_blank) {  // blank line: document boundary
                flush_sentence(sent, doc);
                flush_document(doc, docs);
            }
            line_blank = true;
        }
    }
    flush_token(tok, sent);
    flush_sentence(sent, doc);
    flush_document(doc, docs);
    return docs;
}

std::vector<std::string> tokenize_flat(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& doc : tokenize_documents(text))
        for (const auto& sent : doc)
            for (const auto& t : sent) out.push_back(t);
    return out;
}

std::uint64_t CorpusStats::uf_of(const Term& t) const {
    if (t.is_pair()) return bf_of(t.modifier, t.head);
    auto it = uf.find(t.surface);
    return it == uf.end() ? 0 : it->second;
}

std::uint64_t CorpusStats::bf_of(const std::string& a, const std::string& b) const {
    auto it = bf.find(a + " " + b);
    return it == bf.end() ? 0 : it->second;
}

std::uint64_t CorpusStats::tf_of(const std::string& a, const std::string& b,
                                 const std::string& c) const {
    auto it = tf.find(a + " " + b + " " + c);
    return it == tf.end() ? 0 : it->second;
}

CorpusStats count_ngrams(const std::vector<Document>& docs, const Lexicon& lexicon) {
    CorpusStats s;
    for (const auto& doc : docs) {
        // Adjacency within a document ignores sentence breaks; only document
        // boundaries stop n-grams.
        std::vector<const std::string*> toks;
        for (const auto& sent : doc)
            for (const auto& t : sent) toks.push_back(&t);
        s.total_tokens += toks.size();
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (lexicon.has_unigram(*toks[i])) ++s.uf[*toks[i]];
            if (i + 1 < toks.size() && lexicon.has_unigram(*toks[i]) &&
                lexicon.has_unigram(*toks[i + 1]))
                ++s.bf[*toks[i] + " " + *toks[i + 1]];
            if (i + 2 < toks.size()) {
                bool first_pair = lexicon.has_bigram(*toks[i], *toks[i + 1]);
                bool last_pair = lexicon.has_bigram(*toks[i + 1], *toks[i + 2]);
                if (first_pair || last_pair)
                    ++s.tf[*toks[i] + " " + *toks[i + 1] + " " + *toks[i + 2]];
            }
        }
    }
    return s;
}

double luf(const CorpusStats& stats, const Term& t) {
    return std::log(static_cast<double>(stats.uf_of(t)) + 1.0);
}

double lbf(const CorpusStats& stats, const Term& a, const Term& b) {
    if (a.is_pair() && b.is_pair())
        throw std::invalid_argument("lbf: both arguments are modifier-head pairs");
    std::uint64_t n = 0;
    if (a.is_pair())
        n = stats.tf_of(a.modifier, a.head, b.surface);
    else if (b.is_pair())
        n = stats.tf_of(a.surface, b.modifier, b.head);
    else
        n = stats.bf_of(a.surface, b.surface);
    return std::log(static_cast<double>(n) + 1.0);
}

void CorpusStats::save(const std::filesystem::path& path, const std::string& config_hash,
                       std::uint64_t seed) const {
    std::ostringstream os;
    os << io::header_line({"stats", 1, config_hash, seed}) << "\n";
    os << "total\t" << total_tokens << "\n";
    for (const auto& [k, v] : uf) os << "U\t" << k << "\t" << v << "\n";
    for (const auto& [k, v] : bf) os << "B\t" << k << "\t" << v << "\n";
    for (const auto& [k, v] : tf) os << "T\t" << k << "\t" << v << "\n";
    io::atomic_write(path, os.str());
}

CorpusStats CorpusStats::load(const std::filesystem::path& path) {
    auto is = io::open_input(path, "stats file");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty stats file: " + path.string());
    io::parse_header_line(line, "stats");
    CorpusStats s;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto parts = io::split(line, '\t');
        if (parts[0] == "total" && parts.size() == 2) {
            s.total_tokens = std::stoull(parts[1]);
            continue;
        }
        if (parts.size() != 3) throw std::runtime_error("bad stats line: " + line);
        std::uint64_t n = std::stoull(parts[2]);
        if (parts[0] == "U")
            s.uf[parts[1]] = n;
        else if (parts[0] == "B")
            s.bf[parts[1]] = n;
        else if (parts[0] == "T")
            s.tf[parts[1]] = n;
        else
            throw std::runtime_error("bad stats kind: " + line);
    }
    return s;
}

}  // namespace compgen
