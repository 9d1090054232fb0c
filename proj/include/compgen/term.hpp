#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace compgen {

// A lexical item. Bigrams are noun-modifier pairs ("red salmon"); a
// pseudo-unigram is the same pair treated as a single token ("red_salmon").
// Bigram and pseudo-unigram forms of one pair denote the same object and
// share one row in every matrix and space; the canonical row key is the
// bigram surface.
enum class TermKind : std::uint8_t { unigram, bigram, pseudo_unigram };

struct Term {
    TermKind kind = TermKind::unigram;
    std::string surface;   // "cat", "red salmon", "red_salmon"
    std::string modifier;  // empty for unigrams
    std::string head;      // empty for unigrams

    static Term make_unigram(std::string s) {
        Term t;
        t.kind = TermKind::unigram;
        t.surface = std::move(s);
        return t;
    }
    static Term make_bigram(const std::string& modifier, const std::string& head) {
        Term t;
        t.kind = TermKind::bigram;
        t.surface = modifier + " " + head;
        t.modifier = modifier;
        t.head = head;
        return t;
    }
    static Term make_pseudo(const std::string& modifier, const std::string& head) {
        Term t;
        t.kind = TermKind::pseudo_unigram;
        t.surface = modifier + "_" + head;
        t.modifier = modifier;
        t.head = head;
        return t;
    }

    bool is_unigram() const { return kind == TermKind::unigram; }
    bool is_bigram() const { return kind == TermKind::bigram; }
    bool is_pseudo() const { return kind == TermKind::pseudo_unigram; }
    // True for both spellings of a modifier-head pair.
    bool is_pair() const { return kind != TermKind::unigram; }

    // Key used for matrix/space rows: pseudo-unigrams map to the bigram row.
    std::string row_key() const {
        if (is_pair()) return modifier + " " + head;
        return surface;
    }

    Term as_bigram() const {
        if (!is_pair()) throw std::logic_error("as_bigram: term is a unigram");
        return make_bigram(modifier, head);
    }
    Term as_pseudo() const {
        if (!is_pair()) throw std::logic_error("as_pseudo: term is a unigram");
        return make_pseudo(modifier, head);
    }

    friend bool operator==(const Term& a, const Term& b) {
        return a.kind == b.kind && a.surface == b.surface;
    }
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
    // Surface-major order so ranked-list tie-breaks read alphabetically.
    friend bool operator<(const Term& a, const Term& b) {
        if (a.surface != b.surface) return a.surface < b.surface;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    }
};

enum class Hand : std::uint8_t { left, right };

inline Hand opposite(Hand h) { return h == Hand::left ? Hand::right : Hand::left; }
inline const char* hand_name(Hand h) { return h == Hand::left ? "left" : "right"; }

}  // namespace compgen

template <>
struct std::hash<compgen::Term> {
    std::size_t operator()(const compgen::Term& t) const noexcept {
        return std::hash<std::string>{}(t.surface) * 31u + static_cast<std::size_t>(t.kind);
    }
};
