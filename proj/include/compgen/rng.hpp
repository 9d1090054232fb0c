#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace compgen {

// std::uniform_int_distribution and std::sample are implementation-defined,
// so seeded artifacts built with them would not be portable across stdlibs.
// These helpers pin the exact draw sequence to mt19937_64.

inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    // Rejection sampling on the top of the 64-bit range: unbiased.
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    for (;;) {
        std::uint64_t v = rng();
        if (v < limit) return v % n;
    }
}

// Deterministic sample of k distinct indices from [0, n), in draw order.
inline std::vector<std::size_t> sample_without_replacement(std::mt19937_64& rng,
                                                           std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    if (k > n) k = n;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

// Classic reservoir sampler over a stream of T. Holds the shared generator
// by pointer so reservoirs can live in resizable containers.
template <typename T>
class Reservoir {
  public:
    Reservoir(std::size_t cap, std::mt19937_64& rng) : cap_(cap), rng_(&rng) {}

    void offer(T item) {
        ++seen_;
        if (items_.size() < cap_) {
            items_.push_back(std::move(item));
        } else if (cap_ > 0) {
            std::uint64_t j = uniform_below(*rng_, seen_);
            if (j < cap_) items_[static_cast<std::size_t>(j)] = std::move(item);
        }
    }

    const std::vector<T>& items() const { return items_; }
    std::uint64_t seen() const { return seen_; }

  private:
    std::size_t cap_;
    std::mt19937_64* rng_;
    std::vector<T> items_;
    std::uint64_t seen_ = 0;
};

}  // namespace compgen
