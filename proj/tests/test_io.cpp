#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <set>

#include "compgen/io.hpp"
#include "compgen/rng.hpp"

using namespace compgen;
namespace fs = std::filesystem;

TEST_CASE("fmt_full round-trips doubles exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        double v = std::ldexp(mant(rng), (int)(uniform_below(rng, 600)) - 300);
        CHECK(io::parse_double(io::fmt_full(v)) == v);
    }
    CHECK(io::parse_double(io::fmt_full(0.0)) == 0.0);
    CHECK(io::parse_double(io::fmt_full(0.1)) == 0.1);
    CHECK(io::parse_double(io::fmt_full(1e308)) == 1e308);
    CHECK(io::parse_double(io::fmt_full(5e-324)) == 5e-324);
}

TEST_CASE("parse_double rejects trailing garbage and empty input") {
    CHECK(io::parse_double("1.5") == 1.5);
    CHECK(io::parse_double("-2e3") == -2000.0);
    CHECK_THROWS(io::parse_double(""));
    CHECK_THROWS(io::parse_double("1.5x"));
    CHECK_THROWS(io::parse_double("x"));
    CHECK_THROWS(io::parse_double("1.5 "));
}

TEST_CASE("fnv1a matches the published test vectors") {
    // Reference values of 64-bit FNV-1a from the algorithm's parameters:
    // offset basis 14695981039346656037, prime 1099511628211.
    CHECK(io::fnv1a("") == 14695981039346656037ull);
    CHECK(io::fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(io::fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("hash_hex is 16 lowercase hex digits and collision-sane") {
    std::set<std::string> seen;
    for (int i = 0; i < 100; ++i) {
        std::string h = io::hash_hex("input-" + std::to_string(i));
        CHECK(h.size() == 16);
        CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
        seen.insert(h);
    }
    CHECK(seen.size() == 100);
}

TEST_CASE("split keeps empty fields") {
    auto p = io::split("a\tb\tc", '\t');
    REQUIRE(p.size() == 3);
    CHECK(p[0] == "a");
    CHECK(p[2] == "c");
    auto q = io::split("a\t\tb\t", '\t');
    REQUIRE(q.size() == 4);
    CHECK(q[1] == "");
    CHECK(q[3] == "");
    CHECK(io::split("", '\t').size() == 1);
}

TEST_CASE("header line round-trips and checks the kind") {
    io::FileHeader h{"pool", 1, "deadbeef01234567", 99};
    std::string line = io::header_line(h);
    io::FileHeader back = io::parse_header_line(line, "pool");
    CHECK(back.kind == "pool");
    CHECK(back.version == 1);
    CHECK(back.config_hash == "deadbeef01234567");
    CHECK(back.seed == 99);
    CHECK_THROWS(io::parse_header_line(line, "model"));
    CHECK_THROWS(io::parse_header_line("not a header", "pool"));
}

TEST_CASE("atomic_write replaces content and leaves no temp files") {
    fs::path dir = fs::temp_directory_path() / "compgen_io_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    fs::path f = dir / "x.tsv";
    io::atomic_write(f, "one\n");
    CHECK(io::read_file(f) == "one\n");
    io::atomic_write(f, "two\n");
    CHECK(io::read_file(f) == "two\n");
    std::size_t n = 0;
    for ([[maybe_unused]] auto& e : fs::directory_iterator(dir)) ++n;
    CHECK(n == 1);
    fs::remove_all(dir);
}

TEST_CASE("open_input names the missing file") {
    try {
        io::open_input("/nonexistent/compgen/file.tsv", "test input");
        FAIL("expected throw");
    } catch (const std::exception& e) {
        std::string msg = e.what();
        CHECK(msg.find("file.tsv") != std::string::npos);
    }
}

TEST_CASE("uniform_below is unbiased over small ranges and deterministic") {
    std::mt19937_64 a(123), b(123);
    for (int i = 0; i < 1000; ++i) CHECK(uniform_below(a, 17) == uniform_below(b, 17));
    std::mt19937_64 rng(5);
    std::vector<std::size_t> counts(7, 0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) ++counts[uniform_below(rng, 7)];
    for (std::size_t c : counts) {
        CHECK(c > draws / 7 - 600);
        CHECK(c < draws / 7 + 600);
    }
    for (int i = 0; i < 100; ++i) CHECK(uniform_below(rng, 1) == 0);
}

TEST_CASE("sample_without_replacement yields distinct in-range indices") {
    std::mt19937_64 rng(11);
    auto s = sample_without_replacement(rng, 50, 20);
    REQUIRE(s.size() == 20);
    std::set<std::size_t> uniq(s.begin(), s.end());
    CHECK(uniq.size() == 20);
    for (auto v : s) CHECK(v < 50);

    // Requesting more than available returns a permutation of everything.
    std::mt19937_64 rng2(11);
    auto all = sample_without_replacement(rng2, 5, 99);
    std::set<std::size_t> uniq2(all.begin(), all.end());
    CHECK(uniq2 == std::set<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("sample_without_replacement is uniform over pairs") {
    // All C(4,2)=6 unordered pairs from n=4 should be roughly equally likely.
    std::map<std::set<std::size_t>, int> freq;
    std::mt19937_64 rng(99);
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) {
        auto s = sample_without_replacement(rng, 4, 2);
        freq[{s[0], s[1]}]++;
    }
    REQUIRE(freq.size() == 6);
    for (const auto& [k, c] : freq) {
        CHECK(c > draws / 6 - 700);
        CHECK(c < draws / 6 + 700);
    }
}

TEST_CASE("reservoir keeps everything under capacity and samples above it") {
    std::mt19937_64 rng(3);
    Reservoir<int> r(5, rng);
    for (int i = 0; i < 3; ++i) r.offer(i);
    CHECK(r.items() == std::vector<int>{0, 1, 2});
    CHECK(r.seen() == 3);

    // Above capacity: every element of the stream should appear with
    // probability cap/NN; check rough uniformity of inclusion counts.
    const int stream = 200, cap = 10, reps = 4000;
    std::vector<int> incl(stream, 0);
    std::mt19937_64 rng2(17);
    for (int rep = 0; rep < reps; ++rep) {
        Reservoir<int> rr(cap, rng2);
        for (int i = 0; i < stream; ++i) rr.offer(i);
        REQUIRE(rr.items().size() == (std::size_t)cap);
        for (int v : rr.items()) ++incl[v];
    }
    double expect = double(reps) * cap / stream;  // = 200
    for (int i = 0; i < stream; ++i) {
        CHECK(incl[i] > expect * 0.6);
        CHECK(incl[i] < expect * 1.4);
    }
}
