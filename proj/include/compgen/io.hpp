#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace compgen::io {

// Common first line of every artifact file:
//   compgen-<kind>\t<version>\t<config-hash>\t<seed>
struct FileHeader {
    std::string kind;
    int version = 1;
    std::string config_hash = "0";
    std::uint64_t seed = 0;
};

std::string header_line(const FileHeader& h);
FileHeader parse_header_line(const std::string& line, const std::string& expected_kind);

// %.17g: shortest text that round-trips a double exactly.
std::string fmt_full(double v);
// %.9g: feature dump precision.
std::string fmt_short(double v);
double parse_double(const std::string& s);

// FNV-1a, used for config hashes embedded in artifact headers.
std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(const std::string& s);

std::vector<std::string> split(const std::string& s, char sep);

// Write-then-rename so interrupted runs never leave a partial artifact.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path, const std::string& what);

}  // namespace compgen::io
