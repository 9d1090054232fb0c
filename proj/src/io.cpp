#include "compgen/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace compgen::io {

std::string header_line(const FileHeader& h) {
    std::ostringstream os;
    os << "compgen-" << h.kind << "\t" << h.version << "\t" << h.config_hash << "\t" << h.seed;
    return os.str();
}

FileHeader parse_header_line(const std::string& line, const std::string& expected_kind) {
    auto parts = split(line, '\t');
    if (parts.size() != 4)
        throw std::runtime_error("bad artifact header: " + line);
    const std::string want = "compgen-" + expected_kind;
    if (parts[0] != want)
        throw std::runtime_error("expected " + want + " file, found " + parts[0]);
    FileHeader h;
    h.kind = expected_kind;
    h.version = std::stoi(parts[1]);
    h.config_hash = parts[2];
    h.seed = std::stoull(parts[3]);
    return h;
}

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw std::runtime_error("bad float: '" + s + "'");
    return v;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(const std::string& s) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << contents;
        if (!os) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::ifstream open_input(const std::filesystem::path& path, const std::string& what) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + what + ": " + path.string());
    return is;
}

}  // namespace compgen::io
