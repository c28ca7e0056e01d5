#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace offload {

/// Shortest round-trip decimal representation; the same value always
/// prints the same bytes, which keeps experiment CSVs reproducible.
inline std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string csv_cell(double v) { return fmt_double(v); }
inline std::string csv_cell(int v) { return std::to_string(v); }
inline std::string csv_cell(long v) { return std::to_string(v); }
inline std::string csv_cell(std::uint64_t v) { return std::to_string(v); }
inline std::string csv_cell(const std::string& v) { return v; }
inline std::string csv_cell(const char* v) { return v; }

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::string_view header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
        out_ << header << '\n';
    }

    template <typename... Cells>
    void row(const Cells&... cells) {
        std::string line;
        bool first = true;
        ((line += (first ? "" : ","), line += csv_cell(cells), first = false), ...);
        out_ << line << '\n';
    }

    void close() { out_.close(); }

private:
    std::ofstream out_;
};

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace offload
