#include "weylwalk/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace weylwalk {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::filesystem::path resolve_out_dir(const std::string& override_dir) {
    std::filesystem::path dir;
    if (!override_dir.empty()) {
        dir = override_dir;
    } else if (const char* env = std::getenv("WEYLWALK_OUT_DIR"); env && *env) {
        dir = env;
    } else {
        dir = ".";
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec && !std::filesystem::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                 ec.message());
    return dir;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::span<const std::string> header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    row(header);
}

void CsvWriter::row(std::span<const std::string> fields) {
    if (fields.size() != columns_)
        throw std::logic_error("CSV row has " + std::to_string(fields.size()) +
                               " fields, header has " + std::to_string(columns_));
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << csv_escape(fields[i]);
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failed on " + path_.string());
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
}

void JsonlWriter::line(const std::string& compact_json) {
    out_ << compact_json << '\n';
    if (!out_) throw std::runtime_error("write failed on " + path_.string());
}

}  // namespace weylwalk
