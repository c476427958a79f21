#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace weylwalk {

// Shortest decimal form that round-trips the double exactly; "nan"/"inf"
// spelled out. Deterministic, so identical values give identical bytes.
std::string format_double(double v);

// RFC-4180 quoting: fields containing a comma, quote, or newline are wrapped
// in double quotes with embedded quotes doubled; other fields pass through.
std::string csv_escape(const std::string& field);

// Output directory resolution: explicit override, else $WEYLWALK_OUT_DIR,
// else the current directory. Created (recursively) if missing.
std::filesystem::path resolve_out_dir(const std::string& override_dir);

// Line-oriented CSV writer with a fixed column count set by the header.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, std::span<const std::string> header);
    void row(std::span<const std::string> fields);
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

// One compact JSON object per line.
class JsonlWriter {
  public:
    explicit JsonlWriter(const std::filesystem::path& path);
    void line(const std::string& compact_json);
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
    std::ofstream out_;
};

}  // namespace weylwalk
