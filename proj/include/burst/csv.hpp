#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "burst/types.hpp"

namespace burst {

// Doubles are printed with 9 significant digits so repeated runs produce
// byte-identical files.
std::string format_g9(double value);

// Rounds a value through its printed form. Applied before a value crosses a
// stage boundary, so a monolithic run computes from exactly the numbers a
// staged run would read back from disk.
double quantize_g9(double value);

std::string csv_quote(const std::string& field);

// Writes to "<path>.tmp" and renames on commit, so partially written files
// never appear under the final name.
class CsvWriter {
  public:
    explicit CsvWriter(std::filesystem::path path);
    ~CsvWriter();

    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void comment(const std::string& text);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& fields);
    void commit();

    static std::string field(double v) { return format_g9(v); }
    static std::string field(std::size_t v) { return std::to_string(v); }
    static std::string field(std::int64_t v) { return std::to_string(v); }
    static std::string field(int v) { return std::to_string(v); }
    static std::string field(const std::string& v) { return csv_quote(v); }

  private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

struct CsvTable {
    std::vector<std::string> comments;  // leading '#' lines, markers stripped
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws IoError if absent
};

CsvTable read_csv(const std::filesystem::path& path);

// Series files carry their metadata in a leading comment:
//   # start_time=<s> bin_width=<s> raw=<0|1> keyword=<kw>
//   bin_index,time,value
void write_series_csv(const std::filesystem::path& path, const FrequencySeries& series);
FrequencySeries read_series_csv(const std::filesystem::path& path);

// Same tmp-then-rename discipline as CsvWriter, for non-CSV files.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Directory-safe name for a keyword: alnum/._- kept, the rest replaced, and
// a short hash appended whenever anything was replaced.
std::string sanitize_keyword(const std::string& keyword);

}  // namespace burst
