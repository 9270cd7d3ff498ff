#include "burst/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace burst {

std::string format_g9(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    return buf;
}

double quantize_g9(double value) {
    return std::strtod(format_g9(value).c_str(), nullptr);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(std::filesystem::path path)
    : path_(std::move(path)), tmp_(path_.string() + ".tmp"), out_(tmp_, std::ios::trunc) {
    if (!out_) throw IoError("cannot open for writing: " + tmp_.string());
}

CsvWriter::~CsvWriter() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void CsvWriter::commit() {
    out_.close();
    if (out_.fail()) throw IoError("write failed: " + tmp_.string());
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
}

std::size_t CsvTable::column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            std::size_t at = line.find_first_not_of("# ");
            table.comments.push_back(at == std::string::npos ? "" : line.substr(at));
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    if (in.bad()) throw IoError("read failed: " + path.string());
    return table;
}

namespace {

// Keywords are opaque tokens; percent-encode the few characters that would
// break the one-line metadata comment.
std::string encode_token(const std::string& token) {
    std::string out;
    for (char c : token) {
        switch (c) {
            case '%': out += "%25"; break;
            case '\n': out += "%0A"; break;
            case '\r': out += "%0D"; break;
            default: out += c;
        }
    }
    return out;
}

std::string decode_token(const std::string& token) {
    std::string out;
    for (std::size_t i = 0; i < token.size(); ++i) {
        if (token[i] == '%' && i + 2 < token.size()) {
            const std::string hex = token.substr(i + 1, 2);
            if (hex == "25") { out += '%'; i += 2; continue; }
            if (hex == "0A") { out += '\n'; i += 2; continue; }
            if (hex == "0D") { out += '\r'; i += 2; continue; }
        }
        out += token[i];
    }
    return out;
}

}  // namespace

void write_series_csv(const std::filesystem::path& path, const FrequencySeries& series) {
    CsvWriter w(path);
    std::ostringstream meta;
    // keyword goes last so it can contain spaces
    meta << "start_time=" << series.start_time << " bin_width=" << series.bin_width
         << " raw=" << (series.raw ? 1 : 0) << " keyword=" << encode_token(series.keyword);
    w.comment(meta.str());
    w.header({"bin_index", "time", "value"});
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        w.row({CsvWriter::field(i), CsvWriter::field(series.bin_time(i)),
               CsvWriter::field(series.values[i])});
    }
    w.commit();
}

FrequencySeries read_series_csv(const std::filesystem::path& path) {
    CsvTable table = read_csv(path);
    FrequencySeries series;
    series.keyword = path.stem().string();
    try {
        for (const auto& comment : table.comments) {
            std::istringstream in(comment);
            std::string token;
            while (in >> token) {
                auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                std::string key = token.substr(0, eq);
                std::string val = token.substr(eq + 1);
                if (key == "keyword") {
                    auto at = comment.find("keyword=");
                    series.keyword = decode_token(comment.substr(at + 8));
                    break;
                }
                if (key == "start_time") series.start_time = std::stoll(val);
                else if (key == "bin_width") series.bin_width = std::stoll(val);
                else if (key == "raw") series.raw = val != "0";
            }
        }
        if (series.bin_width <= 0) throw IoError("bin_width must be positive in " + path.string());
        std::size_t bin_col = table.column("bin_index");
        std::size_t val_col = table.column("value");
        series.values.assign(table.rows.size(), 0.0);
        for (const auto& row : table.rows) {
            std::size_t bin = std::stoull(row.at(bin_col));
            if (bin >= series.values.size()) {
                throw IoError("bin_index out of range in " + path.string());
            }
            series.values[bin] = std::stod(row.at(val_col));
        }
    } catch (const IoError&) {
        throw;
    } catch (const std::exception&) {
        throw IoError("bad numeric field in " + path.string());
    }
    return series;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        out.close();
        if (out.fail()) throw IoError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string sanitize_keyword(const std::string& keyword) {
    std::string out;
    bool changed = keyword.empty();
    for (char c : keyword) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || c == '_' || c == '-' || c == '.') {
            out += c;
        } else {
            out += '_';
            changed = true;
        }
    }
    if (changed) {
        // FNV-1a over the original token keeps distinct keywords distinct.
        std::uint64_t h = 1469598103934665603ull;
        for (char c : keyword) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        char buf[20];
        std::snprintf(buf, sizeof(buf), "-%08x", static_cast<unsigned>(h & 0xffffffffu));
        out += buf;
    }
    return out;
}

}  // namespace burst
