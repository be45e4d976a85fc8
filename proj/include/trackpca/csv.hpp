#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_set>
#include <vector>

#include "trackpca/errors.hpp"

namespace trackpca::csv {

struct Row {
    std::size_t line = 0;  // 1-based line on which the record starts
    std::vector<std::string> fields;
};

struct Document {
    std::vector<std::string> header;
    std::vector<Row> rows;

    std::size_t column_index(std::string_view name) const {
        for (std::size_t j = 0; j < header.size(); ++j)
            if (header[j] == name) return j;
        return npos;
    }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Splits RFC 4180 style text into records. Quoted fields may contain commas,
/// doubled quotes and line breaks. Blank lines are skipped.
inline std::vector<Row> tokenize(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<Row> rows;
    Row current;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool row_has_content = false;
    std::size_t line = 1;
    std::size_t quote_line = 0;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        if (row_has_content) rows.push_back(std::move(current));
        current = Row{};
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || field_was_quoted)
                throw ParseError("line " + std::to_string(line) + ": unexpected quote inside unquoted field");
            in_quotes = true;
            field_was_quoted = true;
            row_has_content = true;
            quote_line = line;
            break;
        case ',':
            row_has_content = true;
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            [[fallthrough]];
        case '\n':
            end_row();
            ++line;
            current.line = line;
            break;
        default:
            if (field_was_quoted)
                throw ParseError("line " + std::to_string(line) + ": characters after closing quote");
            field.push_back(c);
            row_has_content = true;
        }
    }
    if (in_quotes)
        throw ParseError("line " + std::to_string(quote_line) + ": unbalanced quote");
    if (row_has_content || !field.empty()) end_row();
    return rows;
}

/// Tokenizes and checks structure: a header is required, header names must be
/// unique and every record must have as many cells as the header.
inline Document parse(std::string_view text) {
    auto rows = tokenize(text);
    if (rows.empty()) throw ParseError("line 1: missing header row");

    Document doc;
    doc.header = std::move(rows.front().fields);
    std::unordered_set<std::string> seen;
    for (const auto& name : doc.header)
        if (!seen.insert(name).second) throw SchemaError("duplicate header name '" + name + "'");

    doc.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
    for (const auto& r : doc.rows)
        if (r.fields.size() != doc.header.size())
            throw ParseError("line " + std::to_string(r.line) + ": expected " +
                             std::to_string(doc.header.size()) + " cells, found " +
                             std::to_string(r.fields.size()));
    return doc;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

/// Parses a finite decimal number; the whole (trimmed) cell must be consumed.
inline bool parse_double(std::string_view cell, double& out) {
    cell = trim(cell);
    if (cell.starts_with('+')) cell.remove_prefix(1);
    if (cell.empty()) return false;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc{} && ptr == cell.data() + cell.size() && std::isfinite(out);
}

/// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Shortest round-trip text in scientific notation, valid as a JSON number.
inline std::string format_scientific(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
    return std::string(buf, ptr);
}

inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// Appends one CSV record terminated by '\n'.
inline void append_row(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t j = 0; j < fields.size(); ++j) {
        if (j) out.push_back(',');
        out += escape(fields[j]);
    }
    out.push_back('\n');
}

}  // namespace trackpca::csv
