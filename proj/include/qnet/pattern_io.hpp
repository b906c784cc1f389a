#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "field.hpp"

namespace qnet {

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

inline std::string rstrip(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    return s;
}

// PBM P1: whitespace-separated header numbers, '#' comments to end of line,
// pixels as '0'/'1' with optional whitespace between them.
inline Pattern parse_pbm(const std::vector<std::string>& lines) {
    struct Tok {
        std::string text;
        std::size_t line, col;
    };
    std::vector<Tok> header;
    std::vector<std::uint8_t> pixels;
    std::size_t expected = 0;
    bool have_header = false;
    std::size_t width = 0;

    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string& s = lines[ln];
        std::size_t c = (ln == 0) ? 2 : 0;  // skip magic
        while (c < s.size()) {
            const char ch = s[c];
            if (ch == '#') break;
            if (std::isspace(static_cast<unsigned char>(ch))) {
                ++c;
                continue;
            }
            if (!have_header) {
                std::size_t start = c;
                while (c < s.size() && std::isdigit(static_cast<unsigned char>(s[c]))) ++c;
                if (start == c) throw BadCharacter(ln + 1, c + 1, ch);
                header.push_back({s.substr(start, c - start), ln + 1, start + 1});
                if (header.size() == 2) {
                    width = std::stoul(header[0].text);
                    const std::size_t height = std::stoul(header[1].text);
                    if (width == 0 || width != height)
                        throw BadDimensions("PBM image must be square and non-empty, got " +
                                            header[0].text + "x" + header[1].text);
                    expected = width * height;
                    have_header = true;
                }
                continue;
            }
            if (ch != '0' && ch != '1') throw BadCharacter(ln + 1, c + 1, ch);
            pixels.push_back(static_cast<std::uint8_t>(ch - '0'));
            ++c;
        }
    }
    if (!have_header) throw BadHeader("PBM header lacks width and height");
    if (pixels.size() != expected)
        throw BadDimensions("PBM has " + std::to_string(pixels.size()) + " pixels, expected " +
                            std::to_string(expected));
    LatticeConfig cfg;
    cfg.size = width;
    Pattern p(cfg);
    for (std::size_t i = 0; i < expected; ++i) p.bits[i] = pixels[i];
    return p;
}

}  // namespace detail

// Grid format: "L <size>" then <size> rows of <size> characters in {0,1}.
// PBM "P1" documents are accepted as well.
inline Pattern parse_pattern(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) throw BadHeader("empty pattern document");
    const std::string head = detail::rstrip(lines[0]);
    if (head.rfind("P1", 0) == 0) return detail::parse_pbm(lines);

    std::istringstream hs(head);
    std::string tag;
    long long size = -1;
    std::string extra;
    if (!(hs >> tag) || tag != "L" || !(hs >> size) || (hs >> extra) || size < 1)
        throw BadHeader("expected 'L <size>' or 'P1' header, got '" + head + "'");
    const auto L = static_cast<std::size_t>(size);

    std::vector<std::string> rows;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) rows.push_back(detail::rstrip(lines[ln]));
    while (!rows.empty() && rows.back().empty()) rows.pop_back();
    if (rows.size() != L)
        throw BadDimensions("expected " + std::to_string(L) + " rows, found " + std::to_string(rows.size()));

    LatticeConfig cfg;
    cfg.size = L;
    Pattern p(cfg);
    for (std::size_t r = 0; r < L; ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            const char ch = rows[r][c];
            if (ch != '0' && ch != '1') throw BadCharacter(r + 2, c + 1, ch);
        }
        if (rows[r].size() != L)
            throw BadDimensions("row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                                " cells, expected " + std::to_string(L));
        for (std::size_t c = 0; c < L; ++c) p.bits(r, c) = static_cast<std::uint8_t>(rows[r][c] - '0');
    }
    return p;
}

inline std::vector<std::string> pattern_rows(const Pattern& p) {
    std::vector<std::string> rows;
    const std::size_t L = p.config.size;
    for (std::size_t r = 0; r < L; ++r) {
        std::string row(L, '0');
        for (std::size_t c = 0; c < L; ++c) row[c] = p.bits(r, c) ? '1' : '0';
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Pattern pattern_from_rows(const std::vector<std::string>& rows) {
    std::string text = "L " + std::to_string(rows.size()) + "\n";
    for (const auto& r : rows) text += r + "\n";
    return parse_pattern(text);
}

inline std::string format_pattern(const Pattern& p) {
    std::string out = "L " + std::to_string(p.config.size) + "\n";
    for (const auto& row : pattern_rows(p)) out += row + "\n";
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

inline Pattern load_pattern(const std::string& path) { return parse_pattern(read_text_file(path)); }

}  // namespace qnet
