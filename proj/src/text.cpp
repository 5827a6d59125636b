#include "vinfo/text.hpp"

#include <cstdint>

#include "vinfo/error.hpp"

namespace vinfo {
namespace {

// Length of the whitespace code point starting at s[i], or 0.
std::size_t whitespace_length(std::string_view s, std::size_t i) {
    auto u = [&](std::size_t k) { return static_cast<unsigned char>(s[i + k]); };
    const unsigned char c = u(0);
    if (c == ' ' || (c >= 0x09 && c <= 0x0d)) return 1;
    if (c == 0xc2 && i + 1 < s.size() && (u(1) == 0x85 || u(1) == 0xa0)) return 2;
    if (i + 2 >= s.size()) return 0;
    if (c == 0xe1 && u(1) == 0x9a && u(2) == 0x80) return 3;  // U+1680
    if (c == 0xe2 && u(1) == 0x80) {
        const unsigned char t = u(2);
        if (t <= 0x8a || t == 0xa8 || t == 0xa9 || t == 0xaf) return 3;  // U+2000..200A, 2028, 2029, 202F
    }
    if (c == 0xe2 && u(1) == 0x81 && u(2) == 0x9f) return 3;  // U+205F
    if (c == 0xe3 && u(1) == 0x80 && u(2) == 0x80) return 3;  // U+3000
    return 0;
}

bool is_ascii_punct(char c) {
    const auto u = static_cast<unsigned char>(c);
    return (u >= 0x21 && u <= 0x2f) || (u >= 0x3a && u <= 0x40) || (u >= 0x5b && u <= 0x60) ||
           (u >= 0x7b && u <= 0x7e);
}

}  // namespace

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::string to_upper_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return out;
}

std::vector<std::string> tokenize(std::string_view text, const TokenizeOptions& opts) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            tokens.push_back(opts.lowercase ? to_lower_ascii(cur) : cur);
            cur.clear();
        }
    };
    for (std::size_t i = 0; i < text.size();) {
        if (std::size_t ws = whitespace_length(text, i)) {
            flush();
            i += ws;
            continue;
        }
        if (opts.split_punctuation && is_ascii_punct(text[i])) {
            flush();
            cur.push_back(text[i]);
            flush();
            ++i;
            continue;
        }
        cur.push_back(text[i]);
        ++i;
    }
    flush();
    return tokens;
}

std::string join(std::span<const std::string> tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.append(sep);
        out.append(tokens[i]);
    }
    return out;
}

std::string serialize(const Instance& inst, std::span<const std::string> fields) {
    std::string out;
    for (const auto& f : fields) {
        auto it = inst.fields.find(f);
        if (it == inst.fields.end())
            throw ValidationError("instance '" + inst.id + "' is missing field '" + f + "'");
        if (!out.empty()) out.push_back(' ');
        out += to_upper_ascii(f);
        out.push_back(':');
        if (!it->second.empty()) {
            out.push_back(' ');
            out += it->second;
        }
    }
    return out;
}

}  // namespace vinfo
