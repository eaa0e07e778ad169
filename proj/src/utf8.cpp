#include "rtva/utf8.hpp"

namespace rtva::utf8 {

namespace {

// Returns the code point starting at text[i] and advances i. Bytes that do
// not form a valid sequence are consumed singly.
char32_t next(std::string_view text, size_t& i) {
    const auto b0 = (unsigned char)text[i];
    size_t len = 1;
    char32_t cp = b0;
    if ((b0 & 0x80) == 0x00) {
        len = 1;
    } else if ((b0 & 0xe0) == 0xc0) {
        len = 2;
        cp = b0 & 0x1f;
    } else if ((b0 & 0xf0) == 0xe0) {
        len = 3;
        cp = b0 & 0x0f;
    } else if ((b0 & 0xf8) == 0xf0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return b0;
    }
    if (i + len > text.size()) {
        ++i;
        return b0;
    }
    for (size_t k = 1; k < len; ++k) {
        const auto bk = (unsigned char)text[i + k];
        if ((bk & 0xc0) != 0x80) {
            ++i;
            return b0;
        }
        cp = (cp << 6) | (bk & 0x3f);
    }
    i += len;
    return cp;
}

}  // namespace

std::u32string decode(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) out.push_back(next(text, i));
    return out;
}

std::string encode_one(char32_t cp) {
    std::string out;
    if (cp < 0x80) {
        out.push_back((char)cp);
    } else if (cp < 0x800) {
        out.push_back((char)(0xc0 | (cp >> 6)));
        out.push_back((char)(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back((char)(0xe0 | (cp >> 12)));
        out.push_back((char)(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back((char)(0x80 | (cp & 0x3f)));
    } else {
        out.push_back((char)(0xf0 | (cp >> 18)));
        out.push_back((char)(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back((char)(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back((char)(0x80 | (cp & 0x3f)));
    }
    return out;
}

std::string encode(std::u32string_view codepoints) {
    std::string out;
    out.reserve(codepoints.size());
    for (char32_t cp : codepoints) out += encode_one(cp);
    return out;
}

std::size_t length(std::string_view text) { return decode(text).size(); }

std::vector<std::string> chunk(std::string_view text, std::size_t n) {
    std::vector<std::string> out;
    if (n == 0 || text.empty()) return out;
    const std::u32string cps = decode(text);
    for (size_t i = 0; i < cps.size(); i += n) {
        out.push_back(encode(std::u32string_view(cps).substr(i, n)));
    }
    return out;
}

}  // namespace rtva::utf8
