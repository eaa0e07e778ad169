#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rtva::utf8 {

// Decodes UTF-8 into code points. Invalid byte sequences are passed through
// one byte at a time as U+FFFD-free raw values so that no input is ever lost.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view codepoints);
std::string encode_one(char32_t cp);

// Number of code points in the string.
std::size_t length(std::string_view text);

// Splits text into consecutive pieces of `n` code points (last may be short).
std::vector<std::string> chunk(std::string_view text, std::size_t n);

}  // namespace rtva::utf8
