#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace glyphforge::synth {

// Strict UTF-8 decoding (rejects overlongs, surrogates, out-of-range values).
std::optional<std::u32string> decode_utf8(std::string_view text);

// Like decode_utf8 but throws NotUtf8.
std::u32string to_codepoints(std::string_view text);

std::string to_utf8(std::u32string_view codepoints);
std::string to_utf8(char32_t codepoint);

}  // namespace glyphforge::synth
