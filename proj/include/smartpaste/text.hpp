#pragma once

// Small string helpers shared by the codecs and the agent.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smartpaste::text {

std::string trim(std::string_view s);
std::string lower(std::string_view s);
bool contains(std::string_view haystack, std::string_view needle);
bool icontains(std::string_view haystack, std::string_view needle);
std::vector<std::string> split_lines(std::string_view s);  // accepts \n and \r\n
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

bool is_valid_utf8(std::string_view s);
/// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view s);
/// Byte length of the longest prefix holding at most `max_chars` code points.
std::size_t utf8_prefix_bytes(std::string_view s, std::size_t max_chars);
void append_utf8(std::string& out, char32_t cp);

std::string base64_encode(std::string_view bytes);
std::optional<std::string> base64_decode(std::string_view encoded);

}  // namespace smartpaste::text
