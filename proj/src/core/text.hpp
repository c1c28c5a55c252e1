#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace footsim::text {

// Shortest decimal representation that parses back to the same double.
std::string fmt(double v);
// printf-style formatting into a std::string.
[[gnu::format(printf, 1, 2)]] std::string format(const char* f, ...);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
std::vector<std::string_view> split_ws(std::string_view s);

// Throws ParseError(source, line) on failure.
double parse_double(std::string_view s, const std::string& source, std::size_t line);
long parse_long(std::string_view s, const std::string& source, std::size_t line);

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// Line-oriented reader that skips blank lines and '#' comments while
// tracking 1-based line numbers for diagnostics.
class LineReader {
 public:
  LineReader(std::string contents, std::string source);
  // Returns false at end of input.
  bool next(std::string_view& line);
  std::size_t line_number() const { return line_no_; }
  const std::string& source() const { return source_; }
  // Comment lines seen so far, without the leading '#'.
  const std::vector<std::string>& comments() const { return comments_; }

 private:
  std::string contents_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
  std::vector<std::string> comments_;
};

}  // namespace footsim::text
