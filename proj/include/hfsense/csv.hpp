#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hfsense::csv {

// Fields never contain commas or quotes in any of the formats used here, so
// splitting is a plain scan.
std::vector<std::string> split(std::string_view line);

std::string trim(std::string_view s);

bool parse_double(std::string_view s, double& out);
bool parse_i64(std::string_view s, std::int64_t& out);
bool parse_u64(std::string_view s, std::uint64_t& out);

// Shortest representation that round-trips exactly (std::to_chars).
std::string fmt(double v);
std::string fmt(std::int64_t v);
std::string fmt(std::uint64_t v);

// Line-oriented reader that skips '#' metadata lines and keeps 1-based line
// numbers for reject reporting.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);
  bool next(std::string& line, std::size_t& line_number);
  bool is_open() const { return in_.is_open(); }

 private:
  std::ifstream in_;
  std::size_t line_number_ = 0;
};

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);
  void comment(const std::string& text);  // "# text"
  void row(const std::vector<std::string>& fields);
  void raw_line(const std::string& line);

 private:
  std::ofstream out_;
};

}  // namespace hfsense::csv
