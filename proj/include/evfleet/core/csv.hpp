#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace evfleet::csv {

std::vector<std::string> SplitLine(std::string_view line);

double ParseDouble(std::string_view field, std::string_view what, int line_no);
int ParseInt(std::string_view field, std::string_view what, int line_no);

// Line-oriented reader that checks the header and tracks line numbers for
// diagnostics. Blank lines and lines starting with '#' are skipped.
class Reader {
 public:
  Reader(std::istream& in, std::vector<std::string> expected_header);

  // Returns false at end of input.
  bool Next(std::vector<std::string>& fields);
  int line_number() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
  std::size_t width_ = 0;
};

std::ifstream OpenOrThrow(const std::filesystem::path& path);

}  // namespace evfleet::csv
