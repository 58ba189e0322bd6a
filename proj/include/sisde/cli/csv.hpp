#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

namespace sisde::cli {

/// Shortest text that reads back to the same double ("%.17g").
std::string format_real(double value);

/// Comma separated output with a fixed header. Throws Error when the file
/// cannot be opened.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(unsigned long long value);
  CsvWriter& cell(std::string_view text);
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  bool first_ = true;
};

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace sisde::cli
