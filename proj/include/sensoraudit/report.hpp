#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sensoraudit {

// Shortest decimal text that round-trips to the same double ('.' decimal
// point regardless of locale).
std::string format_double(double value);

// Minimal CSV writer: ',' separator, LF line endings, fields quoted only when
// they contain a separator, quote or newline.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(unsigned long long value);
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(unsigned value) { return field(static_cast<unsigned long long>(value)); }
  CsvWriter& field(long value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(unsigned long value) { return field(static_cast<unsigned long long>(value)); }
  void end_row();

  const std::string& str() const noexcept { return out_; }

 private:
  void separator();

  std::string out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

// Writes `contents` byte-for-byte (binary mode). Throws kIoError on failure.
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace sensoraudit
