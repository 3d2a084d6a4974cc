#include "sensoraudit/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sensoraudit/error.hpp"

namespace sensoraudit {

std::string format_double(double value) {
  if (value == 0.0) return "0";  // also folds -0
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw AuditError(ErrorCode::kIoError, "failed to format number");
  return {buf.data(), ptr};
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) field(h);
  end_row();
}

void CsvWriter::separator() {
  if (in_row_ > 0) out_.push_back(',');
  ++in_row_;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  separator();
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
    out_.append(text);
    return *this;
  }
  out_.push_back('"');
  for (char ch : text) {
    if (ch == '"') out_.push_back('"');
    out_.push_back(ch);
  }
  out_.push_back('"');
  return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(std::string_view(format_double(value))); }

CsvWriter& CsvWriter::field(long long value) {
  return field(std::string_view(std::to_string(value)));
}

CsvWriter& CsvWriter::field(unsigned long long value) {
  return field(std::string_view(std::to_string(value)));
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw AuditError(ErrorCode::kInvalidArgument,
                     "csv row has " + std::to_string(in_row_) + " fields, expected " +
                         std::to_string(columns_));
  }
  out_.push_back('\n');
  in_row_ = 0;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw AuditError(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw AuditError(ErrorCode::kIoError, "failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AuditError(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sensoraudit
