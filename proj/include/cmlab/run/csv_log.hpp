#pragma once

#include <string>
#include <vector>

namespace cmlab {

// Deterministic CSV writer: fixed column order, %.17g doubles, '\n' line
// endings, whole-file write-temp-rename on flush. Same rows in, same bytes
// out.
class CsvLog {
 public:
  CsvLog(std::string path, std::string header) : path_(std::move(path)), header_(std::move(header)) {}

  void add_row(std::string row) { rows_.push_back(std::move(row)); }
  void flush() const;
  const std::string& path() const { return path_; }

  static std::string fmt(double v);
  static std::string fmt(long v);

 private:
  std::string path_;
  std::string header_;
  std::vector<std::string> rows_;
};

// Atomic small-file writer shared by reports and sample dumps.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace cmlab
