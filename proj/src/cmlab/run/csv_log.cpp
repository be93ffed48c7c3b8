#include "cmlab/run/csv_log.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cmlab/core/errors.hpp"

namespace cmlab {

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw input_error("write_file_atomic: cannot write " + tmp.string());
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  }
  fs::rename(tmp, target);
}

void CsvLog::flush() const {
  std::string out = header_;
  out += '\n';
  for (const std::string& row : rows_) {
    out += row;
    out += '\n';
  }
  write_file_atomic(path_, out);
}

std::string CsvLog::fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvLog::fmt(long v) { return std::to_string(v); }

}  // namespace cmlab
