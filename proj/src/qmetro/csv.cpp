#include "qmetro/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qmetro/error.hpp"

namespace qmetro {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc()) fail(ErrorCode::Internal, "number formatting failed");
  return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    if (j) out += ',';
    out += quote(t.columns[j]);
  }
  out += '\n';
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (row.size() != t.columns.size()) {
      std::ostringstream os;
      os << "table row " << i << " has " << row.size() << " cells for " << t.columns.size()
         << " columns";
      fail(ErrorCode::Internal, os.str());
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      if (const double* x = std::get_if<double>(&row[j])) {
        if (!std::isfinite(*x)) {
          std::ostringstream os;
          os << "non-finite value in column '" << t.columns[j] << "' at row " << i;
          fail(ErrorCode::Numerical, os.str());
        }
        out += format_double(*x);
      } else {
        out += quote(std::get<std::string>(row[j]));
      }
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::Io, "cannot open '" + tmp.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorCode::Io, "writing '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot move output into place at '" + path + "'");
  }
}

}  // namespace qmetro
