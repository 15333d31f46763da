#include "hchain/csv.hpp"

#include <cstdio>

namespace hchain {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const nlohmann::json& config) : out_(out) {
  out_ << "# hchain " << HCHAIN_VERSION << '\n';
  out_ << "# config: " << config.dump() << '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
}

void CsvWriter::row(const std::string& label, const std::vector<double>& values) {
  out_ << label;
  for (double v : values) out_ << ',' << format_number(v);
  out_ << '\n';
}

}  // namespace hchain
