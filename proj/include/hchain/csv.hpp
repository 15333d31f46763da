#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hchain {

/// Plain CSV with a leading comment block:
///   # hchain <version>
///   # config: {...resolved config as compact JSON...}
/// Numbers are written with 17 significant digits so output is bit-stable.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const nlohmann::json& config);

  void header(const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row(const std::string& label, const std::vector<double>& values);

 private:
  std::ostream& out_;
};

std::string format_number(double v);

}  // namespace hchain
