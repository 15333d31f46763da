#include <doctest.h>

#include <sstream>

#include "hchain/csv.hpp"
#include "hchain/steady_state.hpp"

using namespace hchain;

TEST_CASE("csv writer") {
  std::ostringstream out;
  CsvWriter w(out, nlohmann::json{{"n_sites", 4}});
  w.header({"a", "b"});
  w.row({0.1, 2.0});
  w.row("x", {1.0});
  const std::string s = out.str();
  CHECK(s.find("# hchain ") == 0);
  CHECK(s.find("# config: {\"n_sites\":4}") != std::string::npos);
  CHECK(s.find("a,b\n0.10000000000000001,2\nx,1\n") != std::string::npos);
}

TEST_CASE("covariance csv") {
  ChainParams p;
  p.n_sites = 2;
  std::ostringstream out;
  write_covariance_csv(out, stationary_covariance(p));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.find("q1,q2,p1,p2") != std::string::npos);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}
