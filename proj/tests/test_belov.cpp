#include <nlohmann/json.hpp>

#include "doctest.h"
#include "hcop/belov.hpp"

using namespace hcop;

TEST_CASE("paper parameters satisfy every hypothesis exactly") {
  const BelovReport rep = belov_check(BelovParams::paper(), 20);
  CHECK(rep.all_pass);
  CHECK(rep.records.size() > 20);
  for (const BelovRecord& r : rep.records) {
    CAPTURE(r.check);
    CAPTURE(r.m);
    CHECK(r.pass);
  }
}

TEST_CASE("boundary constants hit 1 with exact rational equality") {
  const BelovReport rep = belov_check(BelovParams::paper(), 5);
  int boundary = 0;
  for (const BelovRecord& r : rep.records) {
    if (r.m == -1 && r.exact_equality) {
      ++boundary;
      CHECK(r.lhs == 1.0);
    }
  }
  CHECK(boundary >= 2);
}

TEST_CASE("violated hypothesis is detected") {
  BelovParams p = BelovParams::paper();
  p.alpha = Rational(1, 4);  // alpha (1 + beta) = 2 > 1
  const BelovReport rep = belov_check(p, 5);
  CHECK_FALSE(rep.all_pass);
}

TEST_CASE("report serializes to parseable json") {
  const BelovReport rep = belov_check(BelovParams::paper(), 3);
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["all_pass"].get<bool>());
  CHECK(j["records"].is_array());
}
