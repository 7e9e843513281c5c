#include <doctest.h>

#include "haarlab/constructions.hpp"
#include "haarlab/witness.hpp"
#include "haarlab/report.hpp"
#include "support.hpp"

using namespace haarlab;
using support::q;

namespace {

nlohmann::json round_trip(const Report& r) { return nlohmann::json::parse(r.to_json().dump()); }

}  // namespace

TEST_CASE("reports round trip and re-check") {
  std::vector<Report> reports;
  reports.push_back(make_report("verify intersection", certify_empty_intersection(ternary_cantor(), {0, q(4, 9), q(2, 9)},
                                                                                  {0, q(1, 9), q(1, 9)}, 4)));
  reports.push_back(make_report("verify ternary-haar2", verify_haar_n(ternary_cantor(), build_ternary_haar2_witness(), 3, 2, 40)));
  reports.push_back(make_report("refute haar1", refute_haar1_difference_interval(ternary_cantor(), IntervalUnion::closed(-1, 1))));
  reports.push_back(make_report("refute haarN", carry_intersection_point(1, {0, q(1, 25)}, 16)));
  reports.push_back(make_report("refute haar-finite-X", refute_haar_finite_X({q(2, 5), q(1, 30)}, 4)));
  reports.push_back(make_report("verify separation", step4_separation(0, 2)));
  reports.push_back(make_report("verify avoiding-pairs", cantor_avoiding_pairs({0, q(1, 3)}, 3).certificate));
  reports.push_back(make_report("construct", describe_construction("cl(0)", 2)));
  for (const auto& r : reports) {
    const auto j = round_trip(r);
    const Report back = Report::from_json(j);
    CHECK(nlohmann::json::parse(back.to_json().dump()) == j);
    const CheckResult res = check_document(j);
    CHECK_MESSAGE(res.ok, r.command);
    CHECK(res.checked == r.certificates.size());
  }
}

TEST_CASE("check rejects tampered points") {
  const Report r = make_report("refute haarN", carry_intersection_point(1, {0, q(1, 25)}, 16));
  auto j = round_trip(r);
  j["certificates"][0]["point"]["value"] = "1/2";
  CHECK_FALSE(check_document(j).ok);
}

TEST_CASE("check rejects a false emptiness claim") {
  Certificate c = certify_empty_intersection(ternary_cantor(), {0, q(4, 9), q(2, 9)}, {0, q(1, 9), q(1, 9)}, 4);
  auto j = nlohmann::json::parse(c.to_json().dump());
  j["claim"]["translates"][1] = "0";
  j["claim"]["translates"][2] = "0";
  CHECK_FALSE(check_document(j).ok);
}

TEST_CASE("reports are deterministic apart from timing") {
  auto strip = [](nlohmann::ordered_json j) {
    j.erase("elapsed_ms");
    for (auto& c : j["certificates"]) c.erase("elapsed_ms");
    return j.dump();
  };
  const auto a = make_report("x", refute_haar_finite_X({q(2, 5), q(1, 30), q(1, 2000)}, 4)).to_json();
  const auto b = make_report("x", refute_haar_finite_X({q(2, 5), q(1, 30), q(1, 2000)}, 4)).to_json();
  CHECK(strip(a) == strip(b));
}
