#include "haarlab/report.hpp"

#include <algorithm>
#include <regex>

#include "haarlab/constructions.hpp"
#include "haarlab/error.hpp"

namespace haarlab {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json Report::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["config"] = config;
  j["verdict"] = verdict;
  j["summary"] = summary;
  ordered_json certs = ordered_json::array();
  for (const auto& c : certificates) certs.push_back(c.to_json());
  j["certificates"] = certs;
  j["elapsed_ms"] = elapsed_ms;
  return j;
}

Report Report::from_json(const json& j) {
  try {
    Report r;
    r.command = j.at("command").get<std::string>();
    if (j.contains("config")) r.config = j.at("config");
    r.verdict = j.at("verdict").get<std::string>();
    if (j.contains("summary")) r.summary = j.at("summary");
    for (const auto& c : j.at("certificates")) r.certificates.push_back(Certificate::from_json(c));
    if (j.contains("elapsed_ms")) r.elapsed_ms = j.at("elapsed_ms").get<std::int64_t>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
}

Report make_report(std::string command, const HaarReport& haar) {
  Report r;
  r.command = std::move(command);
  r.verdict = haar.verdict;
  r.summary["tuples"] = haar.tuples;
  r.summary["certified"] = haar.certified;
  r.summary["inconclusive"] = haar.inconclusive;
  r.certificates = haar.certificates;
  r.elapsed_ms = haar.elapsed_ms;
  return r;
}

Report make_report(std::string command, Certificate certificate) {
  Report r;
  r.command = std::move(command);
  r.verdict = !certificate.verdict.empty() ? certificate.verdict : to_string(certificate.status);
  r.summary["status"] = to_string(certificate.status);
  r.elapsed_ms = certificate.elapsed_ms;
  r.certificates.push_back(std::move(certificate));
  return r;
}

Certificate describe_construction(const std::string& identifier, std::size_t depth) {
  const NamedConstruction nc = make(identifier);
  const IntervalUnion u = project(nc.expr, depth);
  Certificate c;
  c.claim["kind"] = "projection";
  c.claim["identifier"] = nc.name;
  c.claim["params"] = nc.params;
  c.claim["system"] = system_to_json(nc.system);
  c.claim["descriptor"] = to_descriptor(nc.expr);
  c.claim["companions"] = nc.companions;
  c.status = Status::Verified;
  c.depth = depth;
  c.evidence["pieces"] = u.size();
  c.evidence["measure"] = to_string(total_length(u));
  if (u.size() <= 4096) {
    ordered_json pieces = ordered_json::array();
    for (const auto& iv : u.intervals()) pieces.push_back(ordered_json::array({to_string(iv.lo), to_string(iv.hi)}));
    c.evidence["projection"] = pieces;
  }
  return c;
}

namespace {

std::vector<Rational> rationals_of(const json& a) {
  std::vector<Rational> out;
  for (const auto& v : a) out.push_back(parse_rational(v.get<std::string>()));
  return out;
}

void expect(CheckResult& r, bool condition, const std::string& what) {
  if (!condition) {
    r.ok = false;
    r.failures.push_back(what);
  }
}

void check_memberships(CheckResult& r, const Certificate& c) {
  expect(r, c.point.has_value(), "point missing");
  if (!c.point) return;
  if (c.digits && c.evidence.contains("digit_value") && c.claim.contains("system")) {
    const MixedRadixSystem sys = system_from_json(c.claim.at("system"));
    const Rational v = eval_word(DigitWord{sys, *c.digits});
    expect(r, to_string(v) == c.evidence.at("digit_value").get<std::string>(), "digits do not evaluate to digit_value");
  }
  for (const auto& m : c.memberships) {
    const Rational value = (m.sign < 0 ? -*c.point : *c.point) + m.offset;
    expect(r, value == m.value, m.label + ": value does not match point and offset");
    const DigitSetExpr set = parse_descriptor(m.set);
    const bool member = member_at_depth(set, value, m.depth);
    expect(r, member == m.ok, m.label + ": membership disagrees");
    if (c.status == Status::PointFound) expect(r, member, m.label + ": not a member");
  }
}

CantorWitness witness_by_name(const std::string& name) {
  static const std::regex cl(R"(cl-witness\((\d+)\))");
  std::smatch mt;
  if (std::regex_match(name, mt, cl)) return build_cl_witness(std::stoll(mt[1].str()));
  if (name == "notideal-D") return build_notideal_D();
  if (name == "notideal-E") return build_notideal_E();
  throw Error(ErrorCode::ParseError, "unknown witness '" + name + "'");
}

}  // namespace

CheckResult check_certificate(const Certificate& c) {
  CheckResult r;
  r.checked = 1;
  try {
    const std::string kind = c.claim.at("kind").get<std::string>();
    if (kind == "empty_intersection") {
      if (c.status == Status::CertifiedEmpty) {
        const DigitSetExpr set = parse_descriptor(c.claim.at("set"));
        const auto t = rationals_of(c.claim.at("translates"));
        const auto p = rationals_of(c.claim.at("pads"));
        std::vector<TranslatePart> parts;
        for (std::size_t i = 0; i < t.size(); ++i) parts.push_back(TranslatePart{set, t[i], p.at(i)});
        expect(r, intersect_translates(parts, c.depth).empty, "intersection is not empty at the stated depth");
      }
    } else if (kind == "gap_sequence") {
      if (c.status == Status::CertifiedEmpty) {
        const DigitSetExpr set = parse_descriptor(c.claim.at("set"));
        for (const auto& g : rationals_of(c.claim.at("gaps"))) {
          const std::vector<TranslatePart> parts{{set, Rational(0), Rational(0)}, {set, g, Rational(0)}};
          expect(r, intersect_translates(parts, c.depth).empty, "gap " + to_string(g) + " not certified");
        }
      }
    } else if (kind == "slot_cover") {
      const CantorWitness w = witness_by_name(c.claim.at("witness").get<std::string>());
      const auto tuple = c.claim.at("tuple").get<std::vector<std::uint64_t>>();
      const Certificate again = certify_slot_cover(w, c.claim.at("generation").get<std::size_t>(), tuple);
      expect(r, again.status == c.status, "slot cover status differs");
    } else if (kind == "fixed_point") {
      const DigitSetExpr set = parse_descriptor(c.claim.at("set"));
      std::vector<Interval> raw;
      for (const auto& iv : c.claim.at("candidate")) {
        raw.push_back(Interval{parse_rational(iv.at(0).get<std::string>()), parse_rational(iv.at(1).get<std::string>())});
      }
      const Certificate again = refute_haar1_difference_interval(set, IntervalUnion::normalize(raw));
      expect(r, again.verdict == c.verdict, "fixed-point verdict differs");
    } else if (kind == "common_point" || kind == "null_finite" || kind == "carry") {
      if (c.status == Status::PointFound) check_memberships(r, c);
      if (kind == "carry" && c.status == Status::PointFound) {
        expect(r, c.evidence.value("carry_identity_exact", false), "carry identity not exact");
      }
      if (kind == "null_finite" && c.verdict == "VACUOUS") expect(r, c.claim.at("count").get<std::size_t>() == 0, "vacuous with N > 0");
    } else if (kind == "separation") {
      const Certificate again = step4_separation(c.claim.at("k").get<std::size_t>(), c.depth);
      expect(r, again.status == c.status, "separation status differs");
    } else if (kind == "avoiding_pairs") {
      const auto again = cantor_avoiding_pairs(rationals_of(c.claim.at("points")), c.claim.at("generation").get<std::size_t>());
      expect(r, again.certificate.status == c.status, "avoiding-pairs status differs");
      expect(r, again.certificate.claim.at("lengths") == c.claim.at("lengths"), "block lengths differ");
    } else if (kind == "projection") {
      const Certificate again = describe_construction(c.claim.at("identifier").get<std::string>(), c.depth);
      expect(r, again.evidence.at("pieces") == c.evidence.at("pieces"), "projection piece count differs");
      if (c.evidence.contains("projection")) {
        expect(r, again.evidence.at("projection") == c.evidence.at("projection"), "projection differs");
      }
    } else if (kind == "L_bounds") {
      const auto rep = check_L_bounds(c.claim.at("n_max").get<std::size_t>());
      expect(r, rep.ok == (c.status == Status::Verified), "L bounds differ");
    } else if (kind == "pigeonhole") {
      bool all = true;
      const auto n_max = c.claim.at("n_max").get<std::int64_t>();
      for (std::int64_t n = 0; n <= n_max; ++n) {
        for (std::int64_t l = 0; l <= n; ++l) all = all && pigeonhole_bound_holds(l, n);
      }
      expect(r, all == (c.status == Status::Verified), "pigeonhole bound differs");
    } else {
      expect(r, false, "unknown claim kind '" + kind + "'");
    }
  } catch (const Error& e) {
    expect(r, false, e.what());
  } catch (const json::exception& e) {
    expect(r, false, std::string("malformed claim: ") + e.what());
  }
  return r;
}

CheckResult check_document(const json& document) {
  CheckResult total;
  std::vector<Certificate> certs;
  if (document.contains("certificates")) {
    certs = Report::from_json(document).certificates;
  } else {
    certs.push_back(Certificate::from_json(document));
  }
  for (std::size_t i = 0; i < certs.size(); ++i) {
    const CheckResult r = check_certificate(certs[i]);
    total.checked += r.checked;
    if (!r.ok) {
      total.ok = false;
      for (const auto& f : r.failures) total.failures.push_back("certificate " + std::to_string(i) + ": " + f);
    }
  }
  return total;
}

}  // namespace haarlab
