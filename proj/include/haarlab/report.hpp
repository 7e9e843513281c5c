#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "haarlab/certifier.hpp"

namespace haarlab {

// Top-level document written by the CLI: one verdict over a list of
// certificates.
struct Report {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::string verdict;
  std::vector<Certificate> certificates;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::int64_t elapsed_ms = 0;

  nlohmann::ordered_json to_json() const;
  static Report from_json(const nlohmann::json& j);
};

Report make_report(std::string command, const HaarReport& haar);
Report make_report(std::string command, Certificate certificate);

// Construction summary with its depth-k projection.
Certificate describe_construction(const std::string& identifier, std::size_t depth);

struct CheckResult {
  bool ok = true;
  std::size_t checked = 0;
  std::vector<std::string> failures;
};

// Recomputes a certificate from its claim, independently of the search that
// produced it: emptiness by a fresh engine run, points by fresh membership
// tests, structural facts by recomputation.
CheckResult check_certificate(const Certificate& certificate);
// Accepts a report or a bare certificate.
CheckResult check_document(const nlohmann::json& document);

}  // namespace haarlab
