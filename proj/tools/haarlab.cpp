#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "haarlab/certifier.hpp"
#include "haarlab/constructions.hpp"
#include "haarlab/error.hpp"
#include "haarlab/report.hpp"

using namespace haarlab;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Common {
  bool as_json = false;
  std::string output;
  std::size_t depth = 0;
  std::size_t max_depth = 0;
  unsigned workers = 1;
};

void add_common(CLI::App* app, Common& c, std::size_t default_depth) {
  app->preparse_callback([&c, default_depth](std::size_t) { c.depth = default_depth; });
  app->add_flag("--json", c.as_json, "Print the report as JSON");
  app->add_option("--output,-o", c.output, "Also write the JSON report to this file");
  app->add_option("--depth", c.depth, "Projection depth")->check(CLI::PositiveNumber);
  app->add_option("--max-depth", c.max_depth, "Double the depth while inconclusive, up to this cap");
  app->add_option("--workers", c.workers, "Worker threads for tuple checks")->check(CLI::PositiveNumber);
}

std::vector<Rational> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open points file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::vector<Rational> out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '[') {
    try {
      for (const auto& v : json::parse(text)) out.push_back(parse_rational(v.get<std::string>()));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("points file: ") + e.what());
    }
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    line = line.substr(0, line.find('#'));
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      if (token.back() == ',') token.pop_back();
      if (!token.empty()) out.push_back(parse_rational(token));
    }
  }
  return out;
}

std::vector<Rational> parse_list(const std::vector<std::string>& items) {
  std::vector<Rational> out;
  for (const auto& s : items) out.push_back(parse_rational(s));
  return out;
}

std::vector<std::int64_t> parse_digits(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad digit '" + item + "'");
    }
  }
  return out;
}

bool settled(const Report& r) {
  for (const auto& c : r.certificates) {
    if (c.status == Status::Inconclusive) return false;
  }
  return r.verdict != "INCONCLUSIVE";
}

// Runs at the requested depth, doubling while inconclusive up to the cap.
Report escalate(const Common& c, const std::function<Report(std::size_t)>& run) {
  std::size_t depth = c.depth;
  Report r = run(depth);
  std::size_t rounds = 0;
  while (!settled(r) && depth * 2 <= c.max_depth) {
    depth *= 2;
    ++rounds;
    r = run(depth);
  }
  r.config["depth"] = c.depth;
  r.config["depth_used"] = depth;
  r.config["escalations"] = rounds;
  return r;
}

void print_summary(const Report& r) {
  std::cout << r.command << ": " << r.verdict << "\n";
  if (r.summary.contains("tuples")) {
    std::cout << "  tuples " << r.summary["tuples"] << ", certified " << r.summary["certified"] << ", inconclusive "
              << r.summary["inconclusive"] << "\n";
  }
  if (r.config.contains("depth_used")) std::cout << "  depth " << r.config["depth_used"] << "\n";
  if (r.certificates.size() == 1) {
    const auto& c = r.certificates.front();
    std::cout << "  status " << to_string(c.status) << "\n";
    if (c.point) std::cout << "  point " << to_string(*c.point) << "\n";
    for (const auto& m : c.memberships) {
      std::cout << "  " << (m.ok ? "ok   " : "FAIL ") << m.label << " = " << to_string(m.value) << "\n";
    }
    for (const auto& iv : c.residual) {
      std::cout << "  residual [" << to_string(iv.lo) << ", " << to_string(iv.hi) << "]\n";
    }
  } else {
    std::size_t shown = 0;
    for (const auto& c : r.certificates) {
      if (c.status != Status::Inconclusive || shown >= 5) continue;
      ++shown;
      std::cout << "  inconclusive: " << c.claim.value("branches", ordered_json::array()).dump() << "\n";
    }
  }
  std::cout << "  elapsed " << r.elapsed_ms << " ms\n";
}

int emit(const Common& c, const Report& r) {
  const ordered_json j = r.to_json();
  if (!c.output.empty()) {
    std::ofstream out(c.output);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + c.output + "'");
    out << j.dump(2) << "\n";
  }
  if (c.as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    print_summary(r);
  }
  return settled(r) ? 0 : 2;
}

DigitSetExpr set_by_name(const std::string& name) { return make(name).expr; }

std::vector<Rational> gaps_for(const NamedConstruction& nc, std::size_t count) {
  if (nc.name.rfind("gap(", 0) == 0) return gap_sequence(nc.params.at("m").get<std::int64_t>(), count);
  if (nc.name.rfind("haar_family(", 0) == 0 && nc.params.contains("m")) {
    return haar_family_gaps(nc.params.at("n").get<std::int64_t>(), nc.params.at("m").get<std::int64_t>(), count);
  }
  throw Error(ErrorCode::InvalidArgument, "no closed-form gap sequence for '" + nc.name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* cap = std::getenv("HAARLAB_MAX_INTERVALS")) {
    try {
      set_interval_cap(std::stoul(cap));
    } catch (const std::exception&) {
      std::cerr << "error: HAARLAB_MAX_INTERVALS must be a positive integer\n";
      return 1;
    }
  }

  CLI::App app{"haarlab: exact certificates for translates of digit-defined compact sets"};
  app.require_subcommand(1);
  std::function<Report()> job;
  Common common;

  // ------------------------------------------------------------ verify
  auto* verify = app.add_subcommand("verify", "Certify emptiness of translate intersections");
  verify->require_subcommand(1);

  std::size_t generation = 2;
  auto* tern = verify->add_subcommand("ternary-haar2", "All triples of the ternary witness at one generation");
  add_common(tern, common, 40);
  tern->add_option("--generation", generation, "Witness generation")->check(CLI::Range(1, 12));
  tern->callback([&] {
    job = [&] {
      const auto witness = build_ternary_haar2_witness();
      return escalate(common, [&](std::size_t depth) {
        auto r = make_report("verify ternary-haar2",
                             verify_haar_n(ternary_cantor(), witness, 3, generation, depth, common.workers));
        r.config["generation"] = generation;
        return r;
      });
    };
  });

  std::int64_t level_l = 0;
  std::size_t samples = 1;
  std::uint64_t seed = 1;
  std::size_t slot_generation = 0;
  auto add_slot_options = [&](CLI::App* cmd) {
    add_common(cmd, common, 1);
    cmd->add_option("--generation", slot_generation, "Witness generation (default: first admissible)");
    cmd->add_option("--samples", samples, "Sampled tuples")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Sampling seed");
  };
  auto slot_job = [&](std::string command, std::function<CantorWitness()> build) {
    return [&, command, build] {
      const CantorWitness w = build();
      const std::size_t g = slot_generation == 0 ? w.first_generation() : slot_generation;
      auto r = make_report(command, verify_sampled_tuples(w, g, samples, seed));
      r.config["generation"] = g;
      r.config["samples"] = samples;
      r.config["seed"] = seed;
      return r;
    };
  };
  auto* clcmd = verify->add_subcommand("cl-haarN", "Sampled tuples of the C_l witness");
  add_slot_options(clcmd);
  clcmd->add_option("--l", level_l, "Level l")->check(CLI::Range(0, 3));
  clcmd->callback([&] { job = slot_job("verify cl-haarN", [&] { return build_cl_witness(level_l); }); });
  auto* dcmd = verify->add_subcommand("notideal-D", "Sampled tuples of the D witness");
  add_slot_options(dcmd);
  dcmd->callback([&] { job = slot_job("verify notideal-D", [] { return build_notideal_D(); }); });
  auto* ecmd = verify->add_subcommand("notideal-E", "Sampled tuples of the E witness");
  add_slot_options(ecmd);
  ecmd->callback([&] { job = slot_job("verify notideal-E", [] { return build_notideal_E(); }); });

  std::string set_name;
  std::size_t gap_count = 0;
  auto* gaps = verify->add_subcommand("haar1-gaps", "Translates by a gap sequence miss the set");
  add_common(gaps, common, 16);
  gaps->add_option("--set", set_name, "Construction identifier, e.g. gap(5) or haar_family(1,0)")->required();
  gaps->add_option("--count", gap_count, "Number of gaps (default 11 for gap(m), 9 otherwise)");
  gaps->callback([&] {
    job = [&] {
      const NamedConstruction nc = make(set_name);
      const std::size_t count = gap_count ? gap_count : (nc.name.rfind("gap(", 0) == 0 ? 11 : 9);
      const auto seq = gaps_for(nc, count);
      if (common.max_depth == 0) common.max_depth = 256;
      return escalate(common, [&](std::size_t depth) {
        auto r = make_report("verify haar1-gaps", certify_haar1_gap_sequence(nc.expr, seq, depth));
        r.config["set"] = nc.name;
        return r;
      });
    };
  });

  std::vector<std::string> translates_text, pads_text;
  auto* inter = verify->add_subcommand("intersection", "Emptiness of a padded translate intersection");
  add_common(inter, common, 8);
  inter->add_option("--set", set_name, "Construction identifier")->required();
  inter->add_option("--translate", translates_text, "Exact translates p/q")->required();
  inter->add_option("--pad", pads_text, "Half-open pads p/q, one per translate");
  inter->callback([&] {
    job = [&] {
      const auto set = set_by_name(set_name);
      const auto t = parse_list(translates_text);
      const auto p = parse_list(pads_text);
      return escalate(common, [&](std::size_t depth) {
        return make_report("verify intersection", certify_empty_intersection(set, t, p, depth));
      });
    };
  });

  std::size_t k_tilde = 0;
  auto* sep = verify->add_subcommand("separation", "Shifted A-tail stays 1/q(k) away from A");
  add_common(sep, common, 3);
  sep->add_option("--k", k_tilde, "Level k")->check(CLI::Range(0, 2));
  sep->callback([&] {
    job = [&] { return make_report("verify separation", step4_separation(k_tilde, std::max(common.depth, k_tilde + 1))); };
  });

  std::size_t n_max = 8;
  auto* lb = verify->add_subcommand("l-bounds", "Exact bounds on the L sets and the pigeonhole count");
  add_common(lb, common, 1);
  lb->add_option("--n-max", n_max, "Largest n")->check(CLI::Range(0, 18));
  lb->callback([&] {
    job = [&] {
      const auto rep = check_L_bounds(n_max);
      Certificate c;
      c.claim["kind"] = "L_bounds";
      c.claim["n_max"] = n_max;
      c.status = rep.ok ? Status::Verified : Status::Inconclusive;
      ordered_json rows = ordered_json::array();
      for (const auto& row : rep.rows) {
        rows.push_back({{"n", row.n}, {"max", to_string(row.max_l)}, {"min", to_string(row.min_l)},
                        {"m", to_string(row.m)}, {"max_below", row.max_below}, {"min_above", row.min_above},
                        {"no_consecutive", row.no_consecutive}});
      }
      c.evidence["rows"] = rows;
      Report r = make_report("verify l-bounds", c);
      Certificate p;
      p.claim["kind"] = "pigeonhole";
      p.claim["n_max"] = n_max;
      bool all = true;
      for (std::size_t n = 0; n <= n_max; ++n) {
        for (std::size_t l = 0; l <= n; ++l) {
          all = all && pigeonhole_bound_holds(static_cast<std::int64_t>(l), static_cast<std::int64_t>(n));
        }
      }
      p.status = all ? Status::Verified : Status::Inconclusive;
      r.certificates.push_back(p);
      r.verdict = rep.ok && all ? "VERIFIED" : "INCONCLUSIVE";
      return r;
    };
  });

  std::string points_path;
  auto* avoid = verify->add_subcommand("avoiding-pairs", "Witness meeting each translate of a point set at most once");
  add_common(avoid, common, 1);
  std::size_t avoid_generation = 3;
  avoid->add_option("--points", points_path, "File of exact rationals")->required();
  avoid->add_option("--generation", avoid_generation, "Pair-check generation")->check(CLI::Range(1, 12));
  avoid->callback([&] {
    job = [&] {
      auto res = cantor_avoiding_pairs(read_points(points_path), avoid_generation);
      return make_report("verify avoiding-pairs", res.certificate);
    };
  });

  // ------------------------------------------------------------ refute
  auto* refute = app.add_subcommand("refute", "Find explicit points or fixed-point identities");
  refute->require_subcommand(1);

  std::vector<std::string> candidate;
  auto* h1 = refute->add_subcommand("haar1", "Difference-set fixed point");
  add_common(h1, common, 1);
  h1->add_option("--set", set_name, "Construction identifier")->required();
  h1->add_option("--candidate-interval", candidate, "LO HI, exact")->expected(2)->required();
  h1->callback([&] {
    job = [&] {
      const auto iv = parse_list(candidate);
      return make_report("refute haar1", refute_haar1_difference_interval(set_by_name(set_name), IntervalUnion::closed(iv[0], iv[1])));
    };
  });

  std::string family;
  auto* hn = refute->add_subcommand("haarN", "Common point of the n+1 family members via carries");
  add_common(hn, common, 30);
  hn->add_option("--family", family, "haar_family(n)")->required();
  hn->add_option("--points", points_path, "Anchors x_0 < ... < x_n (default m/(25(n+1)))");
  hn->callback([&] {
    job = [&] {
      const NamedConstruction nc = make(family);
      if (!nc.params.contains("n") || nc.params.contains("m")) {
        throw Error(ErrorCode::InvalidArgument, "expected haar_family(n)");
      }
      const std::int64_t n = nc.params.at("n").get<std::int64_t>();
      std::vector<Rational> anchors;
      if (points_path.empty()) {
        for (std::int64_t m = 0; m <= n; ++m) anchors.push_back(make_rational(m, 25 * (n + 1)));
      } else {
        anchors = read_points(points_path);
      }
      return make_report("refute haarN", carry_intersection_point(n, anchors, common.depth));
    };
  });

  auto* hfx = refute->add_subcommand("haar-finite-X", "Point hit by every translate of X");
  add_common(hfx, common, 4);
  hfx->add_option("--points", points_path, "Decreasing translates (default 2/5 1/30 1/2000)");
  hfx->callback([&] {
    job = [&] {
      const auto t = points_path.empty()
                         ? std::vector<Rational>{make_rational(2, 5), make_rational(1, 30), make_rational(1, 2000)}
                         : read_points(points_path);
      return make_report("refute haar-finite-X", refute_haar_finite_X(t, common.depth));
    };
  });

  std::string limit_text = "0";
  std::size_t count = 3;
  auto* nfy = refute->add_subcommand("null-finite-Y", "Point hit by N terms of a monotone sequence");
  add_common(nfy, common, 4);
  nfy->add_option("--points", points_path, "Monotone sequence")->required();
  nfy->add_option("--limit", limit_text, "Limit of the sequence, exact");
  nfy->add_option("--count", count, "N");
  nfy->callback([&] {
    job = [&] {
      return make_report("refute null-finite-Y",
                         refute_null_finite(read_points(points_path), parse_rational(limit_text), count, common.depth));
    };
  });

  std::string prefix_text;
  std::size_t sparse_generations = 2;
  auto* hc = refute->add_subcommand("haar-countable", "Point hit by every supplied witness point");
  add_common(hc, common, 8);
  hc->add_option("--set", set_name, "nullmeager or nullmeager(k_0,k_1,...)");
  hc->add_option("--points", points_path, "Witness points (default: sparse scaled-ternary extraction)");
  hc->add_option("--generations", sparse_generations, "Extraction generations when no points are given")
      ->check(CLI::Range(1, 4));
  hc->add_option("--prefix", prefix_text, "Fixed prefix digits, comma separated");
  hc->callback([&] {
    job = [&] {
      const auto set = set_by_name(set_name.empty() ? "nullmeager" : set_name);
      std::vector<Rational> pts;
      if (points_path.empty()) {
        const auto sparse = extract_sparse_subcantor(scaled_ternary_tree(), set.system(), sparse_generations);
        for (const auto& p : generation_points(sparse.witness, sparse_generations)) pts.push_back(p.value);
      } else {
        pts = read_points(points_path);
      }
      return make_report("refute haar-countable", refute_haar_countable(set, pts, common.depth, parse_digits(prefix_text)));
    };
  });

  std::int64_t lem_l = 0;
  auto* lem = refute->add_subcommand("lem1", "Common point of C_l and its translates below a prefix cell");
  add_common(lem, common, 3);
  lem->add_option("--l", lem_l, "Level l")->check(CLI::Range(0, 3));
  lem->add_option("--points", points_path, "Translates")->required();
  lem->add_option("--prefix", prefix_text, "Prefix digits s, comma separated");
  lem->callback([&] {
    job = [&] {
      return make_report("refute lem1", lem1_common_point(lem_l, parse_digits(prefix_text), read_points(points_path), common.depth));
    };
  });

  // ------------------------------------------------------------ construct
  std::string emit_path;
  auto* cons = app.add_subcommand("construct", "Describe a named construction and its projection");
  add_common(cons, common, 2);
  cons->add_option("--name", set_name, "Construction identifier")->required();
  cons->add_option("--emit", emit_path, "Write the set descriptor JSON here");
  cons->callback([&] {
    job = [&] {
      Certificate c = describe_construction(set_name, common.depth);
      if (!emit_path.empty()) {
        std::ofstream out(emit_path);
        if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + emit_path + "'");
        out << c.claim["descriptor"].dump(2) << "\n";
      }
      return make_report("construct", c);
    };
  });

  // ------------------------------------------------------------ check
  std::string check_path;
  auto* chk = app.add_subcommand("check", "Re-verify a report or certificate file");
  chk->add_option("file", check_path, "Report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (chk->parsed()) {
      std::ifstream in(check_path);
      if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + check_path + "'");
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
      }
      const CheckResult r = check_document(doc);
      for (const auto& f : r.failures) std::cout << "FAIL " << f << "\n";
      std::cout << (r.ok ? "OK" : "FAILED") << ": " << r.checked << " certificate(s) re-verified\n";
      return r.ok ? 0 : 1;
    }
    if (!job) throw Error(ErrorCode::InvalidArgument, "no command");
    return emit(common, job());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
