// Command-line surface over the hierarchy library. Exit codes: 0 success,
// 1 domain errors (failed preconditions, no reduction), 2 parse errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fh/category.hpp"
#include "fh/family.hpp"
#include "fh/hausdorff.hpp"
#include "fh/hierarchy.hpp"
#include "fh/ordinal.hpp"
#include "fh/selftest.hpp"
#include "fh/space.hpp"
#include "fh/tree.hpp"

using json = nlohmann::ordered_json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fh::parse_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(bool as_json, const json& j, const std::string& text) {
  if (as_json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

std::string status_name(fh::MembershipResult::Status s) {
  switch (s) {
    case fh::MembershipResult::Status::member: return "member";
    case fh::MembershipResult::Status::non_member: return "non-member";
    default: return "unknown_budget_exhausted";
  }
}

std::string addr_str(const fh::NodeAddr& a) {
  if (a.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ".";
    s += std::to_string(a[i]);
  }
  return s;
}

json witness_json(const fh::HWitness& w) {
  json m = json::array();
  for (const auto& [from, to] : w.map)
    m.push_back({{"from", addr_str(from)}, {"to", addr_str(to)}});
  return m;
}

int run_tree_compare(const std::string& a_path, const std::string& b_path, int k,
                     bool as_json) {
  fh::IterTree a = fh::parse_tree(slurp(a_path), k);
  fh::IterTree b = fh::parse_tree(slurp(b_path), k);
  fh::HResult ab = fh::h_leq(a, b);
  fh::HResult ba = fh::h_leq(b, a);
  std::string verdict = ab.holds ? (ba.holds ? "equivalent" : "below")
                                 : (ba.holds ? "above" : "incomparable");
  json j{{"verdict", verdict}};
  if (ab.holds && ab.witness) j["forward_map"] = witness_json(*ab.witness);
  if (ba.holds && ba.witness) j["backward_map"] = witness_json(*ba.witness);
  std::ostringstream t;
  t << verdict << "\n";
  emit(as_json, j, t.str());
  return 0;
}

int run_tree_linearize(const std::string& path, int k, bool as_json) {
  std::istringstream in(slurp(path));
  std::string line;
  std::vector<fh::IterTree> trees;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    trees.push_back(fh::parse_tree(line, k));
  }
  fh::LinearizeResult r = fh::linearize(trees);
  if (r.violation) {
    json j{{"error", "not linearizable"},
           {"pair", {r.violation->first, r.violation->second}}};
    emit(as_json, j,
         "not linearizable: trees " + std::to_string(r.violation->first) + " and " +
             std::to_string(r.violation->second) +
             " are incomparable and not dual\n");
    return 1;
  }
  json classes = json::array();
  std::ostringstream t;
  for (const auto& c : r.classes) {
    json members = json::array();
    t << "rank " << c.rank << ":";
    for (std::size_t i : c.members) {
      members.push_back(i);
      t << " " << fh::to_string(trees[i]);
    }
    t << "\n";
    classes.push_back({{"rank", c.rank}, {"members", members}});
  }
  emit(as_json, json{{"classes", classes}}, t.str());
  return 0;
}

int run_space_load(const std::string& path, bool as_json) {
  fh::SpaceModel sp = fh::parse_space(slurp(path));
  auto opens = fh::enumerate_opens(sp);
  json j{{"kind", sp.is_poset() ? "poset" : "cylinder"},
         {"points", sp.point_count()},
         {"opens", opens.size()}};
  std::ostringstream t;
  t << (sp.is_poset() ? "poset" : "cylinder") << " with " << sp.point_count()
    << " points, " << opens.size() << " open sets\n";
  emit(as_json, j, t.str());
  return 0;
}

int run_family_validate(const std::string& fam_path, const std::string& space_path,
                        bool as_json) {
  fh::SpaceModel sp = fh::parse_space(slurp(space_path));
  fh::TFamily f = fh::parse_family(slurp(fam_path), sp);
  fh::ValidationReport rep = fh::validate(f);
  json problems = json::array();
  for (const auto& p : rep.problems) problems.push_back(p);
  json j{{"wellformed", rep.wellformed},
         {"monotone", rep.monotone},
         {"reduced", rep.monotone && fh::is_reduced(f)},
         {"problems", problems}};
  std::ostringstream t;
  t << "wellformed: " << (rep.wellformed ? "yes" : "no") << "\n"
    << "monotone: " << (rep.monotone ? "yes" : "no") << "\n";
  if (rep.monotone) t << "reduced: " << (fh::is_reduced(f) ? "yes" : "no") << "\n";
  for (const auto& p : rep.problems) t << "problem: " << p << "\n";
  emit(as_json, j, t.str());
  return rep.monotone ? 0 : 1;
}

int run_family_reduce(const std::string& fam_path, const std::string& space_path,
                      bool as_json) {
  fh::SpaceModel sp = fh::parse_space(slurp(space_path));
  fh::TFamily f = fh::parse_family(slurp(fam_path), sp);
  fh::TFamily g = fh::reduce_family(f);
  json j{{"family", fh::to_string(g)}, {"reduced", fh::is_reduced(g)}};
  emit(as_json, j, fh::to_string(g));
  return 0;
}

int run_family_eval(const std::string& fam_path, const std::string& space_path,
                    bool as_json) {
  fh::SpaceModel sp = fh::parse_space(slurp(space_path));
  fh::TFamily f = fh::parse_family(slurp(fam_path), sp);
  fh::DetermineResult d = fh::determine(f);
  json points = json::array();
  std::ostringstream t;
  for (std::size_t x = 0; x < sp.point_count(); ++x) {
    fh::EvalResult e = fh::evaluate(f, x);
    json labels = json::array();
    t << sp.point_name(x) << ":";
    for (int l : e.labels) {
      labels.push_back(l);
      t << " " << l;
    }
    t << "\n";
    points.push_back({{"point", sp.point_name(x)}, {"labels", labels}});
  }
  json j{{"points", points}, {"determined", static_cast<bool>(d)}};
  if (d) {
    j["partition"] = fh::to_string(*d.partition);
    t << "determined partition:\n" << fh::to_string(*d.partition);
  } else {
    std::string kind =
        d.failure == fh::DetermineResult::Failure::conflict ? "conflict" : "uncovered";
    j["failure"] = {{"kind", kind}, {"point", sp.point_name(d.point)}};
    t << "undetermined: " << kind << " at " << sp.point_name(d.point) << "\n";
  }
  emit(as_json, j, t.str());
  return 0;
}

int run_classify(const std::string& part_path, const std::string& space_path,
                 int max_nodes, const fh::Budget& budget, bool as_json) {
  fh::SpaceModel sp = fh::parse_space(slurp(space_path));
  fh::KPartition a = fh::parse_partition(slurp(part_path), sp);
  std::vector<fh::IterTree> trees = fh::enumerate_trees(a.k, 1, max_nodes);
  fh::Classification c = fh::classify(a, trees, budget);
  json verdicts = json::array();
  std::ostringstream t;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    verdicts.push_back({{"tree", fh::to_string(trees[i])},
                        {"status", status_name(c.verdicts[i])}});
    t << fh::to_string(trees[i]) << ": " << status_name(c.verdicts[i]) << "\n";
  }
  json minimal = json::array();
  t << "minimal positions:";
  for (std::size_t i : c.minimal_members) {
    minimal.push_back(fh::to_string(trees[i]));
    t << " " << fh::to_string(trees[i]);
  }
  t << "\n";
  json j{{"verdicts", verdicts},
         {"minimal", minimal},
         {"upward_closed", c.upward_closed}};
  emit(as_json, j, t.str());
  return 0;
}

int run_category_image(const std::string& map_path, const std::string& dom_path,
                       const std::string& cod_path, const std::string& set_path,
                       bool as_json) {
  fh::SpaceModel dom = fh::parse_space(slurp(dom_path));
  fh::SpaceModel cod = fh::parse_space(slurp(cod_path));
  fh::SpaceMap f = fh::parse_map(slurp(map_path), dom, cod);
  fh::SetRep s = fh::parse_set(slurp(set_path), dom);
  fh::SetRep r = fh::category_image(f, s);
  json j{{"image", fh::to_string(r)},
         {"direct_image", fh::to_string(fh::image(f, s))}};
  emit(as_json, j, "category image: " + fh::to_string(r) + "\n");
  return 0;
}

int run_preservation_check(const std::string& map_path, const std::string& dom_path,
                           const std::string& cod_path, const std::string& part_path,
                           const std::string& tree_path, const fh::Budget& budget,
                           bool as_json) {
  fh::SpaceModel dom = fh::parse_space(slurp(dom_path));
  fh::SpaceModel cod = fh::parse_space(slurp(cod_path));
  fh::SpaceMap f = fh::parse_map(slurp(map_path), dom, cod);
  fh::KPartition a = fh::parse_partition(slurp(part_path), cod);
  fh::IterTree shape = fh::parse_tree(slurp(tree_path), a.k);
  fh::PreservationReport rep = fh::check_preservation(f, a, shape, budget);
  json j{{"applicable", rep.applicable},
         {"codomain", status_name(rep.codomain_side.status)},
         {"domain", status_name(rep.domain_side.status)},
         {"decided", rep.decided},
         {"agrees", rep.agrees}};
  if (!rep.applicable) j["reason"] = rep.reason;
  std::ostringstream t;
  t << "applicable: " << (rep.applicable ? "yes" : "no");
  if (!rep.applicable) t << " (" << rep.reason << ")";
  t << "\ncodomain side: " << status_name(rep.codomain_side.status)
    << "\ndomain side: " << status_name(rep.domain_side.status) << "\n";
  if (rep.decided) t << "agreement: " << (rep.agrees ? "yes" : "no") << "\n";
  emit(as_json, j, t.str());
  if (!rep.applicable) return 1;
  return rep.decided && !rep.agrees ? 1 : 0;
}

int run_hausdorff_extract(const std::string& table_path, bool verify, bool as_json) {
  fh::GuessTable t = fh::parse_guess_table(slurp(table_path));
  fh::HausdorffExtraction ex = fh::hausdorff_extract(t);
  json j{{"tree", fh::to_string(ex.tree)},
         {"family", fh::to_string(ex.family)},
         {"levels", ex.rseq.levels.size()}};
  std::ostringstream out;
  out << "tree: " << fh::to_string(ex.tree) << "\n";
  out << fh::to_string(ex.family);
  if (verify) {
    fh::DetermineResult d = fh::determine(ex.family);
    std::size_t match = 0;
    const std::size_t n = ex.space->point_count();
    if (d)
      for (std::size_t p = 0; p < n; ++p)
        if ((*d.partition)(p) == ex.limit_values[p]) ++match;
    j["limit_match"] = std::to_string(match) + "/" + std::to_string(n);
    out << "limit-match: " << match << "/" << n << "\n";
    emit(as_json, j, out.str());
    return match == n ? 0 : 1;
  }
  emit(as_json, j, out.str());
  return 0;
}

int run_selftest(std::uint64_t seed, bool as_json) {
  auto results = fh::run_selftests(seed);
  json suites = json::array();
  std::ostringstream t;
  bool ok = true;
  for (const auto& r : results) {
    suites.push_back({{"name", r.name}, {"ok", r.ok}, {"detail", r.detail}});
    t << (r.ok ? "ok   " : "FAIL ") << r.name;
    if (!r.detail.empty()) t << ": " << r.detail;
    t << "\n";
    ok = ok && r.ok;
  }
  emit(as_json, json{{"suites", suites}, {"ok", ok}}, t.str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite models of the fine hierarchy of k-partitions"};
  app.require_subcommand(1);
  bool as_json = false;
  fh::Budget budget;
  std::uint64_t seed = 0;
  app.add_flag("--json", as_json, "structured output");
  app.add_option("--budget-nodes", budget.max_nodes, "witness search node budget");
  app.add_option("--budget-depth", budget.max_depth, "witness search depth budget");
  app.add_option("--seed", seed, "seed for randomized suites");

  std::string file_a, file_b, space_path, set_path, tree_path;
  int k = 2, max_nodes = 3;
  bool verify = false;

  auto* tc = app.add_subcommand("tree-compare", "h-preorder comparison of two trees");
  tc->add_option("a", file_a)->required();
  tc->add_option("b", file_b)->required();
  tc->add_option("--k", k, "label arity");

  auto* tl = app.add_subcommand("tree-linearize", "rank a list of trees");
  tl->add_option("trees", file_a, "file with one tree per line")->required();
  tl->add_option("--k", k, "label arity");

  auto* sl = app.add_subcommand("space-load", "parse and summarize a space");
  sl->add_option("space", file_a)->required();

  auto* fv = app.add_subcommand("family-validate", "check family invariants");
  fv->add_option("family", file_a)->required();
  fv->add_option("--space", space_path)->required();

  auto* fr = app.add_subcommand("family-reduce", "compute the reduct");
  fr->add_option("family", file_a)->required();
  fr->add_option("--space", space_path)->required();

  auto* fe = app.add_subcommand("family-eval", "determine and evaluate pointwise");
  fe->add_option("family", file_a)->required();
  fe->add_option("--space", space_path)->required();

  auto* cl = app.add_subcommand("classify", "hierarchy positions of a partition");
  cl->add_option("partition", file_a)->required();
  cl->add_option("--space", space_path)->required();
  cl->add_option("--max-nodes", max_nodes, "tree size cap for the position sample");

  auto* ci = app.add_subcommand("category-image", "Baire-category pushforward of a set");
  ci->add_option("map", file_a)->required();
  ci->add_option("--dom", file_b)->required();
  ci->add_option("--cod", space_path)->required();
  ci->add_option("--set", set_path)->required();

  auto* pc = app.add_subcommand("preservation-check", "position transfer along a quotient");
  pc->add_option("map", file_a)->required();
  pc->add_option("--dom", file_b)->required();
  pc->add_option("--cod", space_path)->required();
  pc->add_option("--partition", set_path)->required();
  pc->add_option("--tree", tree_path)->required();

  auto* he = app.add_subcommand("hausdorff-extract", "tree and family from a guess table");
  he->add_option("table", file_a)->required();
  he->add_flag("--verify", verify, "check the family against the limit partition");

  auto* st = app.add_subcommand("selftest", "cross-module invariant suites");
  (void)st;

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (tc->parsed()) return run_tree_compare(file_a, file_b, k, as_json);
    if (tl->parsed()) return run_tree_linearize(file_a, k, as_json);
    if (sl->parsed()) return run_space_load(file_a, as_json);
    if (fv->parsed()) return run_family_validate(file_a, space_path, as_json);
    if (fr->parsed()) return run_family_reduce(file_a, space_path, as_json);
    if (fe->parsed()) return run_family_eval(file_a, space_path, as_json);
    if (cl->parsed()) return run_classify(file_a, space_path, max_nodes, budget, as_json);
    if (ci->parsed())
      return run_category_image(file_a, file_b, space_path, set_path, as_json);
    if (pc->parsed())
      return run_preservation_check(file_a, file_b, space_path, set_path, tree_path,
                                    budget, as_json);
    if (he->parsed()) return run_hausdorff_extract(file_a, verify, as_json);
    if (st->parsed()) return run_selftest(seed, as_json);
  } catch (const fh::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const fh::no_reduction& e) {
    std::cerr << "no reduction: " << e.what() << "\n";
    return 1;
  } catch (const fh::budget_exceeded& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 1;
  } catch (const fh::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
