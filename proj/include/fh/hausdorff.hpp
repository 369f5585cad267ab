#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fh/error.hpp"
#include "fh/family.hpp"
#include "fh/space.hpp"
#include "fh/tree.hpp"

namespace fh {

/// A mind-change process on b-ary strings of length up to d: after reading a
/// nonempty prefix the process guesses a value in {0, ..., k-1}. The final
/// guess on a full-length string is the limit value.
struct GuessTable {
  int k = 2;
  int b = 2;
  int d = 1;
  std::map<std::string, int> guess;  // every string of length 1..d

  int at(const std::string& s) const {
    auto it = guess.find(s);
    if (it == guess.end()) throw domain_error("guess table: missing entry " + s);
    return it->second;
  }
};

namespace detail {

inline void check_table(const GuessTable& t) {
  if (t.k < 2) throw domain_error("guess table: need k >= 2");
  SpaceModel::cylinder(t.b, t.d);  // validates b, d and the 64-point cap
  std::uint64_t count = 0;
  std::function<void(std::string&)> walk = [&](std::string& s) {
    if (!s.empty()) {
      int v = t.at(s);
      if (v < 0 || v >= t.k)
        throw domain_error("guess table: value out of range at " + s);
      ++count;
    }
    if (static_cast<int>(s.size()) == t.d) return;
    for (int c = 0; c < t.b; ++c) {
      s.push_back(static_cast<char>('0' + c));
      walk(s);
      s.pop_back();
    }
  };
  std::string s;
  walk(s);
  if (count != t.guess.size())
    throw domain_error("guess table: extraneous entries");
}

}  // namespace detail

/// Stepwise machine view of a table: on input sigma, query i halts within
/// i+1 steps whenever i < |sigma|, answering the guess after i+1 symbols.
struct MindChangeMachine {
  const GuessTable* table = nullptr;

  std::optional<int> run(const std::string& sigma, int i, int steps) const {
    if (i < 0 || i >= static_cast<int>(sigma.size())) return std::nullopt;
    if (steps < i + 1) return std::nullopt;
    return table->at(sigma.substr(0, static_cast<std::size_t>(i) + 1));
  }
};

/// Level n holds the prefix-minimal strings at which the guess changes for
/// the n-th time; each string's predecessor is its unique level-(n-1)
/// ancestor. Level 0 is the minimal halting prefixes, here all length-1
/// strings.
struct RSequence {
  std::vector<std::vector<std::string>> levels;
  std::map<std::string, int> value;   // the settled guess at each member
  std::map<std::string, std::string> parent;  // absent for level 0
};

inline RSequence build_r_sequence(const GuessTable& t) {
  detail::check_table(t);
  RSequence r;
  std::vector<std::string> cur;
  for (int c = 0; c < t.b; ++c) {
    std::string s(1, static_cast<char>('0' + c));
    cur.push_back(s);
    r.value[s] = t.at(s);
  }
  r.levels.push_back(cur);
  while (true) {
    std::vector<std::string> next;
    for (const std::string& sigma : cur) {
      int held = r.value.at(sigma);
      // Minimal strict extensions where the guess first differs; the search
      // stops below each change point.
      std::vector<std::string> stack = {sigma};
      while (!stack.empty()) {
        std::string s = stack.back();
        stack.pop_back();
        if (static_cast<int>(s.size()) == t.d) continue;
        for (int c = t.b - 1; c >= 0; --c) {
          std::string e = s + static_cast<char>('0' + c);
          if (t.at(e) != held) {
            next.push_back(e);
            r.value[e] = t.at(e);
            r.parent[e] = sigma;
          } else {
            stack.push_back(e);
          }
        }
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    r.levels.push_back(next);
    cur = std::move(next);
  }
  return r;
}

/// The extracted data: the change-point tree (root labeled with the default
/// value 0), the cylinder family placing the limit partition at that tree's
/// position, and the limit partition itself.
struct HausdorffExtraction {
  std::shared_ptr<SpaceModel> space;
  IterTree tree = IterTree::base(0, 2);
  TFamily family;
  std::vector<int> limit_values;
  RSequence rseq;

  KPartition limit() const {
    return KPartition{space.get(), limit_values, family.shape.arity()};
  }
};

namespace detail {

// Prefix closure of the R-strings, with the label of each node taken from
// its deepest change-point prefix (default 0 when there is none).
struct ChangeTree {
  std::set<std::string> nodes;      // prefix-closed, contains ""
  std::map<std::string, int> label;
};

inline ChangeTree change_tree(const RSequence& r) {
  ChangeTree t;
  t.nodes.insert("");
  for (const auto& lvl : r.levels)
    for (const std::string& s : lvl)
      for (std::size_t len = 0; len <= s.size(); ++len)
        t.nodes.insert(s.substr(0, len));
  for (const std::string& s : t.nodes) {
    int lbl = 0;
    for (std::size_t len = s.size(); len >= 1; --len) {
      auto it = r.value.find(s.substr(0, len));
      if (it != r.value.end()) {
        lbl = it->second;
        break;
      }
    }
    t.label[s] = lbl;
  }
  return t;
}

inline IterTree build_node(const std::string& s, int k, const ChangeTree& t,
                           int b, NodeAddr addr,
                           std::map<std::string, NodeAddr>& addr_of) {
  addr_of[s] = addr;
  std::vector<IterTree> kids;
  for (int c = 0; c < b; ++c) {
    std::string e = s + static_cast<char>('0' + c);
    if (!t.nodes.count(e)) continue;
    NodeAddr a = addr;
    a.push_back(static_cast<int>(kids.size()));
    kids.push_back(build_node(e, k, t, b, a, addr_of));
  }
  if (kids.empty()) return IterTree::base(t.label.at(s), k);
  return IterTree::node(IterTree::base(t.label.at(s), k), std::move(kids));
}

}  // namespace detail

/// Effective Hausdorff analysis of a mind-change table: the change points
/// form a labeled tree, and the cylinders at those points form a family over
/// it that determines the limit partition.
inline HausdorffExtraction hausdorff_extract(const GuessTable& t) {
  HausdorffExtraction ex;
  ex.rseq = build_r_sequence(t);
  ex.space = std::make_shared<SpaceModel>(SpaceModel::cylinder(t.b, t.d));
  // The empty string is never a change point; it carries the default value 0.
  detail::ChangeTree ct = detail::change_tree(ex.rseq);
  std::map<std::string, NodeAddr> addr_of;
  ex.tree = detail::build_node("", t.k, ct, t.b, {}, addr_of);
  ex.family.shape = ex.tree;
  ex.family.space = ex.space.get();
  for (const auto& [s, addr] : addr_of) {
    std::uint64_t bits = s.empty() ? ex.space->all_points() : ex.space->cylinder_set(s);
    ex.family.sets[FamilyPath{addr}] = make_set(*ex.space, bits);
  }
  ex.limit_values.reserve(ex.space->point_count());
  for (std::size_t p = 0; p < ex.space->point_count(); ++p)
    ex.limit_values.push_back(t.at(ex.space->point_name(p)));
  return ex;
}

// ---- text format ----
// Header `k=<k> b=<b> d=<d>`, then one `sigma value` line per string of each
// length 1..d.

inline GuessTable parse_guess_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  GuessTable t;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    if (!header) {
      std::string kf, bf, df;
      ls >> kf >> bf >> df;
      if (kf.rfind("k=", 0) != 0 || bf.rfind("b=", 0) != 0 || df.rfind("d=", 0) != 0)
        throw parse_error("guess table: expected header `k= b= d=`");
      t.k = std::stoi(kf.substr(2));
      t.b = std::stoi(bf.substr(2));
      t.d = std::stoi(df.substr(2));
      header = true;
      continue;
    }
    std::string sigma;
    int value;
    if (!(ls >> sigma >> value))
      throw parse_error("guess table: expected `sigma value`: " + line);
    if (t.guess.count(sigma))
      throw parse_error("guess table: duplicate entry " + sigma);
    t.guess[sigma] = value;
  }
  if (!header) throw parse_error("guess table: missing header");
  detail::check_table(t);
  return t;
}

inline std::string to_string(const GuessTable& t) {
  std::string out = "k=" + std::to_string(t.k) + " b=" + std::to_string(t.b) +
                    " d=" + std::to_string(t.d) + "\n";
  for (const auto& [s, v] : t.guess) out += s + " " + std::to_string(v) + "\n";
  return out;
}

}  // namespace fh
