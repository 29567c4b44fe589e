#ifndef PIRCHECK_CFG_HPP
#define PIRCHECK_CFG_HPP

#include <map>
#include <set>
#include <vector>

#include "pircheck/ast.hpp"
#include "pircheck/pir.hpp"

namespace pircheck {

enum class CfgSection { Ingress, Egress, Pipeline };

// Statement-level control-flow graph. Node ids come from the validator's
// program-order numbering; entry and exit are synthetic.
struct Cfg {
  int entry = 0;
  int exit = 0;
  std::vector<int> nodes;  // sorted, includes entry and exit
  std::map<int, std::vector<int>> succ;
  std::map<int, std::vector<int>> pred;
  std::map<int, const Stmt*> stmt;  // absent for entry/exit

  void add_edge(int from, int to) {
    succ[from].push_back(to);
    pred[to].push_back(from);
  }
  const std::vector<int>& successors(int n) const {
    static const std::vector<int> empty;
    auto it = succ.find(n);
    return it == succ.end() ? empty : it->second;
  }
  const std::vector<int>& predecessors(int n) const {
    static const std::vector<int> empty;
    auto it = pred.find(n);
    return it == pred.end() ? empty : it->second;
  }
};

namespace detail {

// Wires a block between the given predecessor frontier and whatever follows;
// returns the new frontier. An `if` node fans out to both branches which
// rejoin at the post-dominating successor.
inline std::vector<int> wire_block(Cfg& cfg, const StmtBlock& block,
                                   std::vector<int> frontier) {
  for (const auto& st : block) {
    int id = st->node_id;
    cfg.nodes.push_back(id);
    cfg.stmt[id] = st.get();
    for (int p : frontier) cfg.add_edge(p, id);
    if (st->kind == Stmt::Kind::If) {
      std::vector<int> out_then = wire_block(cfg, st->then_block, {id});
      std::vector<int> out_else = wire_block(cfg, st->else_block, {id});
      frontier.clear();
      frontier.insert(frontier.end(), out_then.begin(), out_then.end());
      frontier.insert(frontier.end(), out_else.begin(), out_else.end());
    } else {
      frontier = {id};
    }
  }
  return frontier;
}

}  // namespace detail

inline Cfg build_cfg(const DeviceProgram& prog, CfgSection section) {
  Cfg cfg;
  cfg.entry = 0;
  cfg.exit = prog.next_node_id;
  cfg.nodes.push_back(cfg.entry);
  std::vector<int> frontier = {cfg.entry};
  if (section == CfgSection::Ingress || section == CfgSection::Pipeline)
    frontier = detail::wire_block(cfg, prog.ingress_body, std::move(frontier));
  if (section == CfgSection::Egress || section == CfgSection::Pipeline)
    frontier = detail::wire_block(cfg, prog.egress_body, std::move(frontier));
  cfg.nodes.push_back(cfg.exit);
  for (int p : frontier) cfg.add_edge(p, cfg.exit);
  std::sort(cfg.nodes.begin(), cfg.nodes.end());
  return cfg;
}

// Post-dominator sets by iterative intersection; small graphs only.
inline std::map<int, std::set<int>> post_dominators(const Cfg& cfg) {
  std::map<int, std::set<int>> pdom;
  std::set<int> all(cfg.nodes.begin(), cfg.nodes.end());
  for (int n : cfg.nodes) pdom[n] = (n == cfg.exit) ? std::set<int>{n} : all;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = cfg.nodes.rbegin(); it != cfg.nodes.rend(); ++it) {
      int n = *it;
      if (n == cfg.exit) continue;
      std::set<int> meet;
      bool first = true;
      for (int s : cfg.successors(n)) {
        if (first) {
          meet = pdom[s];
          first = false;
        } else {
          std::set<int> inter;
          for (int x : meet)
            if (pdom[s].count(x)) inter.insert(x);
          meet = std::move(inter);
        }
      }
      meet.insert(n);
      if (meet != pdom[n]) {
        pdom[n] = std::move(meet);
        changed = true;
      }
    }
  }
  return pdom;
}

}  // namespace pircheck

#endif  // PIRCHECK_CFG_HPP
