#ifndef PIRCHECK_ENTRIES_HPP
#define PIRCHECK_ENTRIES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pircheck/ast.hpp"
#include "pircheck/lexer.hpp"

namespace pircheck {

struct TableEntry {
  uint64_t key = 0;
  std::string action;
  std::vector<uint64_t> args;
  int line = 0;
};

// Statically loaded exact-match entries for one device instance. Entries are
// fixed for the whole verification run.
struct EntrySet {
  std::map<std::string, std::vector<TableEntry>> tables;

  const TableEntry* lookup(const std::string& table, uint64_t key) const {
    auto it = tables.find(table);
    if (it == tables.end()) return nullptr;
    for (const auto& e : it->second)
      if (e.key == key) return &e;
    return nullptr;
  }
};

// Entries file: one `table : key -> action(arg, ...)` per line.
inline EntrySet load_table_entries(const std::string& text,
                                   const DeviceProgram& prog) {
  EntrySet set;
  Lexer lexer(text, /*ltl_ops=*/false);
  TokenCursor cur(lexer.tokens());
  while (!cur.at(Tok::End)) {
    Token tname = cur.expect(Tok::Ident, "table name");
    const TableDecl* table = prog.find_table(tname.text);
    if (!table)
      throw ResolveError(tname.pos, "unknown table '" + tname.text +
                                        "' for device '" + prog.name + "'");
    cur.expect(Tok::Colon, "':'");
    Token key = cur.expect(Tok::Int, "key literal");
    cur.expect(Tok::Arrow, "'->'");
    Token aname = cur.expect(Tok::Ident, "action name");
    const ActionDecl* action = nullptr;
    for (const auto& a : table->actions)
      if (a.name == aname.text) action = &a;
    if (!action)
      throw ResolveError(aname.pos, "unknown action '" + aname.text +
                                        "' in table '" + table->name + "'");
    TableEntry entry;
    entry.key = key.value & width_mask(table->key->width);
    if (entry.key != key.value)
      throw WidthError(key.pos, "key literal " + std::to_string(key.value) +
                                    " does not fit the key width of table '" +
                                    table->name + "'");
    entry.action = aname.text;
    entry.line = tname.pos.line;
    if (cur.accept(Tok::LParen)) {
      if (!cur.at(Tok::RParen)) {
        entry.args.push_back(cur.expect(Tok::Int, "argument literal").value);
        while (cur.accept(Tok::Comma))
          entry.args.push_back(cur.expect(Tok::Int, "argument literal").value);
      }
      cur.expect(Tok::RParen, "')'");
    }
    if (entry.args.size() != action->params.size())
      throw ResolveError(aname.pos,
                         "action '" + action->name + "' expects " +
                             std::to_string(action->params.size()) +
                             " argument(s), got " +
                             std::to_string(entry.args.size()));
    for (const auto& prev : set.tables[table->name])
      if (prev.key == entry.key)
        throw ResolveError(tname.pos,
                           "duplicate key " + std::to_string(entry.key) +
                               " in table '" + table->name + "' (lines " +
                               std::to_string(prev.line) + " and " +
                               std::to_string(entry.line) + ")");
    set.tables[table->name].push_back(std::move(entry));
  }
  return set;
}

}  // namespace pircheck

#endif  // PIRCHECK_ENTRIES_HPP
