#ifndef PIRCHECK_AST_HPP
#define PIRCHECK_AST_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pircheck/diag.hpp"

namespace pircheck {

inline uint64_t width_mask(int width) {
  return width >= 64 ? ~0ull : ((1ull << width) - 1ull);
}

enum class BinOp {
  Add, Sub, Mul,
  BitAnd, BitOr, BitXor,
  Shl, Shr,
  Eq, Ne, Lt, Le, Gt, Ge,
  LAnd, LOr
};

enum class UnOp { Not, BitNot };

enum class CloneKind { None, I2E, I2I, E2E };

struct Expr;
// Nodes are shared and treated as immutable once a program has been
// validated; the validator itself fills in widths and node ids in place.
using ExprPtr = std::shared_ptr<Expr>;

// Expression over packet headers, metadata, action parameters and (in
// injected assertions only) register slots. Widths are filled in by the
// validator; width 0 marks an unsized value that adopts its context width.
struct Expr {
  enum class Kind {
    IntLit,    // value
    FieldRef,  // a(header) . b(field)
    MetaRef,   // b(field)
    ParamRef,  // b(param name)
    ValidTest, // a(header)
    RegRef,    // a(register), value = constant slot index
    Unary,     // uop, lhs
    Binary     // bop, lhs, rhs
  };

  Kind kind = Kind::IntLit;
  SourcePos pos;
  uint64_t value = 0;
  std::string a, b;
  UnOp uop = UnOp::Not;
  BinOp bop = BinOp::Add;
  ExprPtr lhs, rhs;
  int width = 0;

  static ExprPtr lit(uint64_t v, SourcePos p = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::IntLit;
    e->value = v;
    e->pos = p;
    return e;
  }
};

struct LValue {
  bool is_meta = false;
  std::string header;  // empty for metadata
  std::string field;
  SourcePos pos;
  int width = 0;  // filled by validator
};

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;
using StmtBlock = std::vector<StmtPtr>;

struct Stmt {
  enum class Kind {
    Assign,      // lhs = e0
    If,          // e0 cond, then_block / else_block
    RegRead,     // lhs = reg[e0]
    RegWrite,    // reg[e0] = e1
    Apply,       // apply(name)
    Drop,
    Clone,       // clone_kind
    Recirc,
    SetPort,     // e0
    AssertLocal  // e0; injected by spec resolution, never parsed from .pir
  };

  Kind kind = Kind::Assign;
  SourcePos pos;
  int node_id = -1;  // statement-level CFG node id; -1 inside action bodies
  LValue lhs;
  ExprPtr e0, e1;
  std::string name;         // Apply: table; RegRead/RegWrite: register
  CloneKind clone_kind = CloneKind::None;
  StmtBlock then_block, else_block;
  std::string assert_name;  // AssertLocal: property label
};

struct FieldDecl {
  std::string name;
  int width = 0;
  SourcePos pos;
};

struct HeaderDecl {
  std::string name;
  std::vector<FieldDecl> fields;
  SourcePos pos;
};

struct RegisterDecl {
  std::string name;
  uint64_t size = 0;
  int width = 0;
  SourcePos pos;
};

struct ActionDecl {
  std::string name;
  std::vector<std::string> params;
  StmtBlock body;
  SourcePos pos;
};

struct TableDecl {
  std::string name;
  ExprPtr key;  // FieldRef or MetaRef
  std::vector<ActionDecl> actions;
  std::string default_action;
  SourcePos pos;
};

// Parser machine: a DAG of states. A transition target is either a state
// name or the distinguished "accept".
struct ParserTransition {
  bool is_accept = false;               // unconditional accept
  ExprPtr select;                       // select field, null when is_accept
  std::vector<std::pair<uint64_t, std::string>> cases;
  std::string default_target;
  SourcePos pos;
};

struct ParserState {
  std::string name;
  std::vector<std::string> extracts;  // header names
  ParserTransition transition;
  SourcePos pos;
};

struct ParserMachine {
  std::vector<ParserState> states;  // entry is the state named "start"
};

struct EmitItem;
using EmitPtr = std::shared_ptr<EmitItem>;

struct EmitItem {
  bool is_emit = true;
  std::string header;          // emit
  ExprPtr cond;                // conditional group
  std::vector<EmitPtr> body;
  SourcePos pos;
};

struct DeparserBlock {
  std::vector<EmitPtr> items;
};

struct DeviceProgram {
  std::string name;
  std::vector<HeaderDecl> headers;
  std::vector<FieldDecl> metadata;
  std::vector<RegisterDecl> registers;
  std::vector<TableDecl> tables;
  ParserMachine parser;
  StmtBlock ingress_body;
  StmtBlock egress_body;
  DeparserBlock deparser;

  int next_node_id = 1;  // node ids handed out so far; 0 is the CFG entry

  const HeaderDecl* find_header(const std::string& n) const {
    for (const auto& h : headers)
      if (h.name == n) return &h;
    return nullptr;
  }
  const FieldDecl* find_header_field(const std::string& h,
                                     const std::string& f) const {
    const HeaderDecl* hd = find_header(h);
    if (!hd) return nullptr;
    for (const auto& fd : hd->fields)
      if (fd.name == f) return &fd;
    return nullptr;
  }
  const FieldDecl* find_metadata(const std::string& f) const {
    for (const auto& fd : metadata)
      if (fd.name == f) return &fd;
    return nullptr;
  }
  const RegisterDecl* find_register(const std::string& n) const {
    for (const auto& r : registers)
      if (r.name == n) return &r;
    return nullptr;
  }
  const TableDecl* find_table(const std::string& n) const {
    for (const auto& t : tables)
      if (t.name == n) return &t;
    return nullptr;
  }
};

// Intrinsic per-packet metadata. egress_port is readable and writable from
// programs; the remaining flags are set through dedicated statements and
// consumed by the TrafficManager / FinalDispatch stages.
inline constexpr const char* kMetaEgressPort = "egress_port";
inline constexpr const char* kMetaDropFlag = "drop_flag";
inline constexpr const char* kMetaCloneSpec = "clone_spec";
inline constexpr const char* kMetaRecircFlag = "recirc_flag";
inline constexpr const char* kMetaI2IClone = "is_i2i_clone";
inline constexpr int kEgressPortWidth = 8;

// Dataflow symbol naming: "h.f" header field, "meta.f" metadata field,
// "reg:r" register, "valid:h" header validity.
inline std::string sym_field(const std::string& h, const std::string& f) {
  return h + "." + f;
}
inline std::string sym_meta(const std::string& f) { return "meta." + f; }
inline std::string sym_reg(const std::string& r) { return "reg:" + r; }
inline std::string sym_valid(const std::string& h) { return "valid:" + h; }

inline bool is_register_symbol(const std::string& s) {
  return s.rfind("reg:", 0) == 0;
}

// A symbol survives a pipeline pass if it is persistent (register) or rides
// on the packet. The per-pass intrinsic flags are reset on every external
// delivery and therefore do not carry across passes.
inline bool is_packet_carried_symbol(const std::string& s) {
  if (s.rfind("valid:", 0) == 0) return true;
  if (s.rfind("meta.", 0) == 0) {
    std::string f = s.substr(5);
    return f != kMetaDropFlag && f != kMetaCloneSpec && f != kMetaRecircFlag &&
           f != kMetaI2IClone;
  }
  return s.rfind("reg:", 0) != 0 && s.find('.') != std::string::npos;
}

inline bool cross_ok_symbol(const std::string& s) {
  return is_register_symbol(s) || is_packet_carried_symbol(s);
}

}  // namespace pircheck

#endif  // PIRCHECK_AST_HPP
