#ifndef PIRCHECK_PIR_HPP
#define PIRCHECK_PIR_HPP

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "pircheck/ast.hpp"
#include "pircheck/lexer.hpp"

namespace pircheck {

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

class PirParser {
 public:
  explicit PirParser(const std::string& text)
      : lexer_(text, /*ltl_ops=*/false), cur_(lexer_.tokens()) {}

  DeviceProgram parse() {
    DeviceProgram prog;
    cur_.expect_kw("device");
    prog.name = cur_.expect(Tok::Ident, "device name").text;
    cur_.expect(Tok::LBrace, "'{'");
    while (!cur_.at(Tok::RBrace)) parse_decl(prog);
    cur_.expect(Tok::RBrace, "'}'");
    cur_.expect(Tok::End, "end of file");
    return prog;
  }

 private:
  void parse_decl(DeviceProgram& prog) {
    SourcePos pos = cur_.pos();
    if (cur_.accept_kw("header")) {
      HeaderDecl h;
      h.pos = pos;
      h.name = cur_.expect(Tok::Ident, "header name").text;
      cur_.expect(Tok::LBrace, "'{'");
      while (!cur_.at(Tok::RBrace)) h.fields.push_back(parse_field());
      cur_.expect(Tok::RBrace, "'}'");
      prog.headers.push_back(std::move(h));
    } else if (cur_.accept_kw("metadata")) {
      cur_.expect(Tok::LBrace, "'{'");
      while (!cur_.at(Tok::RBrace)) prog.metadata.push_back(parse_field());
      cur_.expect(Tok::RBrace, "'}'");
    } else if (cur_.accept_kw("register")) {
      RegisterDecl r;
      r.pos = pos;
      r.name = cur_.expect(Tok::Ident, "register name").text;
      cur_.expect(Tok::LBracket, "'['");
      r.size = cur_.expect(Tok::Int, "register size").value;
      cur_.expect(Tok::RBracket, "']'");
      cur_.expect(Tok::Colon, "':'");
      r.width = parse_bit_type();
      cur_.expect(Tok::Semi, "';'");
      prog.registers.push_back(std::move(r));
    } else if (cur_.accept_kw("table")) {
      prog.tables.push_back(parse_table(pos));
    } else if (cur_.accept_kw("parser")) {
      cur_.expect(Tok::LBrace, "'{'");
      while (!cur_.at(Tok::RBrace)) prog.parser.states.push_back(parse_state());
      cur_.expect(Tok::RBrace, "'}'");
    } else if (cur_.accept_kw("ingress")) {
      prog.ingress_body = parse_block();
    } else if (cur_.accept_kw("egress")) {
      prog.egress_body = parse_block();
    } else if (cur_.accept_kw("deparser")) {
      cur_.expect(Tok::LBrace, "'{'");
      while (!cur_.at(Tok::RBrace)) prog.deparser.items.push_back(parse_emit());
      cur_.expect(Tok::RBrace, "'}'");
    } else {
      throw SyntaxError(pos, "expected a declaration, found '" +
                                 cur_.peek().text + "'");
    }
  }

  FieldDecl parse_field() {
    FieldDecl f;
    f.pos = cur_.pos();
    f.name = cur_.expect(Tok::Ident, "field name").text;
    cur_.expect(Tok::Colon, "':'");
    f.width = parse_bit_type();
    cur_.expect(Tok::Semi, "';'");
    return f;
  }

  int parse_bit_type() {
    cur_.expect_kw("bit");
    cur_.expect(Tok::Lt, "'<'");
    Token w = cur_.expect(Tok::Int, "bit width");
    cur_.expect(Tok::Gt, "'>'");
    return static_cast<int>(w.value);
  }

  TableDecl parse_table(SourcePos pos) {
    TableDecl t;
    t.pos = pos;
    t.name = cur_.expect(Tok::Ident, "table name").text;
    cur_.expect(Tok::LBrace, "'{'");
    cur_.expect_kw("key");
    cur_.expect(Tok::Assign, "'='");
    t.key = parse_expr();
    cur_.expect(Tok::Semi, "';'");
    while (cur_.at_kw("action")) {
      cur_.next();
      ActionDecl a;
      a.pos = cur_.pos();
      a.name = cur_.expect(Tok::Ident, "action name").text;
      cur_.expect(Tok::LParen, "'('");
      if (!cur_.at(Tok::RParen)) {
        a.params.push_back(cur_.expect(Tok::Ident, "parameter name").text);
        while (cur_.accept(Tok::Comma))
          a.params.push_back(cur_.expect(Tok::Ident, "parameter name").text);
      }
      cur_.expect(Tok::RParen, "')'");
      a.body = parse_block();
      t.actions.push_back(std::move(a));
    }
    cur_.expect_kw("default");
    cur_.expect(Tok::Assign, "'='");
    t.default_action = cur_.expect(Tok::Ident, "action name").text;
    cur_.expect(Tok::Semi, "';'");
    cur_.expect(Tok::RBrace, "'}'");
    return t;
  }

  ParserState parse_state() {
    ParserState s;
    s.pos = cur_.pos();
    s.name = cur_.expect(Tok::Ident, "parser state name").text;
    cur_.expect(Tok::Colon, "':'");
    while (cur_.at_kw("extract")) {
      cur_.next();
      cur_.expect(Tok::LParen, "'('");
      s.extracts.push_back(cur_.expect(Tok::Ident, "header name").text);
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::Semi, "';'");
    }
    s.transition.pos = cur_.pos();
    if (cur_.accept_kw("accept")) {
      s.transition.is_accept = true;
      cur_.expect(Tok::Semi, "';'");
    } else if (cur_.accept_kw("select")) {
      cur_.expect(Tok::LParen, "'('");
      s.transition.select = parse_expr();
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::LBrace, "'{'");
      while (!cur_.at_kw("default")) {
        uint64_t v = cur_.expect(Tok::Int, "case literal").value;
        cur_.expect(Tok::Arrow, "'->'");
        std::string target = cur_.expect(Tok::Ident, "state name").text;
        cur_.expect(Tok::Semi, "';'");
        s.transition.cases.emplace_back(v, target);
      }
      cur_.expect_kw("default");
      cur_.expect(Tok::Arrow, "'->'");
      s.transition.default_target = cur_.expect(Tok::Ident, "state name").text;
      cur_.expect(Tok::Semi, "';'");
      cur_.expect(Tok::RBrace, "'}'");
    } else {
      throw SyntaxError(cur_.pos(), "expected 'accept' or 'select'");
    }
    return s;
  }

  EmitPtr parse_emit() {
    auto item = std::make_shared<EmitItem>();
    item->pos = cur_.pos();
    if (cur_.accept_kw("emit")) {
      cur_.expect(Tok::LParen, "'('");
      item->header = cur_.expect(Tok::Ident, "header name").text;
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::Semi, "';'");
      item->is_emit = true;
    } else if (cur_.accept_kw("if")) {
      item->is_emit = false;
      cur_.expect(Tok::LParen, "'('");
      item->cond = parse_expr();
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::LBrace, "'{'");
      while (!cur_.at(Tok::RBrace)) item->body.push_back(parse_emit());
      cur_.expect(Tok::RBrace, "'}'");
    } else {
      throw SyntaxError(cur_.pos(), "expected 'emit' or 'if'");
    }
    return item;
  }

  StmtBlock parse_block() {
    cur_.expect(Tok::LBrace, "'{'");
    StmtBlock block;
    while (!cur_.at(Tok::RBrace)) block.push_back(parse_stmt());
    cur_.expect(Tok::RBrace, "'}'");
    return block;
  }

  StmtPtr parse_stmt() {
    auto st = std::make_shared<Stmt>();
    st->pos = cur_.pos();
    if (cur_.at_kw("if")) {
      cur_.next();
      st->kind = Stmt::Kind::If;
      cur_.expect(Tok::LParen, "'('");
      st->e0 = parse_expr();
      cur_.expect(Tok::RParen, "')'");
      st->then_block = parse_block();
      if (cur_.accept_kw("else")) st->else_block = parse_block();
      return st;
    }
    if (cur_.at_kw("read")) {
      cur_.next();
      st->kind = Stmt::Kind::RegRead;
      cur_.expect(Tok::LParen, "'('");
      st->lhs = parse_lvalue();
      cur_.expect(Tok::Comma, "','");
      st->name = cur_.expect(Tok::Ident, "register name").text;
      cur_.expect(Tok::LBracket, "'['");
      st->e0 = parse_expr();
      cur_.expect(Tok::RBracket, "']'");
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::Semi, "';'");
      return st;
    }
    if (cur_.at_kw("write")) {
      cur_.next();
      st->kind = Stmt::Kind::RegWrite;
      cur_.expect(Tok::LParen, "'('");
      st->name = cur_.expect(Tok::Ident, "register name").text;
      cur_.expect(Tok::LBracket, "'['");
      st->e0 = parse_expr();
      cur_.expect(Tok::RBracket, "']'");
      cur_.expect(Tok::Comma, "','");
      st->e1 = parse_expr();
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::Semi, "';'");
      return st;
    }
    if (cur_.at_kw("apply")) {
      cur_.next();
      st->kind = Stmt::Kind::Apply;
      cur_.expect(Tok::LParen, "'('");
      st->name = cur_.expect(Tok::Ident, "table name").text;
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::Semi, "';'");
      return st;
    }
    if (cur_.at_kw("drop")) {
      cur_.next();
      st->kind = Stmt::Kind::Drop;
      cur_.expect(Tok::LParen, "'('");
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::Semi, "';'");
      return st;
    }
    if (cur_.at_kw("clone")) {
      cur_.next();
      st->kind = Stmt::Kind::Clone;
      cur_.expect(Tok::LParen, "'('");
      Token k = cur_.expect(Tok::Ident, "clone kind (i2e, i2i, e2e)");
      if (k.text == "i2e") st->clone_kind = CloneKind::I2E;
      else if (k.text == "i2i") st->clone_kind = CloneKind::I2I;
      else if (k.text == "e2e") st->clone_kind = CloneKind::E2E;
      else throw SyntaxError(k.pos, "unknown clone kind '" + k.text + "'");
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::Semi, "';'");
      return st;
    }
    if (cur_.at_kw("recirc")) {
      cur_.next();
      st->kind = Stmt::Kind::Recirc;
      cur_.expect(Tok::LParen, "'('");
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::Semi, "';'");
      return st;
    }
    if (cur_.at_kw("set_port")) {
      cur_.next();
      st->kind = Stmt::Kind::SetPort;
      cur_.expect(Tok::LParen, "'('");
      st->e0 = parse_expr();
      cur_.expect(Tok::RParen, "')'");
      cur_.expect(Tok::Semi, "';'");
      return st;
    }
    // Plain assignment.
    st->kind = Stmt::Kind::Assign;
    st->lhs = parse_lvalue();
    cur_.expect(Tok::Assign, "'='");
    st->e0 = parse_expr();
    cur_.expect(Tok::Semi, "';'");
    return st;
  }

  LValue parse_lvalue() {
    LValue lv;
    lv.pos = cur_.pos();
    Token first = cur_.expect(Tok::Ident, "lvalue");
    cur_.expect(Tok::Dot, "'.'");
    Token second = cur_.expect(Tok::Ident, "field name");
    if (first.text == "meta") {
      lv.is_meta = true;
      lv.field = second.text;
    } else {
      lv.header = first.text;
      lv.field = second.text;
    }
    return lv;
  }

  // Precedence, loosest first: || && | ^ & (== !=) (< <= > >=) (<< >>) (+ -) (*)
  ExprPtr parse_expr() { return parse_lor(); }

  ExprPtr parse_lor() {
    ExprPtr e = parse_land();
    while (cur_.at(Tok::OrOr)) {
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(BinOp::LOr, e, parse_land(), pos);
    }
    return e;
  }
  ExprPtr parse_land() {
    ExprPtr e = parse_bitor();
    while (cur_.at(Tok::AndAnd)) {
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(BinOp::LAnd, e, parse_bitor(), pos);
    }
    return e;
  }
  ExprPtr parse_bitor() {
    ExprPtr e = parse_bitxor();
    while (cur_.at(Tok::Pipe)) {
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(BinOp::BitOr, e, parse_bitxor(), pos);
    }
    return e;
  }
  ExprPtr parse_bitxor() {
    ExprPtr e = parse_bitand();
    while (cur_.at(Tok::Caret)) {
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(BinOp::BitXor, e, parse_bitand(), pos);
    }
    return e;
  }
  ExprPtr parse_bitand() {
    ExprPtr e = parse_equality();
    while (cur_.at(Tok::Amp)) {
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(BinOp::BitAnd, e, parse_equality(), pos);
    }
    return e;
  }
  ExprPtr parse_equality() {
    ExprPtr e = parse_relational();
    while (cur_.at(Tok::Eq) || cur_.at(Tok::Ne)) {
      BinOp op = cur_.at(Tok::Eq) ? BinOp::Eq : BinOp::Ne;
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(op, e, parse_relational(), pos);
    }
    return e;
  }
  ExprPtr parse_relational() {
    ExprPtr e = parse_shift();
    while (cur_.at(Tok::Lt) || cur_.at(Tok::Le) || cur_.at(Tok::Gt) ||
           cur_.at(Tok::Ge)) {
      BinOp op = cur_.at(Tok::Lt)   ? BinOp::Lt
                 : cur_.at(Tok::Le) ? BinOp::Le
                 : cur_.at(Tok::Gt) ? BinOp::Gt
                                    : BinOp::Ge;
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(op, e, parse_shift(), pos);
    }
    return e;
  }
  ExprPtr parse_shift() {
    ExprPtr e = parse_add();
    while (cur_.at(Tok::Shl) || cur_.at(Tok::Shr)) {
      BinOp op = cur_.at(Tok::Shl) ? BinOp::Shl : BinOp::Shr;
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(op, e, parse_add(), pos);
    }
    return e;
  }
  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (cur_.at(Tok::Plus) || cur_.at(Tok::Minus)) {
      BinOp op = cur_.at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(op, e, parse_mul(), pos);
    }
    return e;
  }
  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (cur_.at(Tok::Star)) {
      SourcePos pos = cur_.pos();
      cur_.next();
      e = mk_bin(BinOp::Mul, e, parse_unary(), pos);
    }
    return e;
  }
  ExprPtr parse_unary() {
    SourcePos pos = cur_.pos();
    if (cur_.accept(Tok::Bang)) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Unary;
      e->uop = UnOp::Not;
      e->lhs = parse_unary();
      e->pos = pos;
      return e;
    }
    if (cur_.accept(Tok::Tilde)) {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Unary;
      e->uop = UnOp::BitNot;
      e->lhs = parse_unary();
      e->pos = pos;
      return e;
    }
    return parse_atom();
  }
  ExprPtr parse_atom() {
    SourcePos pos = cur_.pos();
    if (cur_.at(Tok::Int)) {
      Token t = cur_.next();
      return Expr::lit(t.value, pos);
    }
    if (cur_.accept(Tok::LParen)) {
      ExprPtr e = parse_expr();
      cur_.expect(Tok::RParen, "')'");
      return e;
    }
    if (cur_.at_kw("valid")) {
      cur_.next();
      cur_.expect(Tok::LParen, "'('");
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::ValidTest;
      e->a = cur_.expect(Tok::Ident, "header name").text;
      e->pos = pos;
      cur_.expect(Tok::RParen, "')'");
      return e;
    }
    Token id = cur_.expect(Tok::Ident, "expression");
    if (cur_.accept(Tok::Dot)) {
      Token field = cur_.expect(Tok::Ident, "field name");
      auto e = std::make_shared<Expr>();
      e->pos = pos;
      if (id.text == "meta") {
        e->kind = Expr::Kind::MetaRef;
        e->b = field.text;
      } else {
        e->kind = Expr::Kind::FieldRef;
        e->a = id.text;
        e->b = field.text;
      }
      return e;
    }
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::ParamRef;
    e->b = id.text;
    e->pos = pos;
    return e;
  }

  static ExprPtr mk_bin(BinOp op, ExprPtr l, ExprPtr r, SourcePos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->bop = op;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    e->pos = pos;
    return e;
  }

  Lexer lexer_;
  TokenCursor cur_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation: name resolution, width assignment, node id numbering.
// ---------------------------------------------------------------------------

namespace detail {

class Validator {
 public:
  explicit Validator(DeviceProgram& prog) : prog_(prog) {}

  void run() {
    check_decls();
    prog_.next_node_id = 1;
    number_block(prog_.ingress_body);
    number_block(prog_.egress_body);
    for (auto& t : prog_.tables) {
      resolve_expr(t.key, nullptr);
      if (t.key->kind != Expr::Kind::FieldRef &&
          t.key->kind != Expr::Kind::MetaRef)
        throw ResolveError(t.pos, "table key must be a field reference");
      std::set<std::string> action_names;
      for (auto& a : t.actions) {
        if (!action_names.insert(a.name).second)
          throw ResolveError(a.pos, "duplicate action '" + a.name + "'");
        check_block(a.body, &a);
      }
      bool found = false;
      for (auto& a : t.actions) found = found || a.name == t.default_action;
      if (!found)
        throw ResolveError(t.pos, "default action '" + t.default_action +
                                      "' is not declared in table '" + t.name + "'");
    }
    check_block(prog_.ingress_body, nullptr);
    check_block(prog_.egress_body, nullptr);
    check_parser();
    check_deparser();
  }

 private:
  void check_decls() {
    std::set<std::string> names;
    for (auto& h : prog_.headers) {
      if (h.name == "meta")
        throw ResolveError(h.pos, "'meta' is reserved for metadata");
      if (!names.insert(h.name).second)
        throw ResolveError(h.pos, "duplicate header '" + h.name + "'");
      std::set<std::string> fields;
      for (auto& f : h.fields) {
        if (!fields.insert(f.name).second)
          throw ResolveError(f.pos, "duplicate field '" + f.name +
                                        "' in header '" + h.name + "'");
        check_width(f.width, f.pos);
      }
    }
    std::set<std::string> metas;
    for (auto& f : prog_.metadata) {
      if (f.name == kMetaEgressPort || f.name == kMetaDropFlag ||
          f.name == kMetaCloneSpec || f.name == kMetaRecircFlag ||
          f.name == kMetaI2IClone)
        throw ResolveError(f.pos, "metadata field '" + f.name +
                                      "' collides with an intrinsic field");
      if (!metas.insert(f.name).second)
        throw ResolveError(f.pos, "duplicate metadata field '" + f.name + "'");
      check_width(f.width, f.pos);
    }
    std::set<std::string> regs;
    for (auto& r : prog_.registers) {
      if (!regs.insert(r.name).second)
        throw ResolveError(r.pos, "duplicate register '" + r.name + "'");
      check_width(r.width, r.pos);
      if (r.size < 1)
        throw ResolveError(r.pos, "register '" + r.name + "' must have size >= 1");
    }
    std::set<std::string> tables;
    for (auto& t : prog_.tables)
      if (!tables.insert(t.name).second)
        throw ResolveError(t.pos, "duplicate table '" + t.name + "'");
  }

  static void check_width(int w, SourcePos pos) {
    if (w < 1 || w > 64)
      throw WidthError(pos, "bit width " + std::to_string(w) +
                                " is outside [1, 64]");
  }

  void number_block(StmtBlock& block) {
    for (auto& st : block) {
      st->node_id = prog_.next_node_id++;
      if (st->kind == Stmt::Kind::If) {
        number_block(st->then_block);
        number_block(st->else_block);
      }
    }
  }

  void check_block(StmtBlock& block, const ActionDecl* action) {
    for (auto& st : block) check_stmt(*st, action);
  }

  void check_stmt(Stmt& st, const ActionDecl* action) {
    switch (st.kind) {
      case Stmt::Kind::Assign:
        resolve_lvalue(st.lhs);
        resolve_expr(st.e0, action);
        break;
      case Stmt::Kind::If:
        resolve_expr(st.e0, action);
        check_block(st.then_block, action);
        check_block(st.else_block, action);
        break;
      case Stmt::Kind::RegRead: {
        resolve_lvalue(st.lhs);
        check_register_access(st);
        break;
      }
      case Stmt::Kind::RegWrite: {
        check_register_access(st);
        resolve_expr(st.e1, action);
        break;
      }
      case Stmt::Kind::Apply: {
        if (!prog_.find_table(st.name))
          throw ResolveError(st.pos, "undeclared table '" + st.name + "'");
        if (action)
          throw ResolveError(st.pos, "apply() is not allowed inside actions");
        break;
      }
      case Stmt::Kind::SetPort:
        resolve_expr(st.e0, action);
        break;
      case Stmt::Kind::AssertLocal:
        resolve_expr(st.e0, action);
        break;
      case Stmt::Kind::Drop:
      case Stmt::Kind::Clone:
      case Stmt::Kind::Recirc:
        break;
    }
  }

  void check_register_access(Stmt& st) {
    const RegisterDecl* r = prog_.find_register(st.name);
    if (!r)
      throw ResolveError(st.pos, "undeclared register '" + st.name + "'");
    resolve_expr(st.e0, nullptr);
    if (st.e0->kind == Expr::Kind::IntLit && st.e0->value >= r->size)
      throw WidthError(st.pos, "constant index " + std::to_string(st.e0->value) +
                                   " is out of range for register '" + st.name +
                                   "[" + std::to_string(r->size) + "]'");
  }

  void resolve_lvalue(LValue& lv) {
    if (lv.is_meta) {
      if (lv.field == kMetaEgressPort) {
        lv.width = kEgressPortWidth;
        return;
      }
      const FieldDecl* f = prog_.find_metadata(lv.field);
      if (!f)
        throw ResolveError(lv.pos, "undeclared metadata field '" + lv.field + "'");
      lv.width = f->width;
    } else {
      const FieldDecl* f = prog_.find_header_field(lv.header, lv.field);
      if (!f)
        throw ResolveError(lv.pos, "undeclared header field '" + lv.header +
                                       "." + lv.field + "'");
      lv.width = f->width;
    }
  }

  // Width discipline: field/metadata reads carry their declared width,
  // literals and parameters are unsized (width 0) and adopt the other
  // operand; arithmetic results are reduced to the result width, shifts keep
  // the left operand's width, comparisons and logic yield width 1.
  void resolve_expr(ExprPtr& e, const ActionDecl* action) {
    switch (e->kind) {
      case Expr::Kind::IntLit:
        e->width = 0;
        break;
      case Expr::Kind::FieldRef: {
        const FieldDecl* f = prog_.find_header_field(e->a, e->b);
        if (!f)
          throw ResolveError(e->pos, "undeclared header field '" + e->a + "." +
                                         e->b + "'");
        e->width = f->width;
        break;
      }
      case Expr::Kind::MetaRef: {
        if (e->b == kMetaEgressPort) {
          e->width = kEgressPortWidth;
          break;
        }
        const FieldDecl* f = prog_.find_metadata(e->b);
        if (!f)
          throw ResolveError(e->pos, "undeclared metadata field '" + e->b + "'");
        e->width = f->width;
        break;
      }
      case Expr::Kind::ParamRef: {
        if (!action || std::find(action->params.begin(), action->params.end(),
                                 e->b) == action->params.end())
          throw ResolveError(e->pos, "undeclared identifier '" + e->b + "'");
        e->width = 0;
        break;
      }
      case Expr::Kind::ValidTest:
        if (!prog_.find_header(e->a))
          throw ResolveError(e->pos, "undeclared header '" + e->a + "'");
        e->width = 1;
        break;
      case Expr::Kind::RegRef: {
        const RegisterDecl* r = prog_.find_register(e->a);
        if (!r)
          throw ResolveError(e->pos, "undeclared register '" + e->a + "'");
        if (e->value >= r->size)
          throw WidthError(e->pos, "constant index " + std::to_string(e->value) +
                                       " is out of range for register '" +
                                       e->a + "'");
        e->width = r->width;
        break;
      }
      case Expr::Kind::Unary:
        resolve_expr(e->lhs, action);
        e->width = e->uop == UnOp::Not ? 1 : e->lhs->width;
        break;
      case Expr::Kind::Binary: {
        resolve_expr(e->lhs, action);
        resolve_expr(e->rhs, action);
        switch (e->bop) {
          case BinOp::Add: case BinOp::Sub: case BinOp::Mul:
          case BinOp::BitAnd: case BinOp::BitOr: case BinOp::BitXor:
            e->width = std::max(e->lhs->width, e->rhs->width);
            break;
          case BinOp::Shl: case BinOp::Shr:
            e->width = e->lhs->width;
            break;
          default:
            e->width = 1;
            break;
        }
        break;
      }
    }
  }

  void check_parser() {
    std::set<std::string> state_names;
    for (auto& s : prog_.parser.states) {
      if (s.name == "accept")
        throw ResolveError(s.pos, "'accept' is reserved");
      if (!state_names.insert(s.name).second)
        throw ResolveError(s.pos, "duplicate parser state '" + s.name + "'");
    }
    if (!prog_.parser.states.empty() && !state_names.count("start"))
      throw ResolveError(prog_.parser.states.front().pos,
                         "parser must declare a 'start' state");
    for (auto& s : prog_.parser.states) {
      for (auto& h : s.extracts)
        if (!prog_.find_header(h))
          throw ResolveError(s.pos, "extract of undeclared header '" + h + "'");
      if (!s.transition.is_accept) {
        resolve_expr(s.transition.select, nullptr);
        if (s.transition.select->kind != Expr::Kind::FieldRef)
          throw ResolveError(s.transition.pos,
                             "select must read a header field");
        auto check_target = [&](const std::string& t) {
          if (t != "accept" && !state_names.count(t))
            throw ResolveError(s.transition.pos,
                               "transition to undeclared state '" + t + "'");
        };
        for (auto& [v, t] : s.transition.cases) check_target(t);
        check_target(s.transition.default_target);
      }
    }
    // Parser machines are DAGs: reject cycles.
    std::map<std::string, int> color;  // 0 unvisited, 1 on stack, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& n) {
      if (n == "accept") return;
      int& c = color[n];
      if (c == 1)
        throw ResolveError({}, "parser state cycle through '" + n + "'");
      if (c == 2) return;
      c = 1;
      const ParserState* st = nullptr;
      for (auto& s : prog_.parser.states)
        if (s.name == n) st = &s;
      if (st && !st->transition.is_accept) {
        for (auto& [v, t] : st->transition.cases) visit(t);
        visit(st->transition.default_target);
      }
      c = 2;
    };
    if (state_names.count("start")) visit("start");
  }

  void check_deparser() {
    std::function<void(const EmitPtr&)> check = [&](const EmitPtr& item) {
      if (item->is_emit) {
        if (!prog_.find_header(item->header))
          throw ResolveError(item->pos,
                             "emit of undeclared header '" + item->header + "'");
      } else {
        ExprPtr c = item->cond;
        resolve_expr(c, nullptr);
        const_cast<EmitItem&>(*item).cond = c;
        for (auto& sub : item->body) check(sub);
      }
    };
    for (auto& item : prog_.deparser.items) check(item);
  }

  DeviceProgram& prog_;
};

}  // namespace detail

inline void validate_device_program(DeviceProgram& prog) {
  detail::Validator(prog).run();
}

inline DeviceProgram parse_device_program(const std::string& text) {
  DeviceProgram prog = detail::PirParser(text).parse();
  validate_device_program(prog);
  return prog;
}

// ---------------------------------------------------------------------------
// Printing (canonical form; parse(print(p)) is structurally identical to p)
// ---------------------------------------------------------------------------

namespace detail {

inline const char* binop_str(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::BitAnd: return "&";
    case BinOp::BitOr: return "|";
    case BinOp::BitXor: return "^";
    case BinOp::Shl: return "<<";
    case BinOp::Shr: return ">>";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::LAnd: return "&&";
    case BinOp::LOr: return "||";
  }
  return "?";
}

inline void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntLit: os << e.value; break;
    case Expr::Kind::FieldRef: os << e.a << "." << e.b; break;
    case Expr::Kind::MetaRef: os << "meta." << e.b; break;
    case Expr::Kind::ParamRef: os << e.b; break;
    case Expr::Kind::ValidTest: os << "valid(" << e.a << ")"; break;
    case Expr::Kind::RegRef: os << e.a << "[" << e.value << "]"; break;
    case Expr::Kind::Unary:
      os << (e.uop == UnOp::Not ? "!" : "~") << "(";
      print_expr(os, *e.lhs);
      os << ")";
      break;
    case Expr::Kind::Binary:
      os << "(";
      print_expr(os, *e.lhs);
      os << " " << binop_str(e.bop) << " ";
      print_expr(os, *e.rhs);
      os << ")";
      break;
  }
}

inline void print_lvalue(std::ostream& os, const LValue& lv) {
  if (lv.is_meta) os << "meta." << lv.field;
  else os << lv.header << "." << lv.field;
}

inline void print_block(std::ostream& os, const StmtBlock& block, int indent);

inline void print_stmt(std::ostream& os, const Stmt& st, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  os << pad;
  switch (st.kind) {
    case Stmt::Kind::Assign:
      print_lvalue(os, st.lhs);
      os << " = ";
      print_expr(os, *st.e0);
      os << ";\n";
      break;
    case Stmt::Kind::If:
      os << "if (";
      print_expr(os, *st.e0);
      os << ") {\n";
      print_block(os, st.then_block, indent + 1);
      os << pad << "}";
      if (!st.else_block.empty()) {
        os << " else {\n";
        print_block(os, st.else_block, indent + 1);
        os << pad << "}";
      }
      os << "\n";
      break;
    case Stmt::Kind::RegRead:
      os << "read(";
      print_lvalue(os, st.lhs);
      os << ", " << st.name << "[";
      print_expr(os, *st.e0);
      os << "]);\n";
      break;
    case Stmt::Kind::RegWrite:
      os << "write(" << st.name << "[";
      print_expr(os, *st.e0);
      os << "], ";
      print_expr(os, *st.e1);
      os << ");\n";
      break;
    case Stmt::Kind::Apply: os << "apply(" << st.name << ");\n"; break;
    case Stmt::Kind::Drop: os << "drop();\n"; break;
    case Stmt::Kind::Clone:
      os << "clone("
         << (st.clone_kind == CloneKind::I2E   ? "i2e"
             : st.clone_kind == CloneKind::I2I ? "i2i"
                                               : "e2e")
         << ");\n";
      break;
    case Stmt::Kind::Recirc: os << "recirc();\n"; break;
    case Stmt::Kind::SetPort:
      os << "set_port(";
      print_expr(os, *st.e0);
      os << ");\n";
      break;
    case Stmt::Kind::AssertLocal:
      os << "/* injected */ assert ";
      print_expr(os, *st.e0);
      os << ";\n";
      break;
  }
}

inline void print_block(std::ostream& os, const StmtBlock& block, int indent) {
  for (const auto& st : block) print_stmt(os, *st, indent);
}

inline void print_emit(std::ostream& os, const EmitItem& item, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  if (item.is_emit) {
    os << pad << "emit(" << item.header << ");\n";
  } else {
    os << pad << "if (";
    print_expr(os, *item.cond);
    os << ") {\n";
    for (const auto& sub : item.body) print_emit(os, *sub, indent + 1);
    os << pad << "}\n";
  }
}

}  // namespace detail

inline std::string print_device_program(const DeviceProgram& prog) {
  std::ostringstream os;
  os << "device " << prog.name << " {\n";
  for (const auto& h : prog.headers) {
    os << "  header " << h.name << " {";
    for (const auto& f : h.fields)
      os << " " << f.name << ": bit<" << f.width << ">;";
    os << " }\n";
  }
  if (!prog.metadata.empty()) {
    os << "  metadata {";
    for (const auto& f : prog.metadata)
      os << " " << f.name << ": bit<" << f.width << ">;";
    os << " }\n";
  }
  for (const auto& r : prog.registers)
    os << "  register " << r.name << "[" << r.size << "] : bit<" << r.width
       << ">;\n";
  for (const auto& t : prog.tables) {
    os << "  table " << t.name << " {\n    key = ";
    detail::print_expr(os, *t.key);
    os << ";\n";
    for (const auto& a : t.actions) {
      os << "    action " << a.name << "(";
      for (size_t i = 0; i < a.params.size(); ++i)
        os << (i ? ", " : "") << a.params[i];
      os << ") {\n";
      detail::print_block(os, a.body, 3);
      os << "    }\n";
    }
    os << "    default = " << t.default_action << ";\n  }\n";
  }
  if (!prog.parser.states.empty()) {
    os << "  parser {\n";
    for (const auto& s : prog.parser.states) {
      os << "    " << s.name << ":";
      for (const auto& h : s.extracts) os << " extract(" << h << ");";
      if (s.transition.is_accept) {
        os << " accept;\n";
      } else {
        os << " select(";
        detail::print_expr(os, *s.transition.select);
        os << ") {";
        for (const auto& [v, t] : s.transition.cases)
          os << " " << v << " -> " << t << ";";
        os << " default -> " << s.transition.default_target << "; }\n";
      }
    }
    os << "  }\n";
  }
  os << "  ingress {\n";
  detail::print_block(os, prog.ingress_body, 2);
  os << "  }\n";
  os << "  egress {\n";
  detail::print_block(os, prog.egress_body, 2);
  os << "  }\n";
  os << "  deparser {\n";
  for (const auto& item : prog.deparser.items)
    detail::print_emit(os, *item, 2);
  os << "  }\n";
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Symbol use/def sets per statement (the dataflow substrate).
// ---------------------------------------------------------------------------

inline void collect_expr_uses(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::FieldRef: out.insert(sym_field(e->a, e->b)); break;
    case Expr::Kind::MetaRef: out.insert(sym_meta(e->b)); break;
    case Expr::Kind::RegRef: out.insert(sym_reg(e->a)); break;
    case Expr::Kind::ValidTest: out.insert(sym_valid(e->a)); break;
    case Expr::Kind::Unary: collect_expr_uses(e->lhs, out); break;
    case Expr::Kind::Binary:
      collect_expr_uses(e->lhs, out);
      collect_expr_uses(e->rhs, out);
      break;
    default: break;
  }
}

inline std::string lvalue_symbol(const LValue& lv) {
  return lv.is_meta ? sym_meta(lv.field) : sym_field(lv.header, lv.field);
}

namespace detail {

inline void block_use_def(const DeviceProgram& prog, const StmtBlock& block,
                          std::set<std::string>& uses,
                          std::set<std::string>& defs);

inline void stmt_use_def(const DeviceProgram& prog, const Stmt& st,
                         std::set<std::string>& uses,
                         std::set<std::string>& defs) {
  switch (st.kind) {
    case Stmt::Kind::Assign:
      collect_expr_uses(st.e0, uses);
      defs.insert(lvalue_symbol(st.lhs));
      break;
    case Stmt::Kind::If:
      collect_expr_uses(st.e0, uses);
      block_use_def(prog, st.then_block, uses, defs);
      block_use_def(prog, st.else_block, uses, defs);
      break;
    case Stmt::Kind::RegRead:
      collect_expr_uses(st.e0, uses);
      uses.insert(sym_reg(st.name));
      defs.insert(lvalue_symbol(st.lhs));
      break;
    case Stmt::Kind::RegWrite:
      collect_expr_uses(st.e0, uses);
      collect_expr_uses(st.e1, uses);
      defs.insert(sym_reg(st.name));
      break;
    case Stmt::Kind::Apply: {
      const TableDecl* t = prog.find_table(st.name);
      if (t) {
        collect_expr_uses(t->key, uses);
        for (const auto& a : t->actions) block_use_def(prog, a.body, uses, defs);
      }
      break;
    }
    case Stmt::Kind::Drop: defs.insert(sym_meta(kMetaDropFlag)); break;
    case Stmt::Kind::Clone: defs.insert(sym_meta(kMetaCloneSpec)); break;
    case Stmt::Kind::Recirc: defs.insert(sym_meta(kMetaRecircFlag)); break;
    case Stmt::Kind::SetPort:
      collect_expr_uses(st.e0, uses);
      defs.insert(sym_meta(kMetaEgressPort));
      break;
    case Stmt::Kind::AssertLocal:
      collect_expr_uses(st.e0, uses);
      break;
  }
}

inline void block_use_def(const DeviceProgram& prog, const StmtBlock& block,
                          std::set<std::string>& uses,
                          std::set<std::string>& defs) {
  for (const auto& st : block) stmt_use_def(prog, *st, uses, defs);
}

}  // namespace detail

// Symbols read by the statement itself (for If: the condition only; nested
// statements are separate CFG nodes).
inline std::set<std::string> stmt_uses(const DeviceProgram& prog,
                                       const Stmt& st) {
  std::set<std::string> uses, defs;
  if (st.kind == Stmt::Kind::If) {
    collect_expr_uses(st.e0, uses);
    return uses;
  }
  detail::stmt_use_def(prog, st, uses, defs);
  return uses;
}

inline std::set<std::string> stmt_defs(const DeviceProgram& prog,
                                       const Stmt& st) {
  std::set<std::string> uses, defs;
  if (st.kind == Stmt::Kind::If) return defs;
  detail::stmt_use_def(prog, st, uses, defs);
  return defs;
}

// An Apply node may leave a register or field untouched depending on the
// matching entry, so only single-target statements kill their symbol; writes
// through a dynamic register index never kill the array.
inline bool stmt_kills(const Stmt& st) {
  return st.kind == Stmt::Kind::Assign || st.kind == Stmt::Kind::RegRead;
}

inline bool device_uses_reentry(const DeviceProgram& prog) {
  bool found = false;
  std::function<void(const StmtBlock&)> scan = [&](const StmtBlock& b) {
    for (const auto& st : b) {
      if (st->kind == Stmt::Kind::Recirc || st->kind == Stmt::Kind::Clone)
        found = true;
      if (st->kind == Stmt::Kind::If) {
        scan(st->then_block);
        scan(st->else_block);
      }
      if (st->kind == Stmt::Kind::Apply) {
        const TableDecl* t = prog.find_table(st->name);
        if (t)
          for (const auto& a : t->actions) scan(a.body);
      }
    }
  };
  scan(prog.ingress_body);
  scan(prog.egress_body);
  return found;
}

}  // namespace pircheck

#endif  // PIRCHECK_PIR_HPP
