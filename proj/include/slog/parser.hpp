#ifndef SLOG_PARSER_HPP_
#define SLOG_PARSER_HPP_

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "slog/ast.hpp"
#include "slog/print.hpp"
#include "slog/subst.hpp"

// Concrete syntax front end. Clauses define non-recursive predicates which
// are macro-expanded at every call site; the final query (or a query handed
// in separately) becomes the formula the engine solves.
//
// Variable sorts are inferred from the positions a variable occupies; a
// variable used only in sort-neutral positions stays undetermined (Any) and
// is settled during search.

namespace slog {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string kind, const std::string& msg, int line, int col)
      : std::runtime_error(kind + " at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        kind_(std::move(kind)), line_(line), col_(col) {}
  const std::string& kind() const { return kind_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  std::string kind_;
  int line_, col_;
};

// Shared fresh-name source. Synthesized names never collide with any name
// seen so far; new user names are registered as they are parsed.
struct FreshNames {
  std::set<std::string> used;
  long counter = 0;

  std::string fresh(const std::string& stem) {
    for (;;) {
      ++counter;
      std::string n = "_" + stem + std::to_string(counter);
      if (used.insert(n).second) return n;
    }
  }
  void note(const std::string& n) { used.insert(n); }
};

struct Definition {
  std::string name;
  std::vector<std::string> params;
  std::vector<Sort> param_sorts;
  FormulaPtr body;                                // fully expanded
  std::vector<std::pair<std::string, Sort>> locals;  // body vars minus params
};

struct Query {
  FormulaPtr formula;
  std::vector<std::string> vars;  // user-written variables, first-occurrence order
};

class Program {
 public:
  Program() { fresh_ = std::make_shared<FreshNames>(); }

  // Parses clauses (and an optional "?- query." / bare "query.") from text.
  // Definitions accumulate across calls.
  std::optional<Query> consult(const std::string& text);

  Query parse_query(const std::string& text);

  const std::map<std::pair<std::string, size_t>, Definition>& defs() const {
    return defs_;
  }
  std::shared_ptr<FreshNames> fresh_names() const { return fresh_; }

 private:
  friend class ClauseParser;
  std::map<std::pair<std::string, size_t>, Definition> defs_;
  std::shared_ptr<FreshNames> fresh_;
};

namespace parse_detail {

struct Token {
  enum class T {
    Ident, Var, Int,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Comma, Slash, Amp, Dot,
    Eq, Neq2 /*unused*/, Leq, Lt, Gt, Geq,
    Plus, Minus, Star,
    ClauseArrow, QueryArrow,
    End,
  };
  T t;
  std::string text;
  Int value;
  int line, col;
};

class Lexer {
 public:
  Lexer(const std::string& src) : src_(src) { next(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    next();
    return t;
  }

 private:
  void error(const std::string& msg) const {
    throw ParseError("syntax error", msg, line_, col_);
  }

  int cur() const { return pos_ < src_.size() ? (unsigned char)src_[pos_] : -1; }
  void adv() {
    if (pos_ < src_.size()) {
      if (src_[pos_] == '\n') { ++line_; col_ = 0; }
      ++col_;
      ++pos_;
    }
  }

  void next() {
    for (;;) {
      while (std::isspace(cur())) adv();
      if (cur() == '%') {
        while (cur() != -1 && cur() != '\n') adv();
        continue;
      }
      break;
    }
    tok_.line = line_;
    tok_.col = col_;
    int c = cur();
    if (c == -1) { tok_.t = Token::T::End; return; }
    if (std::isdigit(c)) {
      std::string num;
      while (std::isdigit(cur())) { num += (char)cur(); adv(); }
      tok_.t = Token::T::Int;
      tok_.value = Int(num);
      return;
    }
    if (std::isalpha(c) || c == '_') {
      std::string id;
      while (std::isalnum(cur()) || cur() == '_') { id += (char)cur(); adv(); }
      tok_.text = id;
      tok_.t = (std::isupper((unsigned char)id[0]) || id[0] == '_')
                   ? Token::T::Var
                   : Token::T::Ident;
      return;
    }
    adv();
    switch (c) {
      case '(': tok_.t = Token::T::LParen; return;
      case ')': tok_.t = Token::T::RParen; return;
      case '{': tok_.t = Token::T::LBrace; return;
      case '}': tok_.t = Token::T::RBrace; return;
      case '[': tok_.t = Token::T::LBracket; return;
      case ']': tok_.t = Token::T::RBracket; return;
      case ',': tok_.t = Token::T::Comma; return;
      case '/': tok_.t = Token::T::Slash; return;
      case '&': tok_.t = Token::T::Amp; return;
      case '.': tok_.t = Token::T::Dot; return;
      case '+': tok_.t = Token::T::Plus; return;
      case '-': tok_.t = Token::T::Minus; return;
      case '*': tok_.t = Token::T::Star; return;
      case '=':
        if (cur() == '<') { adv(); tok_.t = Token::T::Leq; return; }
        tok_.t = Token::T::Eq;
        return;
      case '<': tok_.t = Token::T::Lt; return;
      case '>':
        if (cur() == '=') { adv(); tok_.t = Token::T::Geq; return; }
        tok_.t = Token::T::Gt;
        return;
      case ':':
        if (cur() == '-') { adv(); tok_.t = Token::T::ClauseArrow; return; }
        error("expected ':-'");
        return;
      case '?':
        if (cur() == '-') { adv(); tok_.t = Token::T::QueryArrow; return; }
        error("expected '?-'");
        return;
      default:
        error(std::string("unexpected character '") + (char)c + "'");
    }
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

}  // namespace parse_detail

// ---------------------------------------------------------------------------

class ClauseParser {
 public:
  ClauseParser(Program& prog, const std::string& text)
      : prog_(prog), toks_(lex_all(text)) {}

  // Returns the query if the text contained one.
  std::optional<Query> run(bool query_only) {
    std::optional<Query> q;
    if (query_only) {
      q = parse_query_body();
      expect(parse_detail::Token::T::End, "end of query");
      return q;
    }
    while (peek().t != parse_detail::Token::T::End) {
      if (peek().t == parse_detail::Token::T::QueryArrow) {
        take();
        if (q) err("syntax error", "more than one query");
        q = parse_query_body();
        continue;
      }
      parse_clause();
    }
    return q;
  }

 private:
  using Token = parse_detail::Token;
  using T = parse_detail::Token::T;

  // Prototype formula: user-predicate calls stay symbolic until sorts are
  // known and the macro expansion runs.
  struct Proto;
  using ProtoPtr = std::shared_ptr<Proto>;
  struct Proto {
    enum class Tag { True, False, Atom, Call, And, Or } tag;
    std::optional<Constraint> atom;
    std::string call_name;
    std::vector<TermPtr> call_args;
    int line = 0, col = 0;
    ProtoPtr lhs, rhs;
  };

  static std::vector<Token> lex_all(const std::string& text) {
    parse_detail::Lexer lx(text);
    std::vector<Token> out;
    for (;;) {
      out.push_back(lx.take());
      if (out.back().t == T::End) return out;
    }
  }

  [[noreturn]] void err(const std::string& kind, const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(kind, msg, t.line, t.col);
  }
  [[noreturn]] void err_at(const std::string& kind, const std::string& msg,
                           int line, int col) const {
    throw ParseError(kind, msg, line, col);
  }

  const Token& peek(size_t k = 0) const {
    size_t i = pos_ + k;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(T t) {
    if (peek().t == t) { ++pos_; return true; }
    return false;
  }
  void expect(T t, const std::string& what) {
    if (!accept(t)) err("syntax error", "expected " + what);
  }

  static bool is_builtin(const std::string& n) {
    static const std::set<std::string> names = {
        "un", "nun", "disj", "ndisj", "size", "nsize", "subset",
        "inters", "ninters", "diff", "ndiff", "ninteger", "int",
        "in", "nin", "neq", "is", "or", "true", "false"};
    return names.count(n) != 0;
  }

  // --- clause-level state -------------------------------------------------

  std::map<std::string, Sort> pins_;        // inferred sorts, clause scoped
  std::vector<std::string> var_order_;      // user vars, first occurrence
  std::set<std::string> anon_;              // fresh names for '_'

  void pin(const std::string& v, Sort s, int line, int col) {
    auto it = pins_.find(v);
    if (it == pins_.end()) {
      pins_.emplace(v, s);
      return;
    }
    auto m = sort_meet(it->second, s);
    if (!m)
      err_at("sort error",
             "variable " + v + " used both as " + sort_name(it->second) +
                 " and as " + sort_name(s),
             line, col);
    it->second = *m;
  }

  TermPtr mention_var(const std::string& name, int line, int col) {
    (void)line; (void)col;
    if (name == "_") {
      std::string n = prog_.fresh_->fresh("A");
      anon_.insert(n);
      if (!pins_.count(n)) pins_.emplace(n, Sort::Any);
      return mk_var(n, Sort::Any);
    }
    prog_.fresh_->note(name);
    if (!pins_.count(name)) {
      pins_.emplace(name, Sort::Any);
      var_order_.push_back(name);
    }
    return mk_var(name, Sort::Any);
  }

  // --- terms ----------------------------------------------------------------

  bool starts_term() const {
    switch (peek().t) {
      case T::Int: case T::Var: case T::Ident: case T::LBrace:
      case T::LBracket: case T::Minus: case T::LParen:
        return true;
      default:
        return false;
    }
  }

  // factor := INT | VAR | ident | ident(args) | {..} | [..] | int(a,b)
  //         | ( additive ) | - factor
  TermPtr parse_factor() {
    const Token& t = peek();
    switch (t.t) {
      case T::Int: {
        Token tok = take();
        return mk_int(LinearInt(tok.value));
      }
      case T::Minus: {
        Token m = take();
        TermPtr f = parse_factor();
        auto lin = coerce_linear(f);
        if (!lin) err_at("sort error", "unary minus on a non-integer term", m.line, m.col);
        pin_linear_vars(*lin, m.line, m.col);
        return mk_int(lin->scaled(Int(-1)));
      }
      case T::Var: {
        Token tok = take();
        return mention_var(tok.text, tok.line, tok.col);
      }
      case T::Ident: {
        Token tok = take();
        if (tok.text == "int") return parse_interval(tok);
        std::vector<TermPtr> args;
        if (accept(T::LParen)) {
          if (!accept(T::RParen)) {
            do args.push_back(parse_expr());
            while (accept(T::Comma));
            expect(T::RParen, "')'");
          }
        }
        return mk_ur(tok.text, std::move(args));
      }
      case T::LBrace:
        return parse_set();
      case T::LBracket:
        return parse_tuple();
      case T::LParen: {
        take();
        TermPtr e = parse_expr();
        expect(T::RParen, "')'");
        return e;
      }
      default:
        err("syntax error", "expected a term");
    }
  }

  void pin_linear_vars(const LinearInt& l, int line, int col) {
    for (const auto& [v, c] : l.monos) pin(v, Sort::Int, line, col);
  }

  // additive expression over factors; arithmetic forces Int on its variables
  TermPtr parse_expr() {
    const Token& start = peek();
    TermPtr acc = parse_factor();
    for (;;) {
      T op = peek().t;
      if (op != T::Plus && op != T::Minus && op != T::Star) break;
      Token optok = take();
      TermPtr rhs = parse_factor();
      auto la = coerce_linear(acc);
      auto lb = coerce_linear(rhs);
      if (!la || !lb)
        err_at("sort error", "arithmetic on a non-integer term", optok.line,
               optok.col);
      pin_linear_vars(*la, start.line, start.col);
      pin_linear_vars(*lb, optok.line, optok.col);
      try {
        if (op == T::Plus) acc = mk_int(*la + *lb);
        else if (op == T::Minus) acc = mk_int(*la - *lb);
        else acc = mk_int(la->times(*lb));
      } catch (const NonLinearError&) {
        err_at("nonlinear error", "product of two non-constant integer terms",
               optok.line, optok.col);
      }
    }
    return acc;
  }

  // int(L,H): limits restricted to variables or integer constants
  TermPtr parse_interval(const Token& kw) {
    expect(T::LParen, "'(' after int");
    LinearInt lo = parse_limit();
    expect(T::Comma, "','");
    LinearInt hi = parse_limit();
    expect(T::RParen, "')'");
    (void)kw;
    return mk_interval(std::move(lo), std::move(hi));
  }

  LinearInt parse_limit() {
    const Token& t = peek();
    LinearInt out;
    if (t.t == T::Var) {
      Token tok = take();
      TermPtr v = mention_var(tok.text, tok.line, tok.col);
      pin(v->name, Sort::Int, tok.line, tok.col);
      out = LinearInt::var(v->name);
    } else if (t.t == T::Int) {
      out = LinearInt(take().value);
    } else if (t.t == T::Minus && peek(1).t == T::Int) {
      take();
      out = LinearInt(-take().value);
    } else {
      err("restriction error",
          "interval limits can only be variables or integer constants");
    }
    if (peek().t == T::Plus || peek().t == T::Minus || peek().t == T::Star)
      err("restriction error",
          "interval limits can only be variables or integer constants");
    return out;
  }

  TermPtr parse_set() {
    Token open = take();  // '{'
    if (accept(T::RBrace)) return mk_empty();
    std::vector<TermPtr> elems;
    do elems.push_back(parse_expr());
    while (accept(T::Comma));
    TermPtr tail = mk_empty();
    if (accept(T::Slash)) {
      Token t = peek();
      tail = parse_expr();
      if (is_var(tail)) pin(tail->name, Sort::Set, t.line, t.col);
      else if (!is_cons(tail) && !is_empty(tail) && !is_interval(tail))
        err_at("sort error", "set part of {_/_} must be a set", t.line, t.col);
    }
    expect(T::RBrace, "'}'");
    (void)open;
    return mk_set(elems, tail);
  }

  // [a,b,c] -> pair(a, pair(b, c)); a tuple has at least two components
  TermPtr parse_tuple() {
    Token open = take();  // '['
    std::vector<TermPtr> elems;
    do elems.push_back(parse_expr());
    while (accept(T::Comma));
    expect(T::RBracket, "']'");
    if (elems.size() < 2)
      err_at("syntax error", "a tuple needs at least two components",
             open.line, open.col);
    TermPtr acc = elems.back();
    for (size_t i = elems.size() - 1; i-- > 0;)
      acc = mk_ur("pair", {elems[i], acc});
    return acc;
  }

  // --- formulas ---------------------------------------------------------------

  ProtoPtr proto(Proto::Tag tag) {
    auto p = std::make_shared<Proto>();
    p->tag = tag;
    p->line = peek().line;
    p->col = peek().col;
    return p;
  }
  ProtoPtr proto_atom(Constraint c, int line, int col) {
    auto p = std::make_shared<Proto>();
    p->tag = Proto::Tag::Atom;
    p->atom = std::move(c);
    p->line = line;
    p->col = col;
    return p;
  }

  ProtoPtr parse_formula() {
    ProtoPtr acc = parse_conj();
    while (peek().t == T::Ident && peek().text == "or") {
      take();
      ProtoPtr rhs = parse_conj();
      auto p = proto(Proto::Tag::Or);
      p->lhs = acc;
      p->rhs = rhs;
      acc = p;
    }
    return acc;
  }

  ProtoPtr parse_conj() {
    ProtoPtr acc = parse_atom_formula();
    while (accept(T::Amp)) {
      ProtoPtr rhs = parse_atom_formula();
      auto p = proto(Proto::Tag::And);
      p->lhs = acc;
      p->rhs = rhs;
      acc = p;
    }
    return acc;
  }

  ProtoPtr parse_atom_formula() {
    const Token& t = peek();
    if (t.t == T::Ident && t.text == "true" && peek(1).t != T::LParen) {
      take();
      return proto(Proto::Tag::True);
    }
    if (t.t == T::Ident && t.text == "false" && peek(1).t != T::LParen) {
      take();
      return proto(Proto::Tag::False);
    }
    if (t.t == T::LParen) {
      // Either a parenthesized formula or a parenthesized integer term;
      // try the formula reading first and fall back.
      size_t save = pos_;
      auto save_pins = pins_;
      auto save_order = var_order_;
      try {
        take();
        ProtoPtr f = parse_formula();
        expect(T::RParen, "')'");
        return f;
      } catch (const ParseError&) {
        pos_ = save;
        pins_ = std::move(save_pins);
        var_order_ = std::move(save_order);
        return parse_relation();
      }
    }
    if (t.t == T::Ident && !is_builtin(t.text) && peek(1).t != T::LParen &&
        !starts_relop(peek(1).t) && !is_term_infix(peek(1))) {
      // zero-arity user predicate
      Token tok = take();
      auto p = proto(Proto::Tag::Call);
      p->call_name = tok.text;
      p->line = tok.line;
      p->col = tok.col;
      return p;
    }
    if (t.t == T::Ident && peek(1).t == T::LParen && is_prefix_predicate(t.text))
      return parse_prefix_predicate();
    if (t.t == T::Ident && peek(1).t == T::LParen && !is_builtin(t.text)) {
      // could be a user call or an ur-term starting a relation
      size_t save = pos_;
      Token tok = take();
      take();  // '('
      std::vector<TermPtr> args;
      if (!accept(T::RParen)) {
        do args.push_back(parse_expr());
        while (accept(T::Comma));
        expect(T::RParen, "')'");
      }
      if (starts_relop(peek().t) || is_term_infix(peek())) {
        pos_ = save;
        return parse_relation();
      }
      auto p = proto(Proto::Tag::Call);
      p->call_name = tok.text;
      p->call_args = std::move(args);
      p->line = tok.line;
      p->col = tok.col;
      return p;
    }
    return parse_relation();
  }

  static bool starts_relop(T t) {
    switch (t) {
      case T::Eq: case T::Leq: case T::Lt: case T::Gt: case T::Geq:
        return true;
      default:
        return false;
    }
  }
  static bool is_term_infix(const Token& t) {
    if (t.t == T::Ident)
      return t.text == "in" || t.text == "nin" || t.text == "neq" ||
             t.text == "is";
    switch (t.t) {
      case T::Plus: case T::Minus: case T::Star:
        return true;
      default:
        return false;
    }
  }

  static bool is_prefix_predicate(const std::string& n) {
    static const std::set<std::string> names = {
        "un", "nun", "disj", "ndisj", "size", "nsize", "subset",
        "inters", "ninters", "diff", "ndiff", "ninteger"};
    return names.count(n) != 0;
  }

  ProtoPtr parse_prefix_predicate() {
    Token tok = take();
    expect(T::LParen, "'('");
    std::vector<TermPtr> args;
    CKind kind;
    size_t arity;
    if (tok.text == "un") { kind = CKind::Un; arity = 3; }
    else if (tok.text == "nun") { kind = CKind::Nun; arity = 3; }
    else if (tok.text == "disj") { kind = CKind::Disj; arity = 2; }
    else if (tok.text == "ndisj") { kind = CKind::Ndisj; arity = 2; }
    else if (tok.text == "size") { kind = CKind::Size; arity = 2; }
    else if (tok.text == "nsize") { kind = CKind::Nsize; arity = 2; }
    else if (tok.text == "subset") { kind = CKind::Subset; arity = 2; }
    else if (tok.text == "inters") { kind = CKind::Inters; arity = 3; }
    else if (tok.text == "ninters") { kind = CKind::Ninters; arity = 3; }
    else if (tok.text == "diff") { kind = CKind::Diff; arity = 3; }
    else if (tok.text == "ndiff") { kind = CKind::Ndiff; arity = 3; }
    else { kind = CKind::NInteger; arity = 1; }

    if ((kind == CKind::Size || kind == CKind::Nsize)) {
      args.push_back(parse_expr());
      expect(T::Comma, "','");
      // cardinality argument restricted to a variable or a constant
      const Token& a = peek();
      if (a.t == T::Var) {
        Token v = take();
        TermPtr vt = mention_var(v.text, v.line, v.col);
        pin(vt->name, Sort::Int, v.line, v.col);
        args.push_back(mk_int(LinearInt::var(vt->name)));
      } else if (a.t == T::Int) {
        args.push_back(mk_int(take().value));
      } else if (a.t == T::Minus && peek(1).t == T::Int) {
        take();
        args.push_back(mk_int(-take().value));
      } else {
        err("restriction error",
            "the cardinality argument of " + tok.text +
                " can only be a variable or an integer constant");
      }
      if (peek().t == T::Plus || peek().t == T::Minus || peek().t == T::Star)
        err("restriction error",
            "the cardinality argument of " + tok.text +
                " can only be a variable or an integer constant");
    } else {
      do args.push_back(parse_expr());
      while (accept(T::Comma) && args.size() < arity);
    }
    expect(T::RParen, "')'");
    if (args.size() != arity)
      err_at("syntax error", tok.text + " takes " + std::to_string(arity) +
                                 " arguments",
             tok.line, tok.col);
    Constraint c(kind, std::move(args));
    infer_atom(c, tok.line, tok.col);
    return proto_atom(std::move(c), tok.line, tok.col);
  }

  ProtoPtr parse_relation() {
    const Token& start = peek();
    TermPtr lhs = parse_expr();
    const Token& op = peek();
    CKind kind;
    bool swap = false;
    if (op.t == T::Eq) kind = CKind::Eq;
    else if (op.t == T::Leq) kind = CKind::IntLeq;
    else if (op.t == T::Lt) kind = CKind::IntLt;
    else if (op.t == T::Gt) { kind = CKind::IntLt; swap = true; }
    else if (op.t == T::Geq) { kind = CKind::IntLeq; swap = true; }
    else if (op.t == T::Ident && op.text == "neq") kind = CKind::Neq;
    else if (op.t == T::Ident && op.text == "in") kind = CKind::In;
    else if (op.t == T::Ident && op.text == "nin") kind = CKind::Nin;
    else if (op.t == T::Ident && op.text == "is") kind = CKind::IntEq;
    else err("syntax error", "expected a relation operator");
    Token optok = take();
    TermPtr rhs = parse_expr();

    if (kind == CKind::IntEq && !is_any_var(lhs))
      err_at("syntax error", "left-hand side of 'is' must be a variable",
             start.line, start.col);
    if (swap) std::swap(lhs, rhs);
    Constraint c(kind, {lhs, rhs});
    infer_atom(c, optok.line, optok.col);
    return proto_atom(std::move(c), optok.line, optok.col);
  }

  // Pins variables appearing in sorted argument positions; rejects terms
  // whose definite sort contradicts the predicate signature.
  void infer_atom(const Constraint& c, int line, int col) {
    const auto& sig = constraint_signature(c.kind);
    for (size_t i = 0; i < sig.size(); ++i) {
      const TermPtr& a = c.args[i];
      if (sig[i] == Sort::Any) continue;
      if (is_var(a)) pin(a->name, sig[i], line, col);
      else if (is_int_var(a)) pin(a->lin.var_name(), sig[i], line, col);
      else if (sort_of(a) != sig[i])
        err_at("sort error",
               std::string(sort_name(sig[i])) + " argument expected in " +
                   show(c),
               line, col);
    }
  }

  // --- clauses / queries -----------------------------------------------------

  void parse_clause() {
    const Token& h = peek();
    if (h.t != T::Ident) err("syntax error", "expected a clause head");
    if (is_builtin(h.text))
      err("syntax error", "'" + h.text + "' is reserved");
    Token head = take();
    std::vector<std::string> params;
    if (accept(T::LParen)) {
      do {
        const Token& pt = peek();
        if (pt.t != T::Var || pt.text == "_")
          err("syntax error", "clause parameters must be named variables");
        Token p = take();
        for (const auto& q : params)
          if (q == p.text)
            err_at("syntax error", "duplicate parameter " + p.text, p.line,
                   p.col);
        params.push_back(p.text);
      } while (accept(T::Comma));
      expect(T::RParen, "')'");
    }
    pins_.clear();
    var_order_.clear();
    anon_.clear();
    for (const auto& p : params) {
      pins_.emplace(p, Sort::Any);
      prog_.fresh_->note(p);
    }
    ProtoPtr body;
    if (accept(T::ClauseArrow)) body = parse_formula();
    else body = proto(Proto::Tag::True);
    expect(T::Dot, "'.' at end of clause");

    auto key = std::make_pair(head.text, params.size());
    if (prog_.defs_.count(key))
      err_at("syntax error",
             head.text + "/" + std::to_string(params.size()) +
                 " is defined twice",
             head.line, head.col);

    FormulaPtr expanded = finalize(body, head.text, params.size());
    Definition d;
    d.name = head.text;
    d.params = params;
    for (const auto& p : params) d.param_sorts.push_back(pins_.at(p));
    d.body = expanded;
    std::set<std::string> param_set(params.begin(), params.end());
    std::set<std::string> seen;
    for_each_formula_var(expanded, [&](const std::string& v, Sort) {
      if (param_set.count(v) || !seen.insert(v).second) return;
      auto it = pins_.find(v);
      d.locals.emplace_back(v, it == pins_.end() ? Sort::Any : it->second);
    });
    prog_.defs_.emplace(key, std::move(d));
  }

  std::optional<Query> parse_query_body() {
    pins_.clear();
    var_order_.clear();
    anon_.clear();
    ProtoPtr body = parse_formula();
    expect(T::Dot, "'.' at end of query");
    Query q;
    q.formula = finalize(body, "", SIZE_MAX);
    q.vars = var_order_;
    return q;
  }

  // Resolve calls, settle sorts, expand macros, canonicalize kinds.
  FormulaPtr finalize(const ProtoPtr& body, const std::string& self,
                      size_t self_arity) {
    resolve_calls(body, self, self_arity);
    return lower(body);
  }

  void resolve_calls(const ProtoPtr& p, const std::string& self,
                     size_t self_arity) {
    switch (p->tag) {
      case Proto::Tag::And:
      case Proto::Tag::Or:
        resolve_calls(p->lhs, self, self_arity);
        resolve_calls(p->rhs, self, self_arity);
        return;
      case Proto::Tag::Call: {
        if (p->call_name == self && p->call_args.size() == self_arity)
          err_at("recursion error",
                 "recursive use of " + p->call_name + " is not allowed",
                 p->line, p->col);
        auto key = std::make_pair(p->call_name, p->call_args.size());
        auto it = prog_.defs_.find(key);
        if (it == prog_.defs_.end()) {
          bool name_known = false;
          for (const auto& [k, d] : prog_.defs_)
            if (k.first == p->call_name) name_known = true;
          if (p->call_name == self) name_known = true;
          if (name_known)
            err_at("arity error",
                   p->call_name + " called with " +
                       std::to_string(p->call_args.size()) + " arguments",
                   p->line, p->col);
          err_at("unknown predicate", p->call_name + "/" +
                                          std::to_string(p->call_args.size()),
                 p->line, p->col);
        }
        // parameter sorts constrain the call arguments
        const Definition& d = it->second;
        for (size_t i = 0; i < d.params.size(); ++i) {
          Sort ps = d.param_sorts[i];
          if (ps == Sort::Any) continue;
          const TermPtr& a = p->call_args[i];
          if (is_var(a)) pin(a->name, ps, p->line, p->col);
          else if (is_int_var(a)) pin(a->lin.var_name(), ps, p->line, p->col);
          else if (sort_of(a) != ps)
            err_at("sort error",
                   std::string(sort_name(ps)) + " argument expected by " +
                       d.name,
                   p->line, p->col);
        }
        return;
      }
      default:
        return;
    }
  }

  // Rebuild a term applying the final variable sorts: Int variables become
  // linear terms, other variables carry their sort.
  TermPtr apply_sorts(const TermPtr& t) {
    switch (t->tag) {
      case Term::Tag::Var: {
        auto it = pins_.find(t->name);
        Sort s = it == pins_.end() ? Sort::Any : it->second;
        if (s == Sort::Int) return mk_intvar(t->name);
        if (s == t->var_sort) return t;
        return mk_var(t->name, s);
      }
      case Term::Tag::UrApp: {
        std::vector<TermPtr> args;
        args.reserve(t->args.size());
        for (const auto& a : t->args) args.push_back(apply_sorts(a));
        return mk_ur(t->name, std::move(args));
      }
      case Term::Tag::SetCons:
        return mk_cons(apply_sorts(t->elem), apply_sorts(t->rest));
      default:
        return t;
    }
  }

  FormulaPtr lower(const ProtoPtr& p) {
    switch (p->tag) {
      case Proto::Tag::True: return f_true();
      case Proto::Tag::False: return f_false();
      case Proto::Tag::And: return f_and(lower(p->lhs), lower(p->rhs));
      case Proto::Tag::Or: return f_or(lower(p->lhs), lower(p->rhs));
      case Proto::Tag::Atom: {
        std::vector<TermPtr> args;
        for (const auto& a : p->atom->args) args.push_back(apply_sorts(a));
        Constraint c(p->atom->kind, std::move(args));
        // equality over two integer terms is an integer constraint
        if (c.kind == CKind::Eq && is_intlin(c.args[0]) && is_intlin(c.args[1]))
          c.kind = CKind::IntEq;
        if (c.kind == CKind::Neq && is_intlin(c.args[0]) && is_intlin(c.args[1]))
          c.kind = CKind::IntNeq;
        if (is_int_kind(c.kind)) {
          for (const auto& a : c.args)
            if (!is_intlin(a))
              err_at("sort error", "integer relation over a non-integer term",
                     p->line, p->col);
        }
        if (!wellsorted(c))
          err_at("sort error", "ill-sorted constraint " + show(c), p->line,
                 p->col);
        return f_atom(std::move(c));
      }
      case Proto::Tag::Call: {
        const Definition& d =
            prog_.defs_.at({p->call_name, p->call_args.size()});
        TermSubst s;
        for (size_t i = 0; i < d.params.size(); ++i) {
          TermPtr arg = apply_sorts(p->call_args[i]);
          if (d.param_sorts[i] == Sort::Int && !is_intlin(arg) && !is_var(arg))
            err_at("sort error", "integer argument expected by " + d.name,
                   p->line, p->col);
          s[d.params[i]] = arg;
        }
        for (const auto& [local, sort] : d.locals) {
          std::string n = prog_.fresh_->fresh(
              local[0] == '_' ? local.substr(1) : local);
          s[local] = sort == Sort::Int ? mk_intvar(n) : mk_var(n, sort);
        }
        return subst_formula(d.body, s);
      }
    }
    return f_true();
  }

  Program& prog_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

inline std::optional<Query> Program::consult(const std::string& text) {
  ClauseParser p(*this, text);
  return p.run(false);
}

inline Query Program::parse_query(const std::string& text) {
  ClauseParser p(*this, text);
  auto q = p.run(true);
  return *q;
}

}  // namespace slog

#endif  // SLOG_PARSER_HPP_
