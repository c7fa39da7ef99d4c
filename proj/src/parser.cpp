#include <algorithm>
#include <cctype>
#include <set>

#include "rtc/source.hpp"
#include "rtc/wellformed.hpp"

namespace rtc {

const ComponentDef* SystemModel::find(std::string_view name) const {
  for (const auto& c : components)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

enum class Tok { Ident, Number, String, Punct, Keyword, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

const std::set<std::string, std::less<>> kKeywords = {
    "var", "assert", "property", "lemma", "eq", "timeout", "assume", "guarantee", "component", "system",
    "input", "output", "sub", "connect", "implementation", "and", "or", "not", "true", "false", "inf",
    "ite", "pre", "hist", "initz", "frac", "whenever", "when", "occurs", "holds", "during", "always",
    "each", "with", "jitter", "sporadic", "IAT", "exclusively"};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourceLoc loc{line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", loc});
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string id;
        for (;;) {
          while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            id += advance();
          // Dotted names qualify ports and subcomponent variables.
          if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
              (std::isalpha(static_cast<unsigned char>(src_[pos_ + 1])) || src_[pos_ + 1] == '_')) {
            id += advance();
            continue;
          }
          break;
        }
        out.push_back({kKeywords.count(id) ? Tok::Keyword : Tok::Ident, id, loc});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::string num;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) num += advance();
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
          num += advance();
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) num += advance();
        }
        out.push_back({Tok::Number, num, loc});
      } else if (c == '"') {
        advance();
        std::string s;
        while (pos_ < src_.size() && src_[pos_] != '"') {
          if (src_[pos_] == '\n') throw SyntaxError("unterminated string", loc);
          s += advance();
        }
        if (pos_ >= src_.size()) throw SyntaxError("unterminated string", loc);
        advance();
        out.push_back({Tok::String, s, loc});
      } else {
        static const char* two[] = {"->", "=>", "<=", ">=", "<>"};
        std::string p;
        for (const char* t : two)
          if (src_.substr(pos_, 2) == t) p = t;
        if (p.empty()) {
          if (std::string_view("()[]{};:,=<>+-*/").find(c) == std::string_view::npos)
            throw SyntaxError(std::string("unexpected character '") + c + "'", loc);
          p = std::string(1, c);
        }
        for (std::size_t i = 0; i < p.size(); ++i) advance();
        out.push_back({Tok::Punct, p, loc});
      }
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
      if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        SourceLoc loc{line_, col_};
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) throw SyntaxError("unterminated comment", loc);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(Lexer(text).run()) {}

  SourceFile file() {
    SourceFile f;
    std::set<std::string> declared;
    while (!at_end()) {
      if (is_kw("component") || is_kw("system")) {
        if (!f.system) f.system.emplace();
        bool top = is_kw("system");
        ComponentDef def = component();
        if (f.system->find(def.name)) throw SyntaxError("duplicate component '" + def.name + "'", def.loc);
        if (top) {
          if (!f.system->top.empty()) throw SyntaxError("more than one system declared", def.loc);
          f.system->top = def.name;
        }
        f.system->components.push_back(std::move(def));
      } else {
        statement(f.program, declared);
      }
    }
    finish_program(f.program, {});
    return f;
  }

  Expr expr_only() {
    Expr e = expr();
    expect_end();
    return e;
  }

  Pattern pattern_only() {
    Pattern p = pattern();
    expect_end();
    return p;
  }

 private:
  // ----------------------------------------------------------------- tokens
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_kw(std::string_view k, std::size_t off = 0) const {
    return peek(off).kind == Tok::Keyword && peek(off).text == k;
  }
  bool is_punct(std::string_view p, std::size_t off = 0) const {
    return peek(off).kind == Tok::Punct && peek(off).text == p;
  }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void error(const std::string& msg) const {
    const Token& t = peek();
    std::string what = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(msg + " (found " + what + ")", t.loc);
  }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) error("expected '" + std::string(p) + "'");
    take();
  }
  void expect_kw(std::string_view k) {
    if (!is_kw(k)) error("expected '" + std::string(k) + "'");
    take();
  }
  void expect_end() {
    if (!at_end()) error("unexpected trailing input");
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) error("expected identifier");
    return take().text;
  }
  TypeTag type_name() {
    const Token& t = peek();
    if (t.kind != Tok::Ident) error("expected type");
    auto tt = type_from_string(t.text);
    if (!tt) error("unknown type");
    take();
    return *tt;
  }
  Rational number() {
    if (is_kw("frac")) {
      SourceLoc loc = peek().loc;
      Expr e = primary();
      (void)loc;
      return e.constant().as_rational();
    }
    bool negative = false;
    if (is_punct("-")) {
      take();
      negative = true;
    }
    if (peek().kind != Tok::Number) error("expected number");
    Rational q = parse_rational(take().text);
    return negative ? Rational(-q) : q;
  }

  // ------------------------------------------------------------- statements
  static void check_pre(const Expr& e) {
    if (auto v = check_well_formed(e))
      throw SyntaxError("'pre' must be in the right-hand side of '->' (and nested 'pre' separated by '->'): '" +
                            to_source(v->subexpr) + "'",
                        v->subexpr.loc());
  }

  static void check_pre(const Pattern& p) {
    std::visit(
        [](const auto& pat) {
          using T = std::decay_t<decltype(pat)>;
          if constexpr (std::is_same_v<T, WheneverEventEvent>) {
            check_pre(pat.cause);
            check_pre(pat.effect);
          } else if constexpr (std::is_same_v<T, WheneverEventCondition>) {
            check_pre(pat.cause);
            check_pre(pat.condition);
          } else if constexpr (std::is_same_v<T, WhenConditionEvent>) {
            check_pre(pat.condition);
            check_pre(pat.effect);
          } else if constexpr (std::is_same_v<T, Always>) {
            check_pre(pat.condition);
          } else {
            check_pre(pat.event);
          }
        },
        p);
  }

  std::string clause_name(const std::string& kind, std::size_t index) {
    if (peek().kind == Tok::String && is_punct(":", 1)) {
      std::string n = take().text;
      take();
      return n;
    }
    return kind + "_" + std::to_string(index + 1);
  }

  bool starts_pattern() const { return is_kw("whenever") || is_kw("when") || is_kw("always"); }

  std::variant<Expr, Pattern> clause_body() {
    if (starts_pattern()) {
      Pattern p = pattern();
      check_pre(p);
      return p;
    }
    SourceLoc loc = peek().loc;
    Expr e = expr();
    if (is_kw("occurs")) {
      Pattern p = timing_pattern(e, loc);
      check_pre(p);
      return p;
    }
    check_pre(e);
    return e;
  }

  void declare(SpecProgram& p, std::set<std::string>& declared, const std::string& name, TypeTag t, SourceLoc loc) {
    if (name == kTimeVar) throw SyntaxError("'t' is the reserved clock variable", loc);
    if (!declared.insert(name).second) throw SyntaxError("duplicate variable declaration '" + name + "'", loc);
    p.vars.push_back({name, t, loc});
  }

  void statement(ProgramSource& ps, std::set<std::string>& declared) {
    SpecProgram& p = ps.program;
    SourceLoc loc = peek().loc;
    if (is_kw("var") || (peek().kind == Tok::Ident && (is_punct(":", 1) || is_punct(",", 1)))) {
      if (is_kw("var")) take();
      std::vector<std::pair<std::string, SourceLoc>> names;
      names.push_back({peek().text, peek().loc});
      ident();
      while (is_punct(",")) {
        take();
        names.push_back({peek().text, peek().loc});
        ident();
      }
      expect_punct(":");
      TypeTag t = type_name();
      expect_punct(";");
      for (auto& [n, l] : names) declare(p, declared, n, t, l);
      return;
    }
    if (is_kw("timeout")) {
      take();
      p.timeouts.push_back(ident());
      while (is_punct(",")) {
        take();
        p.timeouts.push_back(ident());
      }
      expect_punct(";");
      return;
    }
    if (is_kw("eq")) {
      take();
      SourceLoc nloc = peek().loc;
      std::string name = ident();
      expect_punct(":");
      TypeTag t = type_name();
      expect_punct("=");
      Expr e = expr();
      check_pre(e);
      expect_punct(";");
      declare(p, declared, name, t, nloc);
      p.transition.push_back({name + "_def", eq(Expr::variable(name, nloc), e)});
      return;
    }
    if (is_kw("assert") || is_kw("property")) {
      bool constraint = is_kw("assert");
      take();
      std::size_t index = constraint ? count_role(ps, PatternRole::Constraint) + p.transition.size()
                                     : count_role(ps, PatternRole::Property) + p.properties.size();
      std::string name = clause_name(constraint ? "constraint" : "property", index);
      auto body = clause_body();
      expect_punct(";");
      if (auto* e = std::get_if<Expr>(&body)) {
        (constraint ? p.transition : p.properties).push_back({name, *e});
      } else {
        ps.patterns.push_back(
            {name, std::get<Pattern>(body), constraint ? PatternRole::Constraint : PatternRole::Property, loc});
      }
      return;
    }
    if (is_kw("lemma")) {
      take();
      std::string name = clause_name("lemma", p.lemmas.size());
      Expr e = expr();
      check_pre(e);
      expect_punct(";");
      p.lemmas.push_back({name, e});
      return;
    }
    Expr e = expr();
    check_pre(e);
    expect_punct(";");
    p.transition.push_back({"constraint_" + std::to_string(p.transition.size() + count_role(ps, PatternRole::Constraint) + 1), e});
  }

  static std::size_t count_role(const ProgramSource& ps, PatternRole r) {
    return static_cast<std::size_t>(
        std::count_if(ps.patterns.begin(), ps.patterns.end(), [&](const auto& pc) { return pc.role == r; }));
  }

  static void check_refs(const std::set<std::string>& known, const Expr& e, const std::string& where) {
    for (const auto& n : referenced_vars(e))
      if (n != kTimeVar && !known.count(n)) throw SyntaxError("unknown identifier '" + n + "' in " + where, e.loc());
  }

  static void check_refs(const std::set<std::string>& known, const Pattern& p, const std::string& where) {
    std::visit(
        [&](const auto& pat) {
          using T = std::decay_t<decltype(pat)>;
          if constexpr (std::is_same_v<T, WheneverEventEvent>) {
            check_refs(known, pat.cause, where);
            check_refs(known, pat.effect, where);
          } else if constexpr (std::is_same_v<T, WheneverEventCondition>) {
            check_refs(known, pat.cause, where);
            check_refs(known, pat.condition, where);
          } else if constexpr (std::is_same_v<T, WhenConditionEvent>) {
            check_refs(known, pat.condition, where);
            check_refs(known, pat.effect, where);
          } else if constexpr (std::is_same_v<T, Always>) {
            check_refs(known, pat.condition, where);
          } else {
            check_refs(known, pat.event, where);
          }
        },
        p);
  }

  // Resolves identifiers once the whole scope is known.
  static void finish_program(const ProgramSource& ps, const std::set<std::string>& outer) {
    std::set<std::string> known = outer;
    for (const auto& v : ps.program.vars) known.insert(v.name);
    const auto& p = ps.program;
    for (const auto& c : p.transition) check_refs(known, c.expr, "'" + c.name + "'");
    for (const auto& c : p.properties) check_refs(known, c.expr, "'" + c.name + "'");
    // Lemmas may name variables introduced by pattern lowering; dotted names
    // are resolved after elaboration.
    for (const auto& c : p.lemmas)
      for (const auto& n : referenced_vars(c.expr))
        if (n != kTimeVar && !known.count(n) && n.find('.') == std::string::npos)
          throw SyntaxError("unknown identifier '" + n + "' in '" + c.name + "'", c.expr.loc());
    for (const auto& c : ps.patterns) check_refs(known, c.pattern, "'" + c.name + "'");
    for (const auto& to : p.timeouts)
      if (!p.find(to)) throw Error("unknown timeout variable '" + to + "'");
  }

  ComponentDef component() {
    ComponentDef def;
    def.loc = peek().loc;
    take();
    def.name = ident();
    expect_punct("{");
    std::set<std::string> names;
    auto add_name = [&](const std::string& n, SourceLoc loc) {
      if (n == kTimeVar) throw SyntaxError("'t' is the reserved clock variable", loc);
      if (!names.insert(n).second) throw SyntaxError("duplicate variable declaration '" + n + "'", loc);
    };
    while (!is_punct("}")) {
      if (at_end()) error("unterminated component");
      SourceLoc loc = peek().loc;
      if (is_kw("input") || is_kw("output")) {
        PortDir dir = is_kw("input") ? PortDir::Input : PortDir::Output;
        take();
        std::vector<std::pair<std::string, SourceLoc>> ns;
        ns.push_back({peek().text, peek().loc});
        ident();
        while (is_punct(",")) {
          take();
          ns.push_back({peek().text, peek().loc});
          ident();
        }
        expect_punct(":");
        TypeTag t = type_name();
        expect_punct(";");
        for (auto& [n, l] : ns) {
          add_name(n, l);
          def.ports.push_back({n, t, dir});
        }
      } else if (is_kw("eq")) {
        take();
        SourceLoc nloc = peek().loc;
        std::string n = ident();
        expect_punct(":");
        TypeTag t = type_name();
        expect_punct("=");
        Expr e = expr();
        check_pre(e);
        expect_punct(";");
        add_name(n, nloc);
        def.locals.push_back({n, t, nloc});
        def.eqs.push_back({n + "_def", eq(Expr::variable(n, nloc), e)});
      } else if (is_kw("assume") || is_kw("guarantee")) {
        bool assume = is_kw("assume");
        take();
        auto& list = assume ? def.assumptions : def.guarantees;
        std::string name = clause_name(assume ? "assume" : "guarantee", list.size());
        auto body = clause_body();
        expect_punct(";");
        list.push_back({name, std::move(body), loc});
      } else if (is_kw("sub")) {
        take();
        std::string inst = ident();
        expect_punct(":");
        std::string type = ident();
        expect_punct(";");
        for (const auto& s : def.subs)
          if (s.name == inst) throw SyntaxError("duplicate subcomponent '" + inst + "'", loc);
        def.subs.push_back({inst, type, loc});
      } else if (is_kw("connect")) {
        take();
        std::string from = ident();
        expect_punct("->");
        std::string to = ident();
        expect_punct(";");
        def.connections.push_back({from, to, loc});
      } else if (is_kw("implementation")) {
        take();
        if (def.body) throw SyntaxError("duplicate implementation block", loc);
        expect_punct("{");
        ProgramSource body;
        std::set<std::string> declared = names;
        while (!is_punct("}")) {
          if (at_end()) error("unterminated implementation block");
          statement(body, declared);
        }
        take();
        def.body = std::move(body);
      } else {
        error("expected component item");
      }
    }
    take();
    std::set<std::string> known = names;
    for (const auto& c : def.assumptions) check_clause(known, c);
    for (const auto& c : def.guarantees) check_clause(known, c);
    for (const auto& e : def.eqs) check_refs(known, e.expr, "'" + e.name + "'");
    if (def.body) finish_program(*def.body, names);
    return def;
  }

  static void check_clause(const std::set<std::string>& known, const Clause& c) {
    if (auto* e = std::get_if<Expr>(&c.body)) check_refs(known, *e, "'" + c.name + "'");
    else check_refs(known, std::get<Pattern>(c.body), "'" + c.name + "'");
  }

  // --------------------------------------------------------------- patterns
  Interval interval() {
    Interval iv;
    if (is_punct("[")) iv.low_closed = true;
    else if (is_punct("(")) iv.low_closed = false;
    else error("expected '[' or '('");
    SourceLoc loc = take().loc;
    iv.low = number();
    expect_punct(",");
    iv.high = number();
    if (is_punct("]")) iv.high_closed = true;
    else if (is_punct(")")) iv.high_closed = false;
    else error("expected ']' or ')'");
    take();
    if (iv.low < 0 || iv.high < 0) throw SyntaxError("interval bounds must be nonnegative", loc);
    if (iv.low > iv.high) throw SyntaxError("interval lower bound exceeds upper bound", loc);
    return iv;
  }

  Pattern pattern() {
    SourceLoc loc = peek().loc;
    if (is_kw("always")) {
      take();
      return Always{expr()};
    }
    if (is_kw("whenever")) {
      take();
      Expr cause = expr();
      expect_kw("occurs");
      Expr second = expr();
      if (is_kw("holds")) {
        take();
        expect_kw("during");
        return WheneverEventCondition{cause, second, interval()};
      }
      bool exclusive = false;
      if (is_kw("exclusively")) {
        take();
        exclusive = true;
      }
      expect_kw("occurs");
      expect_kw("during");
      WheneverEventEvent p{cause, second, interval(), exclusive};
      return p;
    }
    if (is_kw("when")) {
      take();
      Expr cond = expr();
      expect_kw("holds");
      expect_kw("during");
      Interval civ = interval();
      Expr effect = expr();
      expect_kw("occurs");
      expect_kw("during");
      return WhenConditionEvent{cond, civ, effect, interval()};
    }
    Expr event = expr();
    if (!is_kw("occurs")) error("expected a pattern phrase");
    return timing_pattern(event, loc);
  }

  Pattern timing_pattern(const Expr& event, SourceLoc loc) {
    expect_kw("occurs");
    if (is_kw("each")) {
      take();
      Periodic p{event, number(), Rational(0)};
      if (is_kw("with")) {
        take();
        expect_kw("jitter");
        p.jitter = number();
      }
      check_rates(p.period, p.jitter, loc);
      if (p.jitter * 2 >= p.period) throw SyntaxError("periodic jitter must be less than half the period", loc);
      return p;
    }
    if (is_kw("sporadic")) {
      take();
      expect_kw("with");
      expect_kw("IAT");
      Sporadic p{event, number(), Rational(0)};
      if (is_kw("and")) {
        take();
        expect_kw("jitter");
        p.jitter = number();
      }
      check_rates(p.iat, p.jitter, loc);
      return p;
    }
    error("expected 'each' or 'sporadic'");
  }

  static void check_rates(const Rational& rate, const Rational& jitter, SourceLoc loc) {
    if (rate <= 0) throw SyntaxError("period / IAT must be positive", loc);
    if (jitter < 0) throw SyntaxError("jitter must be nonnegative", loc);
  }

  // ------------------------------------------------------------ expressions
  Expr expr() { return arrow_expr(); }

  Expr arrow_expr() {
    Expr lhs = implies_expr();
    if (is_punct("->")) {
      SourceLoc loc = take().loc;
      Expr rhs = arrow_expr();
      return Expr::make(Op::Arrow, {lhs, rhs}, loc);
    }
    return lhs;
  }

  Expr implies_expr() {
    Expr lhs = or_expr();
    if (is_punct("=>")) {
      SourceLoc loc = take().loc;
      Expr rhs = implies_expr();
      return Expr::make(Op::Implies, {lhs, rhs}, loc);
    }
    return lhs;
  }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (is_kw("or")) {
      SourceLoc loc = take().loc;
      lhs = Expr::make(Op::Or, {lhs, and_expr()}, loc);
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    // `and jitter` belongs to a sporadic pattern, not to the expression.
    while (is_kw("and") && !is_kw("jitter", 1)) {
      SourceLoc loc = take().loc;
      lhs = Expr::make(Op::And, {lhs, not_expr()}, loc);
    }
    return lhs;
  }

  Expr not_expr() {
    if (is_kw("not")) {
      SourceLoc loc = take().loc;
      return Expr::make(Op::Not, {not_expr()}, loc);
    }
    return cmp_expr();
  }

  Expr cmp_expr() {
    Expr lhs = add_expr();
    static const std::pair<const char*, Op> ops[] = {{"=", Op::Eq}, {"<>", Op::Neq}, {"<", Op::Lt},
                                                     {"<=", Op::Le}, {">", Op::Gt},  {">=", Op::Ge}};
    for (auto [text, op] : ops) {
      if (is_punct(text)) {
        SourceLoc loc = take().loc;
        Expr rhs = add_expr();
        return Expr::make(op, {lhs, rhs}, loc);
      }
    }
    return lhs;
  }

  Expr add_expr() {
    Expr lhs = mul_expr();
    while (is_punct("+") || is_punct("-")) {
      Op op = is_punct("+") ? Op::Add : Op::Sub;
      SourceLoc loc = take().loc;
      lhs = Expr::make(op, {lhs, mul_expr()}, loc);
    }
    return lhs;
  }

  Expr mul_expr() {
    Expr lhs = unary_expr();
    while (is_punct("*") || is_punct("/")) {
      Op op = is_punct("*") ? Op::Mul : Op::Div;
      SourceLoc loc = take().loc;
      lhs = Expr::make(op, {lhs, unary_expr()}, loc);
    }
    return lhs;
  }

  Expr unary_expr() {
    if (is_punct("-")) {
      SourceLoc loc = take().loc;
      if (peek().kind == Tok::Number) {
        Expr lit = number_literal();
        const Value& v = lit.constant();
        Rational q = -v.as_rational();
        return Expr::constant(v.kind() == Value::Kind::Int ? Value::integer(q) : Value::real(q), loc);
      }
      return Expr::make(Op::Neg, {unary_expr()}, loc);
    }
    return primary();
  }

  Expr number_literal() {
    const Token& t = take();
    Rational q = parse_rational(t.text);
    bool is_real = t.text.find('.') != std::string::npos;
    return Expr::constant(is_real ? Value::real(q) : Value::integer(q), t.loc);
  }

  Expr call(Op op, std::size_t arity, SourceLoc loc) {
    expect_punct("(");
    std::vector<Expr> args;
    for (std::size_t i = 0; i < arity; ++i) {
      if (i) expect_punct(",");
      args.push_back(expr());
    }
    expect_punct(")");
    return Expr::make(op, std::move(args), loc);
  }

  Expr primary() {
    const Token& t = peek();
    SourceLoc loc = t.loc;
    switch (t.kind) {
      case Tok::Number: return number_literal();
      case Tok::Ident: return Expr::variable(take().text, loc);
      case Tok::Keyword:
        if (t.text == "true" || t.text == "false") {
          bool b = t.text == "true";
          take();
          return Expr::constant(Value::boolean(b), loc);
        }
        if (t.text == "inf") {
          take();
          return Expr::constant(Value::infinity(), loc);
        }
        if (t.text == "ite") {
          take();
          return call(Op::Ite, 3, loc);
        }
        if (t.text == "pre" || t.text == "hist" || t.text == "initz") {
          Op op = t.text == "pre" ? Op::Pre : (t.text == "hist" ? Op::Hist : Op::Initz);
          take();
          return call(op, 1, loc);
        }
        if (t.text == "frac") {
          take();
          expect_punct("(");
          Rational num = number();
          expect_punct(",");
          Rational den = number();
          expect_punct(")");
          if (num.get_den() != 1 || den.get_den() != 1 || den <= 0)
            throw SyntaxError("frac expects an integer numerator and a positive integer denominator", loc);
          Rational q(num.get_num(), den.get_num());
          q.canonicalize();
          return Expr::constant(Value::real(q), loc);
        }
        break;
      case Tok::Punct:
        if (t.text == "(") {
          take();
          Expr e = expr();
          expect_punct(")");
          return e;
        }
        break;
      default: break;
    }
    error("expected expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

SourceFile parse_source(std::string_view text) { return Parser(text).file(); }

Expr parse_expr(std::string_view text) { return Parser(text).expr_only(); }

Pattern parse_pattern(std::string_view text) { return Parser(text).pattern_only(); }

}  // namespace rtc
