#include "crocopat/syntax.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "crocopat/keywords.hpp"

namespace crocopat::syntax {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

// Longest first.
constexpr std::array<std::string_view, 27> kSymbols = {
    "<->", ":=", "->", "!=", "<=", ">=", "(", ")", ",", ";", "{", "}", "[", "]",
    "&",   "|",  "!",  "=",  "<",  ">",  "+", "-", "*", "/", "^", "$", "#"};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token t;
      t.pos = here();
      if (i_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (ident_start(c)) {
        std::size_t start = i_;
        while (i_ < src_.size() && ident_char(src_[i_])) advance();
        t.text = std::string(src_.substr(start, i_ - start));
        t.kind = is_keyword(t.text) ? Token::Kind::Keyword : Token::Kind::Identifier;
      } else if (digit(c) || (c == '.' && i_ + 1 < src_.size() && digit(src_[i_ + 1]))) {
        lex_number(t);
      } else if (c == '"') {
        advance();
        std::size_t start = i_;
        while (i_ < src_.size() && src_[i_] != '"') advance();
        if (i_ >= src_.size()) throw SyntaxError("unterminated string literal", t.pos);
        t.kind = Token::Kind::String;
        t.text = std::string(src_.substr(start, i_ - start));
        advance();
      } else if (c == '@') {
        advance();
        t.kind = Token::Kind::Symbol;
        t.text = "@";
      } else {
        bool matched = false;
        for (auto sym : kSymbols) {
          if (src_.substr(i_, sym.size()) == sym) {
            for (std::size_t k = 0; k < sym.size(); ++k) advance();
            t.kind = Token::Kind::Symbol;
            t.text = std::string(sym);
            matched = true;
            break;
          }
        }
        if (!matched) {
          throw SyntaxError(std::string("unexpected character '") + c + "'", t.pos);
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  Position here() const { return {line_, column_}; }

  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++i_;
  }

  void skip_space_and_comments() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(i_, 2) == "//") {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (src_.substr(i_, 2) == "/*") {
        Position start = here();
        advance();
        advance();
        while (i_ < src_.size() && src_.substr(i_, 2) != "*/") advance();
        if (i_ >= src_.size()) throw SyntaxError("unterminated comment", start);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    std::size_t start = i_;
    while (i_ < src_.size() && digit(src_[i_])) advance();
    if (i_ < src_.size() && src_[i_] == '.') {
      advance();
      while (i_ < src_.size() && digit(src_[i_])) advance();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t k = i_ + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && digit(src_[k])) {
        while (i_ < k) advance();
        while (i_ < src_.size() && digit(src_[i_])) advance();
      }
    }
    t.kind = Token::Kind::Number;
    t.text = std::string(src_.substr(start, i_ - start));
    t.number = std::strtod(t.text.c_str(), nullptr);
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int column_ = 1;
};

bool is_comparison(std::string_view s) {
  return s == "=" || s == "!=" || s == "<" || s == "<=" || s == ">" || s == ">=";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program program() {
    Program p;
    while (peek().kind != Token::Kind::End) p.statements.push_back(statement());
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Symbol && peek(ahead).text == s;
  }
  bool is_keyword(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Keyword && peek(ahead).text == s;
  }
  bool is_identifier(std::size_t ahead = 0) const {
    return peek(ahead).kind == Token::Kind::Identifier && peek(ahead).text != "_";
  }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    std::string found;
    switch (t.kind) {
      case Token::Kind::End: found = "end of input"; break;
      case Token::Kind::String: found = "string \"" + t.text + "\""; break;
      default: found = "'" + t.text + "'"; break;
    }
    throw SyntaxError("expected " + expected + " but found " + found, t.pos);
  }
  void expect_symbol(std::string_view s) {
    if (!is_symbol(s)) fail("'" + std::string(s) + "'");
    next();
  }
  void expect_keyword(std::string_view s) {
    if (!is_keyword(s)) fail(std::string(s));
    next();
  }
  Token expect_identifier() {
    if (!is_identifier()) fail("identifier");
    return next();
  }

  static NodePtr make(Node::Kind kind, Position pos, std::string text = {}) {
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->pos = pos;
    n->text = std::move(text);
    return n;
  }

  // ---------------------------------------------------------- statements

  std::vector<Statement> block() {
    expect_symbol("{");
    std::vector<Statement> out;
    while (!is_symbol("}")) {
      if (peek().kind == Token::Kind::End) fail("'}'");
      out.push_back(statement());
    }
    next();
    return out;
  }

  Statement statement() {
    Statement s;
    s.pos = peek().pos;
    if (is_symbol("{")) {
      s.kind = Statement::Kind::Block;
      s.body = block();
      return s;
    }
    if (is_keyword("IF") || is_keyword("WHILE")) {
      s.kind = is_keyword("IF") ? Statement::Kind::If : Statement::Kind::While;
      next();
      s.expr = expression();
      s.body = block();
      if (s.kind == Statement::Kind::If && is_keyword("ELSE")) {
        next();
        s.has_else = true;
        s.orelse = block();
      }
      return s;
    }
    if (is_keyword("FOR")) {
      next();
      s.kind = Statement::Kind::For;
      Token name = expect_identifier();
      s.name = name.text;
      s.name_pos = name.pos;
      expect_keyword("IN");
      s.expr = expression();
      s.body = block();
      return s;
    }
    if (is_keyword("PRINT")) {
      next();
      s.kind = Statement::Kind::Print;
      s.items.push_back(print_item());
      while (is_symbol(",")) {
        next();
        s.items.push_back(print_item());
      }
      if (is_keyword("TO")) {
        next();
        if (is_keyword("STDERR")) {
          next();
          s.to_stderr = true;
        } else {
          s.target = expression();
        }
      }
      expect_symbol(";");
      return s;
    }
    if (is_keyword("EXEC") || is_keyword("EXIT")) {
      s.kind = is_keyword("EXEC") ? Statement::Kind::Exec : Statement::Kind::Exit;
      next();
      s.expr = expression();
      expect_symbol(";");
      return s;
    }
    if (is_identifier()) {
      Token name = next();
      s.name = name.text;
      s.name_pos = name.pos;
      if (is_symbol(":=")) {
        next();
        s.kind = Statement::Kind::Assign;
        s.expr = expression();
        expect_symbol(";");
        return s;
      }
      if (is_symbol("(")) {
        s.terms = arguments();
        if (is_symbol(":=")) {
          next();
          s.kind = Statement::Kind::RelAssign;
          s.expr = expression();
        } else {
          s.kind = Statement::Kind::RelFact;
        }
        expect_symbol(";");
        return s;
      }
      fail("':=' or '('");
    }
    fail("statement");
  }

  PrintItem print_item() {
    PrintItem item;
    item.pos = peek().pos;
    if (is_keyword("ENDL")) {
      next();
      item.kind = PrintItem::Kind::Endl;
    } else if (is_keyword("RELINFO")) {
      next();
      item.kind = PrintItem::Kind::RelInfo;
      expect_symbol("(");
      item.expr = expression();
      expect_symbol(")");
    } else if (is_symbol("[")) {
      next();
      item.kind = PrintItem::Kind::Prefixed;
      item.prefix = expression();
      expect_symbol("]");
      item.expr = expression();
    } else {
      item.expr = expression();
    }
    return item;
  }

  // ---------------------------------------------------------- expressions

  std::vector<NodePtr> arguments() {
    expect_symbol("(");
    std::vector<NodePtr> out;
    if (!is_symbol(")")) {
      out.push_back(expression());
      while (is_symbol(",")) {
        next();
        out.push_back(expression());
      }
    }
    expect_symbol(")");
    return out;
  }

 public:
  NodePtr expression() {
    NodePtr left = implication();
    if (peek().kind == Token::Kind::Symbol && is_comparison(peek().text)) {
      Token op = next();
      auto n = make(Node::Kind::Compare, op.pos, op.text);
      n->args.push_back(std::move(left));
      n->args.push_back(implication());
      return n;
    }
    return left;
  }

 private:
  NodePtr binary_chain(NodePtr (Parser::*operand)(), std::initializer_list<std::string_view> ops,
                       bool keywords = false) {
    NodePtr left = (this->*operand)();
    for (;;) {
      const Token& t = peek();
      bool hit = false;
      for (auto op : ops) {
        if (t.text == op && (t.kind == Token::Kind::Symbol ||
                             (keywords && t.kind == Token::Kind::Keyword))) {
          hit = true;
        }
      }
      if (!hit) return left;
      Token op = next();
      auto n = make(Node::Kind::Binary, op.pos, op.text);
      n->args.push_back(std::move(left));
      n->args.push_back((this->*operand)());
      left = std::move(n);
    }
  }

  NodePtr implication() { return binary_chain(&Parser::disjunction, {"->", "<->"}); }
  NodePtr disjunction() { return binary_chain(&Parser::conjunction, {"|"}); }
  NodePtr conjunction() { return binary_chain(&Parser::negation, {"&"}); }

  NodePtr negation() {
    if (is_symbol("!")) {
      Token op = next();
      auto n = make(Node::Kind::Unary, op.pos, "!");
      n->args.push_back(negation());
      return n;
    }
    return additive();
  }

  NodePtr additive() { return binary_chain(&Parser::multiplicative, {"+", "-"}); }
  NodePtr multiplicative() {
    return binary_chain(&Parser::power, {"*", "/", "DIV", "MOD"}, true);
  }

  NodePtr power() {
    NodePtr base = minus();
    if (!is_symbol("^")) return base;
    Token op = next();
    auto n = make(Node::Kind::Binary, op.pos, "^");
    n->args.push_back(std::move(base));
    n->args.push_back(power());
    return n;
  }

  NodePtr minus() {
    if (is_symbol("-")) {
      Token op = next();
      auto n = make(Node::Kind::Unary, op.pos, "-");
      n->args.push_back(minus());
      return n;
    }
    return infix_relation();
  }

  // term rel_var term
  NodePtr infix_relation() {
    NodePtr left = operand();
    if (!is_identifier() || is_symbol("(", 1)) return left;
    Token name = next();
    auto n = make(Node::Kind::InfixRelation, name.pos, name.text);
    n->args.push_back(std::move(left));
    n->args.push_back(operand());
    return n;
  }

  NodePtr operand() {
    if (is_symbol("$")) {
      Token op = next();
      auto n = make(Node::Kind::Unary, op.pos, "$");
      n->args.push_back(operand());
      return n;
    }
    return primary();
  }

  NodePtr single_argument() {
    expect_symbol("(");
    NodePtr e = expression();
    expect_symbol(")");
    return e;
  }

  NodePtr primary() {
    const Token& t = peek();
    Position pos = t.pos;
    switch (t.kind) {
      case Token::Kind::Number: {
        auto n = make(Node::Kind::Number, pos, t.text);
        n->number = t.number;
        next();
        return n;
      }
      case Token::Kind::String: {
        auto n = make(Node::Kind::String, pos, t.text);
        next();
        return n;
      }
      case Token::Kind::Identifier: {
        Token name = next();
        if (name.text == "_") return make(Node::Kind::Anonymous, pos, "_");
        if (is_symbol("(")) {
          auto n = make(Node::Kind::Call, pos, name.text);
          n->args = arguments();
          return n;
        }
        return make(Node::Kind::Identifier, pos, name.text);
      }
      case Token::Kind::Keyword: {
        const std::string word = t.text;
        if (word == "EX" || word == "FA") {
          next();
          auto n = make(Node::Kind::Quantifier, pos, word);
          expect_symbol("(");
          do {
            Token attr = expect_identifier();
            n->names.push_back(attr.text);
            n->name_positions.push_back(attr.pos);
            expect_symbol(",");
          } while (is_identifier() && is_symbol(",", 1));
          n->args.push_back(expression());
          expect_symbol(")");
          return n;
        }
        if (word == "TC" || word == "TCFAST") {
          next();
          auto n = make(Node::Kind::Closure, pos, word);
          n->args.push_back(single_argument());
          return n;
        }
        if (word == "NUMBER" || word == "STRING" || word == "MIN" || word == "MAX" ||
            word == "SUM" || word == "AVG") {
          next();
          auto n = make(Node::Kind::Builtin, pos, word);
          n->args.push_back(single_argument());
          return n;
        }
        fail("expression");
      }
      case Token::Kind::Symbol: {
        if (t.text == "#") {
          next();
          auto n = make(Node::Kind::Builtin, pos, "#");
          n->args.push_back(single_argument());
          return n;
        }
        if (t.text == "@") {
          next();
          auto n = make(Node::Kind::Regex, pos, "@");
          n->args.push_back(regex_pattern());
          for (auto& a : arguments()) n->args.push_back(std::move(a));
          return n;
        }
        if (is_comparison(t.text) && is_symbol("(", 1)) {
          Token op = next();
          auto n = make(Node::Kind::PrefixCompare, pos, op.text);
          n->args = arguments();
          return n;
        }
        if (t.text == "(") {
          next();
          auto n = make(Node::Kind::Paren, pos);
          n->args.push_back(expression());
          expect_symbol(")");
          return n;
        }
        fail("expression");
      }
      case Token::Kind::End:
        fail("expression");
    }
    fail("expression");
  }

  // The pattern of @pattern(term): anything that cannot swallow the '('.
  NodePtr regex_pattern() {
    const Token& t = peek();
    if (t.kind == Token::Kind::String) return primary();
    if (t.kind == Token::Kind::Identifier && t.text != "_") {
      Token name = next();
      return make(Node::Kind::Identifier, name.pos, name.text);
    }
    if (is_symbol("(") || is_keyword("STRING")) return primary();
    if (is_symbol("$")) return operand();
    fail("regular expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

Program parse(std::string_view source) { return Parser(tokenize(source)).program(); }

}  // namespace crocopat::syntax
