#ifndef BALMET_EXPR_HPP
#define BALMET_EXPR_HPP

#include <cctype>
#include <cmath>
#include <cstring>

#include "balmet/common.hpp"

namespace balmet {

namespace detail {

enum class ExprOp { kConst, kZ0, kZ1, kConj, kNeg, kAdd, kSub, kMul, kDiv, kPow };

struct ExprNode {
  ExprOp op;
  cplx value{0.0, 0.0};  // kConst
  int a{-1}, b{-1};      // children
  int exponent{0};       // kPow
};

inline cplx eval_expr_node(const std::vector<ExprNode>& nodes, int idx, cplx z0, cplx z1) {
  const ExprNode& n = nodes[idx];
  switch (n.op) {
    case ExprOp::kConst: return n.value;
    case ExprOp::kZ0: return z0;
    case ExprOp::kZ1: return z1;
    case ExprOp::kConj: return std::conj(eval_expr_node(nodes, n.a, z0, z1));
    case ExprOp::kNeg: return -eval_expr_node(nodes, n.a, z0, z1);
    case ExprOp::kAdd:
      return eval_expr_node(nodes, n.a, z0, z1) + eval_expr_node(nodes, n.b, z0, z1);
    case ExprOp::kSub:
      return eval_expr_node(nodes, n.a, z0, z1) - eval_expr_node(nodes, n.b, z0, z1);
    case ExprOp::kMul:
      return eval_expr_node(nodes, n.a, z0, z1) * eval_expr_node(nodes, n.b, z0, z1);
    case ExprOp::kDiv:
      return eval_expr_node(nodes, n.a, z0, z1) / eval_expr_node(nodes, n.b, z0, z1);
    case ExprOp::kPow: {
      const cplx base = eval_expr_node(nodes, n.a, z0, z1);
      cplx acc(1.0, 0.0);
      for (int i = 0; i < std::abs(n.exponent); ++i) acc *= base;
      return n.exponent >= 0 ? acc : cplx(1.0, 0.0) / acc;
    }
  }
  return {};
}

}  // namespace detail

// Arithmetic over the homogeneous coordinates and their conjugates, used for
// matrix-valued map entries supplied as text.
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*
//   factor  := '-' factor | atom ('^' ('-')? digits)?
//   atom    := number | 'sqrt' '(' number ')' | 'conj' '(' expr ')'
//            | 'z0' | 'z1' | '(' expr ')'
//   number  := digits ('.' digits)? (('e'|'E') ('+'|'-')? digits)?
//
// sqrt takes a nonnegative numeric literal only, so every entry is a
// single-valued function of (z0, z1).  Whitespace is ignored; there is no
// implicit multiplication.
class Expression {
public:
  Expression() = default;
  Expression(std::vector<detail::ExprNode> nodes, int root, std::string src)
      : nodes_(std::move(nodes)), root_(root), src_(std::move(src)) {}

  cplx eval(cplx z0, cplx z1) const {
    if (root_ < 0) throw precondition_error("Expression: evaluating an empty expression");
    return detail::eval_expr_node(nodes_, root_, z0, z1);
  }

  const std::string& source() const { return src_; }

private:
  std::vector<detail::ExprNode> nodes_;
  int root_{-1};
  std::string src_;
};

namespace detail {

class ExprParser {
public:
  explicit ExprParser(const std::string& text) : text_(text) {}

  Expression run() {
    const int root = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return Expression(std::move(nodes_), root, text_);
  }

private:
  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      skip_ws();
      if (consume('+'))
        lhs = push({ExprOp::kAdd, {}, lhs, parse_term(), 0});
      else if (consume('-'))
        lhs = push({ExprOp::kSub, {}, lhs, parse_term(), 0});
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_factor();
    for (;;) {
      skip_ws();
      if (consume('*'))
        lhs = push({ExprOp::kMul, {}, lhs, parse_factor(), 0});
      else if (consume('/'))
        lhs = push({ExprOp::kDiv, {}, lhs, parse_factor(), 0});
      else
        return lhs;
    }
  }

  int parse_factor() {
    skip_ws();
    if (consume('-')) return push({ExprOp::kNeg, {}, parse_factor(), -1, 0});
    const int atom = parse_atom();
    skip_ws();
    if (consume('^')) {
      skip_ws();
      const bool neg = consume('-');
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        fail("integer exponent expected");
      int e = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        e = 10 * e + (text_[pos_++] - '0');
      return push({ExprOp::kPow, {}, atom, -1, neg ? -e : e});
    }
    return atom;
  }

  int parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return push({ExprOp::kConst, parse_number(), -1, -1, 0});
    if (consume('(')) {
      const int inner = parse_expr();
      expect(')');
      return inner;
    }
    if (match_word("sqrt")) {
      expect('(');
      skip_ws();
      const cplx v = parse_number();
      expect(')');
      if (v.real() < 0.0) fail("sqrt of a negative literal");
      return push({ExprOp::kConst, cplx(std::sqrt(v.real()), 0.0), -1, -1, 0});
    }
    if (match_word("conj")) {
      expect('(');
      const int inner = parse_expr();
      expect(')');
      return push({ExprOp::kConj, {}, inner, -1, 0});
    }
    if (match_word("z0")) return push({ExprOp::kZ0, {}, -1, -1, 0});
    if (match_word("z1")) return push({ExprOp::kZ1, {}, -1, -1, 0});
    fail(std::string("unexpected character '") + c + "'");
    return -1;
  }

  cplx parse_number() {
    const size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p + 1;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    if (pos_ == start) fail("number expected");
    const std::string tok = text_.substr(start, pos_ - start);
    try {
      size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail("malformed number '" + tok + "'");
      return cplx(v, 0.0);
    } catch (const parse_error&) {
      throw;
    } catch (const std::exception&) {
      fail("malformed number '" + tok + "'");
    }
    return {};
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  bool match_word(const char* w) {
    const size_t len = std::strlen(w);
    if (text_.compare(pos_, len, w) == 0) {
      pos_ += len;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw parse_error("expression parse error at position " + std::to_string(pos_) + ": " + msg +
                      " in \"" + text_ + "\"");
  }

  int push(ExprNode n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  const std::string& text_;
  size_t pos_{0};
  std::vector<ExprNode> nodes_;
};

}  // namespace detail

inline Expression parse_expression(const std::string& text) {
  return detail::ExprParser(text).run();
}

}  // namespace balmet

#endif
