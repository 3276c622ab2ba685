#include "relaxmitl/mitl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>

namespace relaxmitl::mitl {

ParseError::ParseError(ParseErrorKind kind, int line, int column, const std::string& what)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, Number, Inf, Hard, Soft, Bang, Amp, Semi, LParen, RParen, LBracket, Comma, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        if (pos_ < src_.size() && src_[pos_] == ':' && (t.text == "hard" || t.text == "soft")) {
          advance();
          t.kind = t.text == "hard" ? Tok::Hard : Tok::Soft;
        } else if (t.text == "inf") {
          t.kind = Tok::Inf;
        } else {
          t.kind = Tok::Ident;
        }
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
          advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size())
          throw ParseError(ParseErrorKind::Syntax, t.line, t.column, "malformed number '" + t.text + "'");
        t.kind = Tok::Number;
        t.number = v;
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
        advance();
        advance();
        t.kind = Tok::Arrow;
        t.text = "->";
      } else {
        advance();
        t.text = std::string(1, c);
        switch (c) {
          case '!': t.kind = Tok::Bang; break;
          case '&': t.kind = Tok::Amp; break;
          case ';': t.kind = Tok::Semi; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '[': t.kind = Tok::LBracket; break;
          case ',': t.kind = Tok::Comma; break;
          default:
            throw ParseError(ParseErrorKind::Syntax, t.line, t.column,
                             std::string("unexpected character '") + c + "'");
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
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
  Parser(std::vector<Token> toks, const std::vector<std::string>* alphabet)
      : toks_(std::move(toks)), alphabet_(alphabet) {}

  Formula formula() {
    Formula f;
    bool seen_hard = false;
    bool seen_soft = false;
    for (int section = 0;; ++section) {
      const Token& head = peek();
      if (head.kind != Tok::Hard && head.kind != Tok::Soft)
        fail(head, "expected 'hard:' or 'soft:'");
      const bool hard = head.kind == Tok::Hard;
      if ((hard && seen_hard) || (!hard && seen_soft)) fail(head, "section repeated");
      (hard ? seen_hard : seen_soft) = true;
      next();
      auto& dst = hard ? f.hard : f.soft;
      if (peek().kind != Tok::Semi && peek().kind != Tok::End) conj(dst, hard);
      if (peek().kind == Tok::End) break;
      expect(Tok::Semi, "';'");
      if (section >= 1) fail(peek(), "at most two sections");
    }
    if (f.hard.empty() && f.soft.empty())
      throw ParseError(ParseErrorKind::EmptyFormula, 1, 1, "formula has no conjuncts");
    return f;
  }

  std::vector<std::string> used_atoms;

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg,
                         ParseErrorKind kind = ParseErrorKind::Syntax) const {
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(kind, t.line, t.column, msg + ", found " + found);
  }

  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what);
    return next();
  }

  std::string atom() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || is_keyword(t.text)) fail(t, "expected proposition");
    next();
    if (alphabet_ && std::find(alphabet_->begin(), alphabet_->end(), t.text) == alphabet_->end())
      throw ParseError(ParseErrorKind::UnknownProposition, t.line, t.column,
                       "unknown proposition '" + t.text + "'");
    if (std::find(used_atoms.begin(), used_atoms.end(), t.text) == used_atoms.end())
      used_atoms.push_back(t.text);
    return t.text;
  }

  static bool is_keyword(const std::string& s) { return s == "G" || s == "F" || s == "U"; }
  bool at_keyword(const char* kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }

  TimeInterval interval() {
    const Token& open = expect(Tok::LBracket, "'['");
    TimeInterval iv;
    iv.lower = expect(Tok::Number, "number").number;
    expect(Tok::Comma, "','");
    if (peek().kind == Tok::Inf) {
      next();
      iv.upper = kInfinity;
    } else {
      iv.upper = expect(Tok::Number, "number or 'inf'").number;
    }
    expect(Tok::RParen, "')'");
    if (iv.upper <= iv.lower)
      throw ParseError(ParseErrorKind::EmptyInterval, open.line, open.column,
                       "empty interval [" + format_number(iv.lower) + "," + format_number(iv.upper) + ")");
    return iv;
  }

  void conj(std::vector<SubFormula>& dst, bool hard) {
    for (;;) {
      const Token& start = peek();
      SubFormula f = term();
      if (hard && f.pattern != Pattern::AlwaysNot)
        throw ParseError(ParseErrorKind::UnsupportedPattern, start.line, start.column,
                         "hard constraints must have the form 'G !p'");
      if (std::find(dst.begin(), dst.end(), f) != dst.end())
        throw ParseError(ParseErrorKind::DuplicateConjunct, start.line, start.column,
                         "duplicate conjunct '" + render(f) + "'");
      dst.push_back(std::move(f));
      if (peek().kind != Tok::Amp) return;
      next();
    }
  }

  [[noreturn]] void unsupported(const Token& t, const std::string& msg) const {
    throw ParseError(ParseErrorKind::UnsupportedPattern, t.line, t.column, msg);
  }

  SubFormula term() {
    const Token& start = peek();
    SubFormula f;
    if (at_keyword("G")) {
      next();
      if (peek().kind == Tok::Bang) {
        next();
        f.pattern = Pattern::AlwaysNot;
        f.atoms = {atom()};
      } else if (at_keyword("F")) {
        next();
        if (peek().kind != Tok::LBracket) unsupported(start, "'G F' requires a bounded interval");
        f.interval = interval();
        if (!f.interval.bounded()) unsupported(start, "'G F' requires a bounded interval");
        f.pattern = Pattern::AlwaysEventuallyWithin;
        f.atoms = {atom()};
      } else if (peek().kind == Tok::LParen) {
        next();
        std::string trigger = atom();
        expect(Tok::Arrow, "'->'");
        if (!at_keyword("F")) fail(peek(), "expected 'F'");
        next();
        f.interval = interval();
        if (!f.interval.bounded()) unsupported(start, "response requires a bounded interval");
        std::string response = atom();
        expect(Tok::RParen, "')'");
        f.pattern = Pattern::AlwaysImpliesEventuallyWithin;
        f.atoms = {std::move(trigger), std::move(response)};
      } else if (at_keyword("G")) {
        unsupported(start, "nested temporal operators are not supported");
      } else {
        f.pattern = Pattern::Always;
        f.atoms = {atom()};
      }
    } else if (at_keyword("F")) {
      next();
      if (peek().kind == Tok::LBracket) f.interval = interval();
      if (at_keyword("G") || at_keyword("F"))
        unsupported(start, "nested temporal operators are not supported");
      f.pattern = f.interval.bounded() ? Pattern::EventuallyWithin : Pattern::Eventually;
      if (!f.interval.bounded() && f.interval.lower != 0.0)
        unsupported(start, "unbounded eventually must start at 0");
      f.atoms = {atom()};
    } else if (peek().kind == Tok::Bang) {
      unsupported(start, "bare negation is not supported; use 'G !p'");
    } else {
      std::string left = atom();
      if (!at_keyword("U")) {
        unsupported(start, "bare propositions are not supported; use 'G p' or 'F p'");
      }
      next();
      f.interval = interval();
      if (!f.interval.bounded()) unsupported(start, "until requires a bounded interval");
      std::string right = atom();
      f.pattern = Pattern::UntilWithin;
      f.atoms = {std::move(left), std::move(right)};
    }
    return f;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::vector<std::string>* alphabet_;
};

std::string render_interval(const TimeInterval& iv) {
  return "[" + format_number(iv.lower) + "," + format_number(iv.upper) + ")";
}

std::string render_conj(const std::vector<SubFormula>& fs) {
  std::string out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) out += " & ";
    out += render(fs[i]);
  }
  return out;
}

}  // namespace

Formula parse(std::string_view text, const std::vector<std::string>& alphabet) {
  if (alphabet.empty()) throw ParseError(ParseErrorKind::UnknownProposition, 1, 1, "empty alphabet");
  Parser p(Lexer(text).run(), &alphabet);
  Formula f = p.formula();
  for (const auto& a : alphabet)
    if (std::find(f.alphabet.begin(), f.alphabet.end(), a) == f.alphabet.end()) f.alphabet.push_back(a);
  return f;
}

std::vector<std::string> collect_atoms(std::string_view text) {
  std::vector<std::string> atoms;
  for (const Token& t : Lexer(text).run()) {
    if (t.kind != Tok::Ident || t.text == "G" || t.text == "F" || t.text == "U") continue;
    if (std::find(atoms.begin(), atoms.end(), t.text) == atoms.end()) atoms.push_back(t.text);
  }
  return atoms;
}

std::string format_number(double v) {
  if (v == kInfinity) return "inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string render(const SubFormula& f) {
  switch (f.pattern) {
    case Pattern::AlwaysNot: return "G !" + f.atoms.at(0);
    case Pattern::Always: return "G " + f.atoms.at(0);
    case Pattern::Eventually: return "F " + f.atoms.at(0);
    case Pattern::EventuallyWithin: return "F" + render_interval(f.interval) + " " + f.atoms.at(0);
    case Pattern::AlwaysEventuallyWithin: return "G F" + render_interval(f.interval) + " " + f.atoms.at(0);
    case Pattern::AlwaysImpliesEventuallyWithin:
      return "G (" + f.atoms.at(0) + " -> F" + render_interval(f.interval) + " " + f.atoms.at(1) + ")";
    case Pattern::UntilWithin:
      return f.atoms.at(0) + " U" + render_interval(f.interval) + " " + f.atoms.at(1);
    case Pattern::AlwaysUntilFlag: return f.atoms.at(0) + " W " + f.atoms.at(1);
  }
  return {};
}

std::string render(const Formula& f) {
  std::string out = "hard:";
  if (!f.hard.empty()) out += " " + render_conj(f.hard);
  out += " ; soft:";
  if (!f.soft.empty()) out += " " + render_conj(f.soft);
  return out;
}

std::string to_string(Pattern p) {
  switch (p) {
    case Pattern::AlwaysNot: return "AlwaysNot";
    case Pattern::Always: return "Always";
    case Pattern::Eventually: return "Eventually";
    case Pattern::EventuallyWithin: return "EventuallyWithin";
    case Pattern::AlwaysEventuallyWithin: return "AlwaysEventuallyWithin";
    case Pattern::AlwaysImpliesEventuallyWithin: return "AlwaysImpliesEventuallyWithin";
    case Pattern::UntilWithin: return "UntilWithin";
    case Pattern::AlwaysUntilFlag: return "AlwaysUntilFlag";
  }
  return "?";
}

std::string to_string(TemporalClass c) {
  switch (c) {
    case TemporalClass::TemporallyBounded: return "TemporallyBounded";
    case TemporalClass::NonBoundedTypeI: return "NonBoundedTypeI";
    case TemporalClass::NonBoundedTypeII: return "NonBoundedTypeII";
  }
  return "?";
}

TemporalClass classify(const SubFormula& f) {
  switch (f.pattern) {
    case Pattern::AlwaysNot:
    case Pattern::Always:
    case Pattern::AlwaysUntilFlag:
      return TemporalClass::NonBoundedTypeII;
    case Pattern::Eventually:
      return TemporalClass::NonBoundedTypeI;
    case Pattern::EventuallyWithin:
    case Pattern::AlwaysEventuallyWithin:
    case Pattern::AlwaysImpliesEventuallyWithin:
    case Pattern::UntilWithin:
      return TemporalClass::TemporallyBounded;
  }
  return TemporalClass::TemporallyBounded;
}

std::vector<SubFormula> split_until(const SubFormula& f) {
  if (f.pattern != Pattern::UntilWithin) return {f};
  SubFormula within{Pattern::EventuallyWithin, {f.atoms.at(1)}, f.interval};
  SubFormula flag{Pattern::AlwaysUntilFlag, {f.atoms.at(0), f.atoms.at(1)}, TimeInterval{}};
  return {std::move(within), std::move(flag)};
}

bool is_recurrent(Pattern p) {
  return p == Pattern::AlwaysEventuallyWithin || p == Pattern::AlwaysImpliesEventuallyWithin;
}

}  // namespace relaxmitl::mitl
