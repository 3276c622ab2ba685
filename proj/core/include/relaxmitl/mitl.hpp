#pragma once

// Frontend for the MITL fragment accepted by the planner.
//
// Grammar (whitespace insensitive, `#` starts a comment to end of line):
//
//   formula  := section ( ";" section )?
//   section  := ( "hard:" | "soft:" ) conj?
//   conj     := term ( "&" term )*
//   term     := "G" atomexpr                          always / always-not
//             | "G" "F" interval atom                 recurrent bounded eventually
//             | "F" interval? atom                    (bounded) eventually
//             | "G" "(" atom "->" "F" interval atom ")"  bounded response
//             | atom "U" interval atom                bounded until
//   atomexpr := atom | "!" atom
//   interval := "[" num "," ( num | "inf" ) ")"
//
// The hard section only admits `G !atom`.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relaxmitl::mitl {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Half-open interval [lower, upper); upper may be +infinity.
struct TimeInterval {
  double lower = 0.0;
  double upper = kInfinity;

  bool bounded() const { return upper != kInfinity; }
  bool contains(double t) const { return t >= lower && t < upper; }
  bool operator==(const TimeInterval&) const = default;
};

enum class Pattern : std::uint8_t {
  AlwaysNot,                      // G !p
  Always,                         // G p
  Eventually,                     // F p
  EventuallyWithin,               // F[a,b) p
  AlwaysEventuallyWithin,         // G F[a,b) p
  AlwaysImpliesEventuallyWithin,  // G (p -> F[a,b) q)
  UntilWithin,                    // p U[a,b) q
  AlwaysUntilFlag,                // p holds up to and including the first q; produced by split_until only
};

enum class TemporalClass : std::uint8_t { TemporallyBounded, NonBoundedTypeI, NonBoundedTypeII };

struct SubFormula {
  Pattern pattern = Pattern::AlwaysNot;
  /// Operand atoms in syntactic order (one or two names).
  std::vector<std::string> atoms;
  TimeInterval interval;

  bool operator==(const SubFormula&) const = default;
};

struct Formula {
  std::vector<std::string> alphabet;
  std::vector<SubFormula> hard;
  std::vector<SubFormula> soft;

  bool operator==(const Formula&) const = default;
};

enum class ParseErrorKind : std::uint8_t {
  Syntax,
  UnknownProposition,
  UnsupportedPattern,
  EmptyInterval,
  DuplicateConjunct,
  EmptyFormula,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, int column, const std::string& what);

  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ParseErrorKind kind_;
  int line_;
  int column_;
};

Formula parse(std::string_view text, const std::vector<std::string>& alphabet);

/// Every identifier used as an atom in `text`, in order of first use.
/// Does not validate the formula.
std::vector<std::string> collect_atoms(std::string_view text);

std::string render(const SubFormula& f);
std::string render(const Formula& f);
std::string to_string(Pattern p);
std::string to_string(TemporalClass c);

TemporalClass classify(const SubFormula& f);

/// Decompose a bounded until into its bounded eventuality and its
/// "left operand holds until the right one" obligation. Identity otherwise.
std::vector<SubFormula> split_until(const SubFormula& f);

/// Patterns whose obligation re-arms after each completed round.
bool is_recurrent(Pattern p);

/// Shortest decimal rendering of a time constant ("10", "2.5", "inf").
std::string format_number(double v);

}  // namespace relaxmitl::mitl
