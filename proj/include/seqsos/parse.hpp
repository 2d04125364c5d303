#pragma once

#include "seqsos/polynomial.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace seqsos {

/// Error with a position into the offending input text.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int pos)
      : std::runtime_error(msg + " (at offset " + std::to_string(pos) + ")"),
        position(pos) {}
  int position;
};

/// Sum of products of decision-variable references with polynomial
/// coefficients: each entry maps a sorted multiset of reference names to the
/// coefficient polynomial multiplying their product. The empty multiset holds
/// the affine offset.
struct ParsedExpr {
  std::map<std::vector<std::string>, Polynomial> terms;
};

/// Parse an expression over numbers, variables x1..xn, `+ - * ^ ( )` and,
/// when allow_refs is set, decision references `@name`. `*` may be omitted
/// between adjacent factors; whitespace is ignored.
///
/// If nvars < 0 the variable count is inferred from the largest index seen
/// (at least 1).
ParsedExpr parse_expression(std::string_view text, int nvars, bool allow_refs);

/// Parse a plain polynomial (no decision references).
Polynomial parse_polynomial(std::string_view text, int nvars = -1);

/// Largest x-index appearing in the text (0 if none). Does not validate.
int scan_max_var_index(std::string_view text);

}  // namespace seqsos
