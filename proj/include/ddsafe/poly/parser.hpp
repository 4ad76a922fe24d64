#pragma once

#include <span>
#include <string>
#include <string_view>

#include "ddsafe/poly/polynomial.hpp"

namespace ddsafe::poly {

/// Parses a polynomial expression over the ordered variable names `vars`.
///
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := base ('^' uint)?
///   base   := number | ident | '(' expr ')'
///   number := decimal (e.g. 0.25, 1e-3) or ratio a/b (e.g. 1/3)
///
/// Implicit multiplication is rejected. Throws ParseError with the byte offset.
Polynomial parse_polynomial(std::string_view text, std::span<const std::string> vars);

}  // namespace ddsafe::poly
