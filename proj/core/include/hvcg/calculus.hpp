#pragma once

#include "hvcg/expr.hpp"

#include <map>
#include <string>

namespace hvcg {

/// Autonomous vector field: derivative expression per continuous
/// variable. Unlisted variables have derivative 0.
using VectorField = std::map<std::string, Expr>;

/// Local algebraic clean-up: constant folding, neutral elements,
/// double negation. Preserves definedness except for 0·e -> 0.
Expr simplify(const Expr& e);

Expr differentiate(const Expr& e, const std::string& var);
Expr differentiate_time(const Expr& e);

/// Sum over field entries of d(mu)/d(x_i) · f_i.
Expr lie_derivative(const Expr& mu, const VectorField& f);

} // namespace hvcg
