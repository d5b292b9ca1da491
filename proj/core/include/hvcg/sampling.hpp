#pragma once

#include "hvcg/expr.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace hvcg {

/// Random exact store satisfying p over the given variables, with the
/// parameters fixed to `params`. Equalities are solved and linear bounds
/// contracted before rejection sampling on a 2^-10 grid; each accepted
/// point is checked rigorously. nullopt after `attempts` misses.
std::optional<ExactValues> sample_satisfying(const Pred& p, const std::vector<std::string>& vars,
                                             const ExactValues& params, std::mt19937_64& rng,
                                             const std::map<std::string, std::pair<Rational, Rational>>& bounds = {},
                                             int attempts = 20000);

} // namespace hvcg
