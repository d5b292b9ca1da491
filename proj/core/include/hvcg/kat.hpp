#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hvcg::kat {

/// States 0..n-1 of a small finite space; subsets are bitmasks.
using StateSet = std::uint32_t;

inline constexpr int kMaxStates = 16;

struct FinSpace {
  int size = 1;

  StateSet full() const { return size >= 32 ? ~StateSet{0} : (StateSet{1} << size) - 1; }
  friend bool operator==(const FinSpace& a, const FinSpace& b) { return a.size == b.size; }
};

/// Subidentity transformer, represented by the subset it keeps.
struct FinTest {
  FinSpace space;
  StateSet member = 0;

  bool contains(int s) const { return (member >> s) & 1u; }
  friend bool operator==(const FinTest& a, const FinTest& b) {
    return a.space == b.space && a.member == b.member;
  }
};

/// s -> image[s], a map from states to sets of states.
struct FinTransformer {
  FinSpace space;
  std::vector<StateSet> image;

  friend bool operator==(const FinTransformer& a, const FinTransformer& b) {
    return a.space == b.space && a.image == b.image;
  }
};

FinTransformer unit(FinSpace s);  // s -> {s}
FinTransformer zero(FinSpace s);  // s -> {}
FinTransformer top(FinSpace s);   // s -> S
FinTest empty_test(FinSpace s);
FinTest full_test(FinSpace s);

FinTransformer as_transformer(const FinTest& p);

FinTransformer kleisli_compose(const FinTransformer& f, const FinTransformer& g);
FinTransformer choice(const FinTransformer& f, const FinTransformer& g);
/// Least fixpoint of X = unit + f;X by iteration to stabilisation.
FinTransformer star(const FinTransformer& f);

FinTest complement(const FinTest& p);
FinTest test_and(const FinTest& p, const FinTest& q);
FinTest test_or(const FinTest& p, const FinTest& q);

/// Pointwise inclusion: the refinement order f <= g.
bool leq(const FinTransformer& f, const FinTransformer& g);

/// For every s in p, f(s) is contained in q.
bool hoare_valid(const FinTest& p, const FinTransformer& f, const FinTest& q);

/// [p,q]: s -> q if p(s) else S. The greatest f with {p} f {q}.
FinTransformer spec_statement(const FinTest& p, const FinTest& q);

FinTransformer if_then_else(const FinTest& p, const FinTransformer& f, const FinTransformer& g);
FinTransformer while_do(const FinTest& p, const FinTransformer& f);

std::string to_string(const FinTransformer& f);

} // namespace hvcg::kat
