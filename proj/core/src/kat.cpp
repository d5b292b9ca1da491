#include "hvcg/kat.hpp"

#include "hvcg/error.hpp"

#include <sstream>

namespace hvcg::kat {

namespace {

void check(const FinSpace& a, const FinSpace& b) {
  if (!(a == b)) throw Error("finite space mismatch");
}

FinTransformer make(FinSpace s) {
  if (s.size < 1 || s.size > kMaxStates) throw Error("finite space size out of range");
  return FinTransformer{s, std::vector<StateSet>(static_cast<std::size_t>(s.size), 0)};
}

} // namespace

FinTransformer unit(FinSpace s) {
  FinTransformer f = make(s);
  for (int i = 0; i < s.size; ++i) f.image[i] = StateSet{1} << i;
  return f;
}

FinTransformer zero(FinSpace s) { return make(s); }

FinTransformer top(FinSpace s) {
  FinTransformer f = make(s);
  for (auto& im : f.image) im = s.full();
  return f;
}

FinTest empty_test(FinSpace s) { return FinTest{s, 0}; }
FinTest full_test(FinSpace s) { return FinTest{s, s.full()}; }

FinTransformer as_transformer(const FinTest& p) {
  FinTransformer f = make(p.space);
  for (int i = 0; i < p.space.size; ++i)
    if (p.contains(i)) f.image[i] = StateSet{1} << i;
  return f;
}

FinTransformer kleisli_compose(const FinTransformer& f, const FinTransformer& g) {
  check(f.space, g.space);
  FinTransformer r = make(f.space);
  for (int x = 0; x < f.space.size; ++x) {
    StateSet acc = 0;
    for (int y = 0; y < f.space.size; ++y)
      if ((f.image[x] >> y) & 1u) acc |= g.image[y];
    r.image[x] = acc;
  }
  return r;
}

FinTransformer choice(const FinTransformer& f, const FinTransformer& g) {
  check(f.space, g.space);
  FinTransformer r = f;
  for (std::size_t i = 0; i < r.image.size(); ++i) r.image[i] |= g.image[i];
  return r;
}

FinTransformer star(const FinTransformer& f) {
  FinTransformer x = unit(f.space);
  for (;;) {
    FinTransformer next = choice(unit(f.space), kleisli_compose(f, x));
    if (next == x) return x;
    x = std::move(next);
  }
}

FinTest complement(const FinTest& p) { return FinTest{p.space, p.space.full() & ~p.member}; }

FinTest test_and(const FinTest& p, const FinTest& q) {
  check(p.space, q.space);
  return FinTest{p.space, p.member & q.member};
}

FinTest test_or(const FinTest& p, const FinTest& q) {
  check(p.space, q.space);
  return FinTest{p.space, p.member | q.member};
}

bool leq(const FinTransformer& f, const FinTransformer& g) {
  check(f.space, g.space);
  for (std::size_t i = 0; i < f.image.size(); ++i)
    if (f.image[i] & ~g.image[i]) return false;
  return true;
}

bool hoare_valid(const FinTest& p, const FinTransformer& f, const FinTest& q) {
  check(p.space, f.space);
  check(f.space, q.space);
  for (int s = 0; s < f.space.size; ++s)
    if (p.contains(s) && (f.image[s] & ~q.member)) return false;
  return true;
}

FinTransformer spec_statement(const FinTest& p, const FinTest& q) {
  check(p.space, q.space);
  FinTransformer r = make(p.space);
  for (int s = 0; s < p.space.size; ++s) r.image[s] = p.contains(s) ? q.member : p.space.full();
  return r;
}

FinTransformer if_then_else(const FinTest& p, const FinTransformer& f, const FinTransformer& g) {
  return choice(kleisli_compose(as_transformer(p), f), kleisli_compose(as_transformer(complement(p)), g));
}

FinTransformer while_do(const FinTest& p, const FinTransformer& f) {
  return kleisli_compose(star(kleisli_compose(as_transformer(p), f)), as_transformer(complement(p)));
}

std::string to_string(const FinTransformer& f) {
  std::ostringstream os;
  for (int s = 0; s < f.space.size; ++s) {
    os << (s ? " " : "") << s << "->{";
    bool first = true;
    for (int t = 0; t < f.space.size; ++t) {
      if ((f.image[s] >> t) & 1u) {
        os << (first ? "" : ",") << t;
        first = false;
      }
    }
    os << "}";
  }
  return os.str();
}

} // namespace hvcg::kat
