#include "support/laws.hpp"

#include <doctest.h>

using namespace hvcg::kat;

namespace {

FinTransformer make(int n, std::vector<StateSet> img) { return {FinSpace{n}, std::move(img)}; }
StateSet bit(int s) { return StateSet{1} << s; }

FinTransformer rotate3() { return make(3, {bit(1), bit(2), bit(0)}); }

} // namespace

TEST_SUITE("kat") {

TEST_CASE("kleisli composition") {
  FinSpace s{3};
  FinTransformer f = rotate3();
  CHECK(kleisli_compose(f, unit(s)) == f);
  CHECK(kleisli_compose(unit(s), f) == f);
  CHECK(kleisli_compose(zero(s), f) == zero(s));
  FinTransformer g = make(3, {bit(0), bit(0), bit(0)});
  CHECK(kleisli_compose(f, g) == g);
  CHECK_THROWS(kleisli_compose(f, unit(FinSpace{2})));
}

TEST_CASE("choice, star and complement") {
  FinSpace s{3};
  CHECK(star(zero(s)) == unit(s));
  CHECK(star(rotate3()).image[0] == 0b111u);
  CHECK(choice(rotate3(), unit(s)).image[2] == (bit(0) | bit(2)));
  CHECK(complement(empty_test(s)) == full_test(s));
  // a chain 0 -> 1 -> 2 needs two iterations to stabilise
  FinTransformer chain = make(3, {bit(1), bit(2), 0});
  CHECK(star(chain).image == std::vector<StateSet>{0b111, 0b110, 0b100});
}

TEST_CASE("hoare validity") {
  FinSpace s{3};
  FinTest p{s, 0b011};
  CHECK(hoare_valid(p, unit(s), p));
  CHECK(hoare_valid(full_test(s), zero(s), empty_test(s)));
  FinTransformer f = make(2, {bit(1), bit(1)});
  CHECK_FALSE(hoare_valid(FinTest{FinSpace{2}, bit(0)}, f, FinTest{FinSpace{2}, bit(0)}));
}

TEST_CASE("specification statement") {
  FinSpace s{3};
  CHECK(spec_statement(empty_test(s), FinTest{s, bit(1)}) == top(s));
  FinTransformer sp = spec_statement(FinTest{s, bit(0)}, FinTest{s, bit(1)});
  CHECK(sp.image == std::vector<StateSet>{bit(1), 0b111, 0b111});
}

TEST_CASE("conditional and while") {
  FinSpace s{2};
  FinTransformer f = make(2, {bit(1), bit(1)});
  FinTransformer g = make(2, {bit(0), bit(0)});
  CHECK(if_then_else(full_test(s), f, g) == f);
  CHECK(while_do(empty_test(s), f) == unit(s));
  CHECK(while_do(FinTest{s, bit(0)}, f).image[0] == bit(1));
  CHECK(while_do(FinTest{s, bit(0)}, f).image[1] == bit(1));
}

TEST_CASE("laws on random instances") {
  for (const auto& suite : {hvcg::laws::kat_axioms(), hvcg::laws::hoare_rules(), hvcg::laws::refinement_rules()}) {
    auto failures = hvcg::laws::run_laws(suite, 500, 11);
    for (const auto& f : failures) FAIL_CHECK(f.law << " failed " << f.count << " times");
  }
}

TEST_CASE("specification extremality at n <= 2") {
  CHECK(hvcg::laws::spec_extremality_failures(1) == 0);
  CHECK(hvcg::laws::spec_extremality_failures(2) == 0);
}

}
