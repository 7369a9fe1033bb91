#include <gtest/gtest.h>

#include "islkit/islkit.hpp"

using namespace islkit;

namespace {

Formula A(std::string_view s) { return parse(s, LanguageMode::arrow); }
Formula B(std::string_view s) { return parse(s, LanguageMode::box); }

// Random theorems of `logic`, filtered through the kernel.
std::vector<Formula> theorems(Logic logic, std::size_t want, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Formula> out;
  for (int tries = 0; out.size() < want && tries < 20000; ++tries) {
    const Formula f = random_formula_upto(rng, {"p", "q"}, 7, mode_of(logic));
    if (is_derivable(f, logic)) out.push_back(f);
  }
  return out;
}

}  // namespace

TEST(Translate, Clauses) {
  EXPECT_EQ(apply_translation(A("p ~> q"), maps::triv()), A("top ~> (p -> q)"));
  EXPECT_EQ(apply_translation(A("p ~> q"), maps::lb()), B("#(p -> q)"));
  EXPECT_EQ(apply_translation(B("#p"), maps::bl()), A("top ~> p"));
  EXPECT_EQ(apply_translation(B("#p"), maps::red()), A("top ~> p"));
  EXPECT_EQ(apply_translation(A("p ~> q"), maps::id()), A("p ~> q"));
}

TEST(Translate, Homomorphic) {
  EXPECT_EQ(apply_translation(A("(p ~> q) & r | ~(s ~> t)"), maps::triv()),
            A("#(p -> q) & r | ~#(s -> t)"));
  EXPECT_EQ(apply_translation(A("(p ~> q) ~> r"), maps::lb()), B("#(#(p -> q) -> r)"));
}

TEST(Translate, ModeMismatch) {
  EXPECT_THROW(apply_translation(A("p ~> q"), maps::bl()), mode_error);
  EXPECT_THROW(apply_translation(B("#p"), maps::triv()), mode_error);
}

TEST(Translate, ByName) {
  EXPECT_EQ(translation_by_name("lb").name, "lb");
  EXPECT_EQ(apply_translation(B("#p"), translation_by_name("triv.lb")), A("#(top -> p)"));
  EXPECT_EQ(apply_translation(A("p ~> q"), translation_by_name("bl.lb")), A("#(p -> q)"));
  EXPECT_THROW(translation_by_name("nope"), error);
}

TEST(Translate, CompositionEqualsSequentialApplication) {
  Rng rng(21);
  const TranslationMap bl_lb = compose(maps::lb(), maps::bl());
  const TranslationMap lb_bl = compose(maps::bl(), maps::lb());
  for (int i = 0; i < 100; ++i) {
    const Formula f = random_formula_upto(rng, {"p", "q"}, 10, LanguageMode::arrow);
    EXPECT_EQ(apply_translation(f, bl_lb), apply_translation(apply_translation(f, maps::lb()), maps::bl()));
    const Formula g = random_formula_upto(rng, {"p", "q"}, 10, LanguageMode::box);
    EXPECT_EQ(apply_translation(g, lb_bl), apply_translation(apply_translation(g, maps::bl()), maps::lb()));
  }
}

TEST(Translate, SamenessIdentities) {
  const Formula arrow = A("p0 ~> p1");
  EXPECT_TRUE(equivalent(arrow, apply_translation(arrow, compose(maps::lb(), maps::bl())), Logic::isl_a_plus));
  EXPECT_FALSE(equivalent(arrow, apply_translation(arrow, compose(maps::lb(), maps::bl())), Logic::isl_a));
  const Formula box = B("#p0");
  EXPECT_TRUE(equivalent(box, apply_translation(box, compose(maps::bl(), maps::lb())), Logic::isl_box));
  EXPECT_TRUE(equivalent(arrow, apply_translation(arrow, maps::triv()), Logic::isl_a_plus));
}

TEST(Translate, InterpretationSoundness) {
  const auto plus = theorems(Logic::isl_a_plus, 100, 7);
  ASSERT_EQ(plus.size(), 100u);
  for (const auto& t : plus) {
    EXPECT_TRUE(is_derivable(apply_translation(t, maps::triv()), Logic::isl_a)) << show(t);
    EXPECT_TRUE(is_derivable(apply_translation(t, maps::lb()), Logic::isl_box)) << show(t);
  }
  for (const auto& t : theorems(Logic::isl_box, 100, 8))
    EXPECT_TRUE(is_derivable(apply_translation(t, maps::bl()), Logic::isl_a_plus)) << show(t);
}

TEST(Translate, RedAndTrivLbRoutesAgree) {
  Rng rng(9);
  const TranslationMap tl = translation_by_name("triv.lb");
  for (int i = 0; i < 60; ++i) {
    const Formula f = random_formula_upto(rng, {"p", "q"}, 6, LanguageMode::box);
    const bool d = is_derivable(f, Logic::isl_box);
    EXPECT_EQ(is_derivable(apply_translation(f, maps::red()), Logic::isl_a), d) << show(f);
    EXPECT_EQ(is_derivable(apply_translation(f, tl), Logic::isl_a), d) << show(f);
  }
}

TEST(EliminateFixpoints, Examples) {
  const auto F = [](std::string_view s) { return parse(s, LanguageMode::arrow_fp); };
  EXPECT_EQ(eliminate_fixpoints(F("fix(#(* -> p))")), A("#(top -> p)"));
  EXPECT_EQ(eliminate_fixpoints(F("fix(#*)")), A("#top"));
  EXPECT_EQ(eliminate_fixpoints(F("p & q")), A("p & q"));
  EXPECT_EQ(eliminate_fixpoints(F("fix(p ~> fix(* ~> *))")), A("p ~> (top ~> top)"));
  EXPECT_THROW(eliminate_fixpoints(F("fix(* -> p)")), mode_error);
}

TEST(EliminateFixpoints, Coherence) {
  Rng rng(13);
  int checked = 0;
  for (int i = 0; checked < 50 && i < 1000; ++i) {
    const Formula body = substitute(random_modalized(rng, {"p"}, "r", 1 + i % 6, LanguageMode::arrow), "r",
                                    Formula::star());
    const Formula fix = Formula::fix(body);
    if (!fixpoint_grammar_ok(fix)) continue;
    const Formula e = eliminate_fixpoints(fix);
    EXPECT_FALSE(e.has_fix() || e.has_star());
    EXPECT_TRUE(equivalent(e, substitute_star(body, e), Logic::isl_a)) << show(fix);
    ++checked;
  }
  EXPECT_EQ(checked, 50);
}
