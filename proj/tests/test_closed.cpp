#include <gtest/gtest.h>

#include "islkit/islkit.hpp"
#include "oracle.hpp"

using namespace islkit;

namespace {

Formula A(std::string_view s) { return parse(s, LanguageMode::arrow); }

Degree from_json(const nlohmann::json& j) {
  return j.is_string() ? Degree::infinity() : Degree(j.get<std::size_t>());
}

Kind kind_of(const std::string& op) {
  if (op == "and") return Kind::And;
  if (op == "or") return Kind::Or;
  if (op == "imp") return Kind::Imp;
  return Kind::Arrow;
}

}  // namespace

TEST(Degree, Arithmetic) {
  const Degree inf = Degree::infinity();
  EXPECT_EQ(Degree(2) + inf, inf);
  EXPECT_EQ(inf + Degree(3), inf);
  EXPECT_EQ(inf + inf, inf);
  EXPECT_EQ(Degree(2) + Degree(3), Degree(5));
  EXPECT_LT(Degree(100), inf);
  EXPECT_LT(Degree(1), Degree(2));
  EXPECT_EQ(inf.to_string(), "inf");
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_closed(A("bot -> #bot")), Degree::infinity());
  EXPECT_EQ(normalize_closed(A("#bot ~> bot")), Degree(1));
  EXPECT_EQ(normalize_closed(A("#bot & ##bot")), Degree(1));
  EXPECT_EQ(normalize_closed(parse("##bot", LanguageMode::box)), Degree(2));
  EXPECT_THROW(normalize_closed(A("p")), error);
}

TEST(Normalize, TableMatchesOracle) {
  for (const auto& c : test::oracle()["closed"]) {
    const Degree a = from_json(c["alpha"]), b = from_json(c["beta"]);
    const Formula f = Formula::make_binary(kind_of(c["op"]), degree_to_formula(a), degree_to_formula(b));
    EXPECT_EQ(normalize_closed(f), from_json(c["degree"])) << show(f);
  }
}

TEST(DegreeToFormula, Examples) {
  EXPECT_EQ(degree_to_formula(Degree(0)), A("bot"));
  EXPECT_EQ(degree_to_formula(Degree(2)), A("##bot"));
  EXPECT_EQ(degree_to_formula(Degree::infinity()), A("top"));
  EXPECT_EQ(degree_to_formula(Degree(1), LanguageMode::box), parse("#bot", LanguageMode::box));
  EXPECT_EQ(render_degree_formula(Degree(200)), "#^200 bot");
  EXPECT_EQ(render_degree_formula(Degree(3)), "###bot");
}

TEST(DegreeToFormula, InverseOfNormalize) {
  for (std::size_t n = 0; n <= 5; ++n) {
    EXPECT_EQ(normalize_closed(degree_to_formula(Degree(n))), Degree(n));
    EXPECT_EQ(normalize_closed(degree_to_formula(Degree(n), LanguageMode::box)), Degree(n));
  }
  EXPECT_EQ(normalize_closed(degree_to_formula(Degree::infinity())), Degree::infinity());
}

TEST(Normalize, SoundAgainstKernel) {
  Rng rng(61);
  for (int i = 0; i < 100; ++i) {
    const Formula f = random_formula_upto(rng, {}, 6, LanguageMode::arrow);
    const Formula nf = degree_to_formula(normalize_closed(f));
    EXPECT_TRUE(equivalent(f, nf, Logic::isl_a)) << show(f);
    const Formula g = random_formula_upto(rng, {}, 6, LanguageMode::box);
    EXPECT_TRUE(equivalent(g, degree_to_formula(normalize_closed(g), LanguageMode::box), Logic::isl_box)) << show(g);
  }
}

TEST(Normalize, LatticeHomomorphism) {
  Rng rng(67);
  for (int i = 0; i < 100; ++i) {
    const Formula f = random_formula_upto(rng, {}, 6, LanguageMode::arrow);
    const Formula g = random_formula_upto(rng, {}, 6, LanguageMode::arrow);
    EXPECT_EQ(normalize_closed(Formula::conj(f, g)), std::min(normalize_closed(f), normalize_closed(g)));
    EXPECT_EQ(normalize_closed(Formula::disj(f, g)), std::max(normalize_closed(f), normalize_closed(g)));
  }
}
