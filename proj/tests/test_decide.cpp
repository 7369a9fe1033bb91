#include <gtest/gtest.h>

#include "islkit/islkit.hpp"
#include "oracle.hpp"
#include "schemes.hpp"

using namespace islkit;

namespace {

Formula A(std::string_view s) { return parse(s, LanguageMode::arrow); }
Formula B(std::string_view s) { return parse(s, LanguageMode::box); }

std::set<std::string> names(const AdequateSet& X, const TypeBits& t) {
  std::set<std::string> out;
  for (const auto& f : X.members(t)) out.insert(render(f, mode_of(X.logic())));
  return out;
}

std::set<std::set<std::string>> type_names(const AdequateSet& X, const std::vector<TypeBits>& ts) {
  std::set<std::set<std::string>> out;
  for (const auto& t : ts) out.insert(names(X, t));
  return out;
}

std::vector<Formula> parse_all(const std::vector<std::string>& ss, LanguageMode m) {
  std::vector<Formula> out;
  for (const auto& s : ss) out.push_back(parse(s, m));
  return out;
}

const std::vector<Logic> kLogics{Logic::isl_a, Logic::isl_a_plus, Logic::isl_box};

}  // namespace

TEST(LocalTypes, Examples) {
  const AdequateSet X1(parse_all({"bot", "top", "p"}, LanguageMode::arrow), Logic::isl_a);
  EXPECT_EQ(type_names(X1, local_types(X1)), (std::set<std::set<std::string>>{{"top"}, {"top", "p"}}));
  const AdequateSet X2(parse_all({"bot", "top", "#bot", "#bot -> bot"}, LanguageMode::box), Logic::isl_box);
  EXPECT_EQ(type_names(X2, local_types(X2)),
            (std::set<std::set<std::string>>{{"top"}, {"top", "#bot"}, {"top", "~#bot"}}));
  const AdequateSet X3(parse_all({"bot", "top"}, LanguageMode::arrow), Logic::isl_a);
  EXPECT_EQ(local_types(X3).size(), 1u);
}

TEST(LocalTypes, MatchOracle) {
  const auto& lt = test::oracle()["local_types"];
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
      {"bot,top,p", {"bot", "top", "p"}},
      {"bot,top,#bot,#bot->bot", {"bot", "top", "#bot", "#bot -> bot"}},
      {"bot,top", {"bot", "top"}}};
  for (const auto& [key, members] : cases) {
    const AdequateSet X(parse_all(members, LanguageMode::box), Logic::isl_box);
    std::set<std::set<std::string>> want;
    for (const auto& t : lt[key]) {
      std::set<std::string> s;
      for (const auto& m : t) s.insert(render(B(m.get<std::string>()), LanguageMode::box));
      want.insert(s);
    }
    EXPECT_EQ(type_names(X, local_types(X)), want) << key;
  }
}

TEST(LocalTypes, Budget) {
  const AdequateSet X(A("((p -> q) -> r) & (s ~> t) | (u -> (v ~> w))"), Logic::isl_a);
  ASSERT_GT(X.size(), 4u);
  EXPECT_THROW(local_types(X, Budget{4, 4, 1}), budget_exceeded);
}

TEST(LocalTypes, ExactlyTheSaturatedSubsets) {
  const AdequateSet X(A("(p -> q) | (q ~> p) & #p"), Logic::isl_a);
  const auto ts = local_types(X);
  std::set<TypeBits> found(ts.begin(), ts.end());
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << X.size()); ++m) {
    TypeBits t;
    for (std::size_t i = 0; i < X.size(); ++i)
      if (m >> i & 1) t.set(i);
    EXPECT_EQ(is_local_type(X, t), found.count(t) == 1);
  }
}

TEST(Successor, Examples) {
  const AdequateSet X(B("#bot"), Logic::isl_box);
  const TypeBits top = X.bits_of({B("top")}), topbox = X.bits_of({B("top"), B("#bot")});
  EXPECT_TRUE(successor_relation(X, top, topbox, Logic::isl_box, true));
  EXPECT_FALSE(successor_relation(X, top, top, Logic::isl_box, true));
  EXPECT_FALSE(successor_relation(X, topbox, topbox, Logic::isl_box, true));

  const AdequateSet Y(A("p ~> q"), Logic::isl_a_plus);
  const TypeBits t = Y.bits_of({A("top"), A("p ~> q")});
  const TypeBits u = Y.bits_of({A("top"), A("p ~> q"), A("p")});
  EXPECT_FALSE(successor_relation(Y, t, u, Logic::isl_a_plus, true));
  const TypeBits w = Y.bits_of({A("top"), A("p ~> q"), A("p -> q"), A("q")});
  EXPECT_TRUE(successor_relation(Y, t, w, Logic::isl_a_plus, true));
}

TEST(Successor, MismatchedSets) {
  const AdequateSet X(B("#bot"), Logic::isl_box);
  EXPECT_THROW(successor_relation(X, X.bits_of({B("top")}), X.bits_of({B("top")}), Logic::isl_a, true), error);
}

TEST(Eliminate, Examples) {
  {
    const AdequateSet X(B("#bot"), Logic::isl_box);
    const HenkinStructure h = eliminate(X);
    EXPECT_EQ(type_names(X, h.types), (std::set<std::set<std::string>>{{"top"}, {"top", "#bot"}}));
    const auto i = *h.find(X.bits_of({B("top")})), j = *h.find(X.bits_of({B("top"), B("#bot")}));
    EXPECT_TRUE(h.sub[i][j]);
    EXPECT_FALSE(h.sub[j][i] || h.sub[i][i] || h.sub[j][j]);
  }
  {
    const AdequateSet X(B("#bot -> bot"), Logic::isl_box);
    const HenkinStructure h = eliminate(X);
    EXPECT_EQ(type_names(X, h.types), (std::set<std::set<std::string>>{{"top"}, {"top", "#bot"}}));
    EXPECT_FALSE(h.find(X.bits_of({B("top"), B("#bot -> bot")})));
  }
  {
    const AdequateSet X(parse_all({"bot", "top"}, LanguageMode::arrow), Logic::isl_a);
    const HenkinStructure h = eliminate(X);
    ASSERT_EQ(h.types.size(), 1u);
    EXPECT_FALSE(h.sub[0][0]);
  }
}

TEST(Eliminate, TruthLemmaAndValidity) {
  Rng rng(17);
  for (Logic l : kLogics) {
    for (int i = 0; i < 30; ++i) {
      const Formula f = random_formula_upto(rng, {"p", "q"}, 6, mode_of(l));
      const AdequateSet X(f, l);
      const HenkinStructure h = eliminate(X);
      std::string why;
      EXPECT_TRUE(truth_lemma_holds(h, &why)) << show(f) << ": " << why;
      EXPECT_TRUE(is_valid(h.model(), frame_class_of(l))) << show(f);
      for (const auto& t : h.types) EXPECT_LE(depth(h, t), X.nu()) << show(f);
    }
  }
}

TEST(Eliminate, DeterministicUnderJobs) {
  const AdequateSet X(A("((p ~> q) -> #p) | (q -> p ~> q)"), Logic::isl_a);
  const HenkinStructure a = eliminate(X, Budget{20, 4, 1});
  const HenkinStructure b = eliminate(X, Budget{20, 4, 4});
  EXPECT_EQ(a.types, b.types);
  EXPECT_EQ(a.sub, b.sub);
  EXPECT_EQ(a.rounds, b.rounds);
}

TEST(Derivable, Examples) {
  EXPECT_TRUE(is_derivable(B("(#p -> p) -> p"), Logic::isl_box));
  const Verdict v = derivable(B("#p -> p"), Logic::isl_box);
  ASSERT_FALSE(v.derivable);
  ASSERT_TRUE(v.countermodel);
  EXPECT_EQ(v.countermodel->size(), 1u);
  EXPECT_FALSE(forces(*v.countermodel, *v.countermodel->root, B("#p -> p")));
  EXPECT_TRUE(is_derivable(A("p -> #p"), Logic::isl_a));
  EXPECT_TRUE(is_derivable(A("((p & #q) ~> q) -> (p ~> q)"), Logic::isl_a));
  const Formula box_a = A("((r & p) ~> q) -> (r ~> (p -> q))");
  const Verdict r = derivable(box_a, Logic::isl_a);
  ASSERT_FALSE(r.derivable);
  EXPECT_TRUE(is_valid(*r.countermodel, FrameClass::isl));
  EXPECT_FALSE(is_valid(*r.countermodel, FrameClass::brilliant));
  EXPECT_TRUE(is_derivable(box_a, Logic::isl_a_plus));
}

TEST(Derivable, ModeMismatchAndBudget) {
  EXPECT_THROW(derivable(A("p ~> q"), Logic::isl_box), mode_error);
  EXPECT_THROW(derivable(B("#p"), Logic::isl_a), mode_error);
  EXPECT_THROW(derivable_by_elimination(A("((p -> q) -> p) -> p"), Logic::isl_a, Budget{3, 4, 1}), budget_exceeded);
}

TEST(Derivable, OracleCorpus) {
  for (const auto& c : test::oracle()["verdicts"]) {
    const Logic l = parse_logic(c["logic"].get<std::string>());
    const Formula f = parse(c["formula"].get<std::string>(), mode_of(l));
    const Verdict v = derivable(f, l);
    if (!c["countermodel_nodes"].is_null()) {
      EXPECT_FALSE(v.derivable) << show(f);
    } else if (!v.derivable) {
      // Refuted only by a model larger than the oracle looked at.
      EXPECT_GT(v.countermodel->size(), 3u) << show(f);
    }
    if (!v.derivable) {
      EXPECT_TRUE(is_valid(*v.countermodel, frame_class_of(l)));
      EXPECT_FALSE(forces(*v.countermodel, *v.countermodel->root, f));
    }
  }
}

TEST(Derivable, SearchAgreesWithElimination) {
  Rng rng(23);
  for (Logic l : kLogics)
    for (int i = 0; i < 60; ++i) {
      const Formula f = random_formula_upto(rng, {"p", "q"}, 7, mode_of(l));
      EXPECT_EQ(derivable(f, l).derivable, derivable_by_elimination(f, l).derivable) << show(f);
    }
}

TEST(Derivable, RootIsLeastSurvivorLackingGoal) {
  Rng rng(29);
  for (int i = 0; i < 40; ++i) {
    const Formula f = random_formula_upto(rng, {"p", "q"}, 6, LanguageMode::arrow);
    const AdequateSet X(f, Logic::isl_a);
    const HenkinStructure h = eliminate(X);
    const Verdict v = derivable(f, Logic::isl_a);
    if (v.derivable) continue;
    const std::size_t goal = *X.index_of(f);
    std::optional<TypeBits> least;
    for (const auto& t : h.types)
      if (!t.test(goal)) {
        least = t;
        break;
      }
    ASSERT_TRUE(least);
    EXPECT_EQ(v.countermodel->nodes[*v.countermodel->root], "t0");
    EXPECT_EQ(X.bits_of(v.root_type), *least) << show(f);
    EXPECT_EQ(derivable_by_elimination(f, Logic::isl_a).root_type, v.root_type);
  }
}

TEST(Derivable, SubstitutionClosure) {
  Rng rng(31);
  int done = 0;
  for (int i = 0; done < 50 && i < 5000; ++i) {
    const Formula f = random_formula_upto(rng, {"p", "q"}, 7, LanguageMode::arrow);
    if (!is_derivable(f, Logic::isl_a)) continue;
    const Formula g = random_formula_upto(rng, {"p", "r"}, 4, LanguageMode::arrow);
    EXPECT_TRUE(is_derivable(substitute(f, "p", g), Logic::isl_a)) << show(f) << " / " << show(g);
    ++done;
  }
  EXPECT_EQ(done, 50);
}

TEST(Derivable, ExtensionAndCrossLogicCoherence) {
  Rng rng(37);
  for (int i = 0; i < 100; ++i) {
    const Formula f = random_formula_upto(rng, {"p", "q"}, 6, LanguageMode::arrow);
    if (is_derivable(f, Logic::isl_a)) {
      EXPECT_TRUE(is_derivable(f, Logic::isl_a_plus)) << show(f);
    }
    const Formula g = random_formula_upto(rng, {"p", "q"}, 6, LanguageMode::box);
    const bool d = is_derivable(g, Logic::isl_box);
    EXPECT_EQ(is_derivable(apply_translation(g, maps::red()), Logic::isl_a), d) << show(g);
    EXPECT_EQ(is_derivable(apply_translation(g, maps::bl()), Logic::isl_a_plus), d) << show(g);
  }
}

TEST(Derivable, OracleAgreementRandom) {
  Rng rng(41);
  for (Logic l : kLogics)
    for (int i = 0; i < 60; ++i) {
      const Formula f = random_formula_upto(rng, {"p", "q"}, 5, mode_of(l));
      const Verdict v = derivable(f, l);
      if (v.derivable) {
        EXPECT_FALSE(brute_force_search(f, l, 3)) << show(f);
      } else {
        EXPECT_TRUE(is_valid(*v.countermodel, frame_class_of(l)));
        EXPECT_FALSE(forces(*v.countermodel, *v.countermodel->root, f));
      }
    }
}

TEST(Derivable, PrinciplesInAllLogics) {
  Rng rng(43);
  for (Logic l : kLogics)
    for (const auto& s : test::shared_principles(mode_of(l)))
      for (int i = 0; i < 3; ++i) {
        auto r = [&] { return random_formula_upto(rng, {"p", "q"}, 3, mode_of(l)); };
        const Formula f = s.make(r(), r(), r());
        EXPECT_TRUE(is_derivable(f, l)) << s.name << ": " << show(f);
      }
}

TEST(Entails, Examples) {
  EXPECT_TRUE(entails({B("p")}, B("#p"), Logic::isl_box));
  for (Logic l : kLogics) EXPECT_TRUE(entails({}, A("top"), l));
  EXPECT_TRUE(equivalent(B("#top"), B("top"), Logic::isl_box));
  EXPECT_FALSE(entails({B("#p")}, B("p"), Logic::isl_box));
  EXPECT_TRUE(entails_equiv({A("q"), A("p"), A("q")}, A("p & q"), Logic::isl_a, EntailKind::entails));
}

TEST(BruteForce, Examples) {
  const auto hit = brute_force_search(B("#p -> p"), Logic::isl_box, 1);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->first.size(), 1u);
  EXPECT_FALSE(hit->first.val[hit->second].count("p"));
  EXPECT_FALSE(brute_force_search(B("(#p -> p) -> p"), Logic::isl_box, 3));
  for (Logic l : kLogics) EXPECT_FALSE(brute_force_search(A("top"), l, 2));
  EXPECT_THROW(brute_force_search(A("p"), Logic::isl_a, 5), budget_exceeded);
}

TEST(PreHenkin, Examples) {
  {
    const AdequateSet X(B("#bot"), Logic::isl_box);
    const HenkinStructure h = pre_henkin(X);
    const auto i = *h.find(X.bits_of({B("top")})), j = *h.find(X.bits_of({B("top"), B("#bot")}));
    EXPECT_TRUE(h.sub[i][i]);
    EXPECT_FALSE(h.sub[j][j]);
    EXPECT_TRUE(is_valid(h.model(), FrameClass::preorder_only));
  }
  {
    const AdequateSet X(parse_all({"bot", "top"}, LanguageMode::arrow), Logic::isl_a);
    const HenkinStructure h = pre_henkin(X);
    ASSERT_EQ(h.types.size(), 1u);
    EXPECT_TRUE(h.sub[0][0]);
  }
}

TEST(PreHenkin, StrictContainedInNonStrict) {
  Rng rng(47);
  for (Logic l : kLogics)
    for (int i = 0; i < 20; ++i) {
      const AdequateSet X(random_formula_upto(rng, {"p"}, 6, mode_of(l)), l);
      const HenkinStructure s = eliminate(X), n = pre_henkin(X);
      ASSERT_EQ(s.types, n.types);
      for (std::size_t a = 0; a < s.types.size(); ++a)
        for (std::size_t b = 0; b < s.types.size(); ++b)
          if (s.sub[a][b]) {
            EXPECT_TRUE(n.sub[a][b]);
          }
    }
}

TEST(Depth, Examples) {
  const AdequateSet X(B("#bot"), Logic::isl_box);
  const HenkinStructure h = eliminate(X);
  EXPECT_EQ(depth(h, X.bits_of({B("top"), B("#bot")})), 0u);
  EXPECT_EQ(depth(h, X.bits_of({B("top")})), 1u);
  EXPECT_THROW(depth(h, X.bits_of({B("#bot")})), error);
}

TEST(Properties, SurvivorPrimalityAndDisjunction) {
  Rng rng(53);
  for (Logic l : {Logic::isl_a, Logic::isl_box}) {
    for (int i = 0; i < 8; ++i) {
      const Formula f = random_formula_upto(rng, {"p", "q"}, 6, mode_of(l));
      const AdequateSet X(f, l);
      const HenkinStructure h = eliminate(X);
      for (const auto& t : h.types) {
        const auto theory = X.members(t);
        for (std::size_t k = 0; k < X.size(); ++k) {
          if (entails(theory, X[k], l)) {
            EXPECT_TRUE(t.test(k)) << show(X[k]);
          }
          if (X[k].is(Kind::Or) && t.test(k)) {
            EXPECT_TRUE(t.test(*X.index_of(X[k].lhs())) || t.test(*X.index_of(X[k].rhs())));
          }
        }
        for (int j = 0; j < 5; ++j) {
          const Formula a = random_formula_upto(rng, {"p", "q"}, 4, mode_of(l));
          const Formula b = random_formula_upto(rng, {"p", "q"}, 4, mode_of(l));
          if (entails(theory, Formula::disj(a, b), l)) {
            EXPECT_TRUE(entails(theory, a, l) || entails(theory, b, l)) << show(a) << " | " << show(b);
          }
        }
      }
    }
  }
}
