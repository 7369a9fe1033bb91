#include <gtest/gtest.h>

#include "islkit/islkit.hpp"
#include "oracle.hpp"
#include "schemes.hpp"

using namespace islkit;

namespace {

Formula A(std::string_view s) { return parse(s, LanguageMode::arrow); }

// x sub y, y pre z, nothing else.
KripkeModel not_brilliant() {
  KripkeModel m = KripkeModel::with_nodes(3, {});
  m.pre[0][1] = m.pre[1][2] = m.pre[0][2] = 1;
  m.sub[0][1] = 1;
  return m;
}

bool has_condition(const std::vector<Violation>& vs, const std::string& c) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.condition == c; });
}

}  // namespace

TEST(Validate, SingleNode) {
  const KripkeModel m = KripkeModel::with_nodes(1, {"p"});
  EXPECT_TRUE(is_valid(m, FrameClass::isl));
  EXPECT_TRUE(is_valid(m, FrameClass::brilliant));
}

TEST(Validate, Irreflexivity) {
  KripkeModel m = KripkeModel::with_nodes(1, {});
  m.sub[0][0] = 1;
  const auto vs = validate_model(m, FrameClass::isl);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(describe(vs[0]), "irreflexivity at w0");
  EXPECT_TRUE(is_valid(m, FrameClass::preorder_only));
}

TEST(Validate, BrilliancyOnlyUnderBrilliant) {
  const KripkeModel m = not_brilliant();
  EXPECT_TRUE(is_valid(m, FrameClass::isl));
  const auto vs = validate_model(m, FrameClass::brilliant);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].condition, "brilliancy");
  EXPECT_EQ(vs[0].witness, (std::vector<std::string>{"w0", "w1", "w2"}));
}

TEST(Validate, OtherConditions) {
  KripkeModel m = KripkeModel::with_nodes(3, {"p"});
  m.pre[0][1] = m.pre[1][2] = 1;  // not transitive
  m.sub[1][2] = 1;                // 0 pre 1 sub 2 without 0 sub 2
  m.val[0] = {"p"};               // not monotone
  m.sub[2][0] = 1;                // sub outside pre
  const auto vs = validate_model(m, FrameClass::isl);
  EXPECT_TRUE(has_condition(vs, "transitivity"));
  EXPECT_TRUE(has_condition(vs, "monotonicity of p"));
  EXPECT_TRUE(has_condition(vs, "sub not contained in pre"));
  EXPECT_TRUE(has_condition(vs, "pre;sub not contained in sub"));
  m.pre[0][0] = 0;
  EXPECT_TRUE(has_condition(validate_model(m, FrameClass::isl), "reflexivity"));
}

TEST(Validate, CloseRepairs) {
  KripkeModel m = KripkeModel::with_nodes(3, {});
  m.pre[0][1] = 1;
  m.sub[1][2] = 1;
  EXPECT_FALSE(is_valid(m, FrameClass::isl));
  EXPECT_TRUE(is_valid(close_model(m, FrameClass::isl), FrameClass::isl));
  EXPECT_TRUE(is_valid(close_model(not_brilliant(), FrameClass::brilliant), FrameClass::brilliant));
}

TEST(Forces, Examples) {
  const KripkeModel m = KripkeModel::with_nodes(1, {"p"});
  EXPECT_TRUE(forces(m, 0, A("#p")));
  EXPECT_FALSE(forces(m, 0, A("#p -> p")));
  EXPECT_TRUE(forces(m, 0, A("top")));
  EXPECT_TRUE(forces(m, 0, parse("#p", LanguageMode::box)));
}

TEST(Forces, Errors) {
  const KripkeModel m = KripkeModel::with_nodes(1, {"p"});
  EXPECT_THROW(forces(m, 3, A("p")), error);
  EXPECT_THROW(forces(m, 0, A("q")), error);
}

TEST(Forces, ArrowUsesSubAndImpUsesPre) {
  KripkeModel m = KripkeModel::with_nodes(2, {"p"});
  m.pre[0][1] = 1;
  m.val[1] = {"p"};
  EXPECT_FALSE(forces(m, 0, A("top -> p")));
  EXPECT_TRUE(forces(m, 0, A("top ~> p")));
  EXPECT_FALSE(forces(m, 0, A("~~p -> p")));
  m.sub[0][1] = 1;
  EXPECT_TRUE(forces(m, 0, A("~p ~> bot")));
}

TEST(NodeTheory, Examples) {
  KripkeModel m = KripkeModel::with_nodes(1, {"p"});
  m.val[0] = {"p"};
  const auto show_all = [](const std::vector<Formula>& fs) {
    std::vector<std::string> out;
    for (const auto& f : fs) out.push_back(show(f));
    return out;
  };
  EXPECT_EQ(show_all(node_theory(m, 0, {A("bot"), A("top"), A("p")})), (std::vector<std::string>{"top", "p"}));
  const KripkeModel e = KripkeModel::with_nodes(1, {});
  EXPECT_EQ(show_all(node_theory(e, 0, {A("bot"), A("top"), A("#bot")})), (std::vector<std::string>{"top", "#bot"}));
  KripkeModel r = KripkeModel::with_nodes(2, {"p"});
  r.pre[0][1] = 1;
  r.val[1] = {"p"};
  EXPECT_TRUE(node_theory(r, 0, {A("p")}).empty());
}

TEST(Enumerate, SmallCounts) {
  EXPECT_EQ(enumerate_models({}, 1, FrameClass::isl).size(), 1u);
  EXPECT_EQ(enumerate_models({"p"}, 1, FrameClass::isl).size(), 2u);
  EXPECT_TRUE(enumerate_models({"p"}, 0, FrameClass::isl).empty());
  EXPECT_THROW(enumerate_models({}, 5, FrameClass::isl), budget_exceeded);
}

TEST(Enumerate, CountsMatchOracle) {
  const auto& c = test::oracle()["model_counts_topological"];
  EXPECT_EQ(enumerate_models({"p"}, 2, FrameClass::isl).size(), c["p_2"].get<std::size_t>());
  EXPECT_EQ(enumerate_models({"p"}, 3, FrameClass::isl).size(), c["p_3"].get<std::size_t>());
  EXPECT_EQ(enumerate_models({"p"}, 3, FrameClass::brilliant).size(), c["p_3_brilliant"].get<std::size_t>());
  EXPECT_EQ(enumerate_models({"p", "q"}, 2, FrameClass::isl).size(), c["pq_2"].get<std::size_t>());
  EXPECT_EQ(enumerate_models({}, 4, FrameClass::isl).size(), c["empty_4"].get<std::size_t>());
}

TEST(Enumerate, AllValidAndDeterministic) {
  const auto a = enumerate_models({"p"}, 3, FrameClass::brilliant);
  const auto b = enumerate_models({"p"}, 3, FrameClass::brilliant);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(is_valid(a[i], FrameClass::brilliant));
    EXPECT_EQ(model_to_json(a[i]), model_to_json(b[i]));
  }
}

TEST(Properties, Persistence) {
  Rng rng(1);
  const auto ms = enumerate_models({"p", "q"}, 3, FrameClass::isl);
  std::vector<Formula> fs;
  for (int i = 0; i < 50; ++i) fs.push_back(random_formula_upto(rng, {"p", "q"}, 8, LanguageMode::arrow));
  for (std::size_t k = 0; k < ms.size(); k += 7) {
    const KripkeModel& m = ms[k];
    Evaluator ev(m);
    for (const auto& f : fs)
      for (NodeId x = 0; x < m.size(); ++x)
        for (NodeId y = 0; y < m.size(); ++y)
          if (m.pre[x][y] && ev.forces(x, f)) {
            EXPECT_TRUE(ev.forces(y, f)) << show(f);
          }
  }
}

TEST(Properties, SoundnessOfAxioms) {
  Rng rng(2);
  const std::vector<std::string> vars{"p", "q"};
  auto rnd = [&] { return random_formula_upto(rng, vars, 4, LanguageMode::arrow); };
  std::vector<Formula> isl_inst, plus_inst;
  for (const auto& s : test::arrow_base_schemes())
    for (int i = 0; i < 20; ++i) isl_inst.push_back(s.make(rnd(), rnd(), rnd()));
  for (int i = 0; i < 20; ++i) {
    plus_inst.push_back(test::box_a_scheme().make(rnd(), rnd(), rnd()));
  }
  for (const auto& m : enumerate_models({"p", "q"}, 3, FrameClass::isl)) {
    Evaluator ev(m);
    for (const auto& f : isl_inst)
      for (NodeId x = 0; x < m.size(); ++x) ASSERT_TRUE(ev.forces(x, f)) << show(f);
  }
  for (const auto& m : enumerate_models({"p", "q"}, 3, FrameClass::brilliant)) {
    Evaluator ev(m);
    for (const auto& f : plus_inst)
      for (NodeId x = 0; x < m.size(); ++x) ASSERT_TRUE(ev.forces(x, f)) << show(f);
  }
}

TEST(Properties, TheoriesGrowAlongPre) {
  Rng rng(4);
  std::vector<Formula> X;
  for (int i = 0; i < 30; ++i) X.push_back(random_formula_upto(rng, {"p"}, 6, LanguageMode::arrow));
  for (const auto& m : enumerate_models({"p"}, 3, FrameClass::isl))
    for (NodeId x = 0; x < m.size(); ++x)
      for (NodeId y = 0; y < m.size(); ++y) {
        if (!m.pre[x][y]) continue;
        const auto tx = node_theory(m, x, X), ty = node_theory(m, y, X);
        const std::set<Formula> sy(ty.begin(), ty.end());
        for (const auto& f : tx) EXPECT_TRUE(sy.count(f));
      }
}

TEST(Json, RoundTrip) {
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const KripkeModel m = random_model(rng, {"p", "q"}, 4, FrameClass::isl);
    const nlohmann::json j = model_to_json(m);
    EXPECT_EQ(model_to_json(model_from_json(j)), j);
    EXPECT_EQ(model_to_json(model_from_json(nlohmann::json::parse(j.dump()))), j);
  }
}

TEST(Json, IntegerNodeIdsAndErrors) {
  const auto j = nlohmann::json::parse(R"({"vars":["p"],"nodes":[0,1],"pre":[[0,1]],"sub":[[0,1]],"val":{"1":["p"]},"root":0})");
  const KripkeModel m = model_from_json(j);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_TRUE(m.pre[0][0] == 0 || m.pre[0][0] == 1);
  EXPECT_TRUE(m.sub[0][1]);
  EXPECT_TRUE(m.val[1].count("p"));
  EXPECT_THROW(model_from_json(nlohmann::json::parse(R"({"vars":[],"nodes":["a"],"pre":[["a","b"]],"sub":[]})")), error);
}

TEST(Dot, MarksRootAndEdgeStyles) {
  KripkeModel m = KripkeModel::with_nodes(2, {"p"});
  m.pre[0][1] = 1;
  m.sub[0][1] = 1;
  m.root = 0;
  const std::string d = model_to_dot(m);
  EXPECT_NE(d.find("digraph"), std::string::npos);
  EXPECT_NE(d.find("peripheries=2"), std::string::npos);
  EXPECT_NE(d.find("dashed"), std::string::npos);
}

TEST(DisjointUnion, KeepsBothSides) {
  const KripkeModel a = KripkeModel::with_nodes(2, {"p"});
  const KripkeModel u = disjoint_union(a, a);
  EXPECT_EQ(u.size(), 4u);
  EXPECT_TRUE(is_valid(u, FrameClass::isl));
  EXPECT_FALSE(u.pre[0][2]);
}

TEST(RestrictModel, KeepsValidity) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const KripkeModel m = random_model(rng, {"p"}, 4, FrameClass::brilliant);
    std::vector<char> keep(m.size());
    for (auto& k : keep) k = std::bernoulli_distribution(0.6)(rng);
    EXPECT_TRUE(is_valid(restrict_model(m, keep), FrameClass::brilliant));
  }
}
