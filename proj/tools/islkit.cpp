// islkit command-line driver.
//
// Exit codes: 0 success / derivable, 1 refuted or check failed, 2 usage or
// input error, 3 budget exhausted, 4 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "islkit/islkit.hpp"

using nlohmann::json;
using namespace islkit;

namespace {

struct Globals {
  bool json = false;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::size_t max_types = 20;
  std::size_t max_nodes = 4;
  std::optional<std::size_t> bound;
};

std::size_t env_or(const char* name, std::size_t fallback) {
  if (const char* v = std::getenv(name)) {
    try {
      return static_cast<std::size_t>(std::stoull(v));
    } catch (const std::exception&) {
      throw error(std::string("environment variable ") + name + " is not a number");
    }
  }
  return fallback;
}

Budget budget_of(const Globals& g) { return Budget{g.max_types, g.max_nodes, g.jobs}; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw error(path + ": " + e.what());
  }
}

KripkeModel read_model(const std::string& path) { return model_from_json(read_json_file(path)); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw error("cannot write " + path);
  out << text;
}

void write_model(const std::string& path, const KripkeModel& m) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".dot") write_text(path, model_to_dot(m));
  else write_text(path, model_to_json(m).dump(2) + "\n");
}

VariableSet split_vars(const std::string& s) {
  VariableSet out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(item);
  return out;
}

FrameClass parse_class(const std::string& s) {
  if (s == "isl") return FrameClass::isl;
  if (s == "brilliant") return FrameClass::brilliant;
  if (s == "preorder-only") return FrameClass::preorder_only;
  throw error("unknown frame class '" + s + "'");
}

json vars_json(const VariableSet& vs) { return json(std::vector<std::string>(vs.begin(), vs.end())); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"islkit: intuitionistic strong Loeb logics with the Lewis arrow"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  try {
    g.max_types = env_or("ISLKIT_MAX_TYPES", g.max_types);
    g.max_nodes = env_or("ISLKIT_MAX_NODES", g.max_nodes);
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--seed", g.seed, "Seed for randomized steps")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for parallel steps")->capture_default_str();
  app.add_option("--max-types", g.max_types, "Type budget (ISLKIT_MAX_TYPES)")->capture_default_str();
  app.add_option("--max-nodes", g.max_nodes, "Model enumeration budget (ISLKIT_MAX_NODES)")->capture_default_str();
  app.add_option("--bound", g.bound, "Complexity bound for interpolant enumeration");

  std::string logic_name = "isl-a";
  std::string formula_text;

  // decide
  auto* decide_cmd = app.add_subcommand("decide", "Decide derivability");
  std::string countermodel_path, method = "search";
  decide_cmd->add_option("--logic", logic_name)->capture_default_str();
  decide_cmd->add_option("--countermodel", countermodel_path, "Write the countermodel (.json or .dot)");
  decide_cmd->add_option("--method", method, "search or eliminate")->check(CLI::IsMember({"search", "eliminate"}));
  decide_cmd->add_option("formula", formula_text)->required();

  // interpolate
  auto* interp_cmd = app.add_subcommand("interpolate", "Uniform interpolant");
  std::string exists_vars, forall_vars;
  std::optional<std::size_t> sample_depth;
  std::size_t random_sample = 0;
  interp_cmd->add_option("--exists", exists_vars, "Variables to quantify existentially (comma separated)");
  interp_cmd->add_option("--forall", forall_vars, "Variables to quantify universally (comma separated)");
  interp_cmd->add_option("--logic", logic_name)->capture_default_str();
  interp_cmd->add_option("--verify-sample-depth", sample_depth, "Verify against all classes up to this complexity");
  interp_cmd->add_option("--random-sample", random_sample, "Also verify against this many random formulas");
  interp_cmd->add_option("formula", formula_text)->required();

  // fixpoint
  auto* fix_cmd = app.add_subcommand("fixpoint", "Explicit fixed point");
  std::string fix_var = "r";
  fix_cmd->add_option("--var", fix_var)->capture_default_str();
  fix_cmd->add_option("--logic", logic_name)->capture_default_str();
  fix_cmd->add_option("chi", formula_text)->required();

  // normalize
  auto* norm_cmd = app.add_subcommand("normalize", "Normal form of a closed formula");
  std::string norm_mode = "arrow";
  norm_cmd->add_option("--mode", norm_mode, "arrow or box")->check(CLI::IsMember({"arrow", "box"}));
  norm_cmd->add_option("formula", formula_text)->required();

  // translate
  auto* tr_cmd = app.add_subcommand("translate", "Apply a translation");
  std::string map_name;
  bool eliminate_fix = false;
  tr_cmd->add_option("--map", map_name, "id, triv, lb, bl, red, triv.lb");
  tr_cmd->add_flag("--eliminate-fixpoints", eliminate_fix, "Parse with fix(...) and replace each binder");
  tr_cmd->add_option("formula", formula_text)->required();

  // bisim
  auto* bisim_cmd = app.add_subcommand("bisim", "Bounded bisimulation layers");
  std::string bisim_vars;
  std::size_t bisim_depth = 2;
  std::string k_path, m_path;
  bisim_cmd->add_option("--vars", bisim_vars)->required();
  bisim_cmd->add_option("--depth", bisim_depth)->capture_default_str();
  bisim_cmd->add_option("K", k_path)->required();
  bisim_cmd->add_option("M", m_path)->required();

  // amalgamate
  auto* amal_cmd = app.add_subcommand("amalgamate", "Amalgamate along witnessing triples");
  std::string adequate_of, out_path;
  amal_cmd->add_option("--logic", logic_name)->capture_default_str();
  amal_cmd->add_option("--adequate-of", adequate_of)->required();
  amal_cmd->add_option("-o,--output", out_path);
  amal_cmd->add_option("K", k_path)->required();
  amal_cmd->add_option("M", m_path)->required();

  // check-model
  auto* check_cmd = app.add_subcommand("check-model", "Validate a model file");
  std::string class_name = "isl";
  bool close = false;
  std::vector<std::string> check_formulas;
  check_cmd->add_option("--class", class_name)->check(CLI::IsMember({"isl", "brilliant", "preorder-only"}));
  check_cmd->add_flag("--close", close, "Close pre and saturate sub before validating");
  check_cmd->add_option("--formula", check_formulas, "Report forcing of these formulas at every node");
  check_cmd->add_option("-o,--output", out_path, "Write the (closed) model");
  check_cmd->add_option("model", k_path)->required();

  // enum-classes
  auto* ec_cmd = app.add_subcommand("enum-classes", "Representatives of bounded-complexity classes");
  std::string ec_vars;
  std::size_t ec_depth = 1;
  ec_cmd->add_option("--vars", ec_vars);
  ec_cmd->add_option("--depth", ec_depth)->capture_default_str();
  ec_cmd->add_option("--logic", logic_name)->capture_default_str();

  // enum-models
  auto* em_cmd = app.add_subcommand("enum-models", "Enumerate small models");
  std::string em_vars;
  bool count_only = false;
  em_cmd->add_option("--vars", em_vars);
  em_cmd->add_option("--class", class_name)->check(CLI::IsMember({"isl", "brilliant"}));
  em_cmd->add_flag("--count", count_only, "Print only the number of models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const Budget budget = budget_of(g);
    auto emit = [&](const json& j, const std::string& text) {
      if (g.json) std::cout << j.dump(2) << "\n";
      else std::cout << text;
    };

    if (*decide_cmd) {
      const Logic logic = parse_logic(logic_name);
      const Formula f = parse(formula_text, mode_of(logic));
      const Verdict v = method == "search" ? derivable(f, logic, budget) : derivable_by_elimination(f, logic, budget);
      json j{{"formula", render(f, mode_of(logic))},
             {"logic", to_string(logic)},
             {"verdict", v.derivable ? "derivable" : "refuted"},
             {"adequate_size", v.adequate_size},
             {"explored_types", v.explored}};
      std::string text = v.derivable ? "derivable\n" : "refuted\n";
      if (v.countermodel) {
        j["countermodel"] = model_to_json(*v.countermodel);
        text += "countermodel: " + std::to_string(v.countermodel->size()) + " node(s), root " +
                v.countermodel->nodes[*v.countermodel->root] + "\n";
        if (!countermodel_path.empty()) write_model(countermodel_path, *v.countermodel);
      }
      emit(j, text);
      return v.derivable ? 0 : 1;
    }

    if (*interp_cmd) {
      const Logic logic = parse_logic(logic_name);
      if (exists_vars.empty() == forall_vars.empty()) throw error("give exactly one of --exists or --forall");
      const QuantKind kind = exists_vars.empty() ? QuantKind::forall : QuantKind::exists;
      const VariableSet qvars = split_vars(kind == QuantKind::exists ? exists_vars : forall_vars);
      const Formula f = parse(formula_text, mode_of(logic));
      InterpOptions opt;
      opt.bound = g.bound;
      opt.kernel = budget;
      InterpolantReport r;
      try {
        r = interpolant(f, qvars, kind, logic, opt);
      } catch (const budget_exceeded& ex) {
        std::cerr << "budget exceeded: " << ex.what() << "\n";
        if (!g.bound)
          std::cerr << "hint: pass --bound N to compute at a smaller bound and check it with --verify-sample-depth\n";
        return 3;
      }
      json j{{"formula", render(f, mode_of(logic))},
             {"logic", to_string(logic)},
             {"kind", to_string(kind)},
             {"quantified", vars_json(qvars)},
             {"interpolant", render(r.theta, mode_of(logic))},
             {"route", r.route},
             {"nu", r.nu},
             {"nominal_bound", r.nominal_bound},
             {"bound_used", r.bound_used},
             {"fallback", r.fallback}};
      std::string text = std::string(kind == QuantKind::exists ? "exists " : "forall ") + render(r.theta, mode_of(logic)) +
                         "\n" + "bound " + std::to_string(r.bound_used) + " (nominal bound " +
                         std::to_string(r.nominal_bound) + ")\n";
      int rc = 0;
      if (sample_depth || random_sample > 0) {
        VariableSet pvars;
        for (const auto& v : variables(f))
          if (!qvars.count(v)) pvars.insert(v);
        std::vector<Formula> sample;
        if (sample_depth) {
          EnumBudget eb;
          eb.max_vars = std::max<std::size_t>(eb.max_vars, pvars.size());
          eb.kernel = budget;
          const ClassEnumeration& e = cached_representatives(pvars, *sample_depth, Logic::isl_a, eb);
          for (const Formula& c : e.reps) {
            if (logic == Logic::isl_box) sample.push_back(apply_translation(c, maps::lb()));
            else sample.push_back(c);
          }
        }
        Rng rng(g.seed);
        const std::vector<std::string> pv(pvars.begin(), pvars.end());
        for (std::size_t i = 0; i < random_sample; ++i) sample.push_back(random_formula_upto(rng, pv, 5, mode_of(logic)));
        const InterpolantChecks c = verify_interpolant(f, qvars, r.theta, kind, logic, sample, budget);
        j["checks"] = {{"variable_condition", c.variable_condition},
                       {"base_implication", c.base_implication},
                       {"sample_size", c.sample_size},
                       {"sample_passed", c.sample_passed},
                       {"complexity", c.complexity},
                       {"complexity_bound", c.complexity_bound},
                       {"ok", c.ok()}};
        if (c.counterexample) j["checks"]["counterexample"] = render(*c.counterexample, mode_of(logic));
        text += std::string("verification: ") + (c.ok() ? "ok" : "FAILED") + " (" + std::to_string(c.sample_passed) +
                "/" + std::to_string(c.sample_size) + " sample formulas)\n";
        if (c.counterexample) text += "counterexample: " + render(*c.counterexample, mode_of(logic)) + "\n";
        rc = c.ok() ? 0 : 1;
      }
      emit(j, text);
      return rc;
    }

    if (*fix_cmd) {
      const Logic logic = parse_logic(logic_name);
      const Formula chi = parse(formula_text, mode_of(logic));
      const Formula fp = explicit_fixpoint(chi, fix_var);
      const bool ok = check_fixpoint(chi, fix_var, fp, logic, budget);
      const LanguageMode md = mode_of(logic);
      const std::string eq = render(Formula::iff(fp, substitute(chi, fix_var, fp)), md);
      emit(json{{"chi", render(chi, md)}, {"var", fix_var}, {"fixpoint", render(fp, md)}, {"equation", eq}, {"verified", ok}},
           "fixpoint: " + render(fp, md) + "\nequation: " + eq + (ok ? "  [derivable]\n" : "  [NOT derivable]\n"));
      return ok ? 0 : 1;
    }

    if (*norm_cmd) {
      const LanguageMode md = norm_mode == "box" ? LanguageMode::box : LanguageMode::arrow;
      const Formula f = parse(formula_text, md);
      const Degree d = normalize_closed(f);
      const std::string canon = render_degree_formula(d, md);
      emit(json{{"degree", d.is_infinite() ? json("inf") : json(d.value())}, {"formula", canon}},
           "degree: " + d.to_string() + "\nformula: " + canon + "\n");
      return 0;
    }

    if (*tr_cmd) {
      if (map_name.empty() && !eliminate_fix) throw error("give --map and/or --eliminate-fixpoints");
      std::optional<TranslationMap> t;
      if (!map_name.empty()) t = translation_by_name(map_name);
      Formula f;
      if (eliminate_fix) f = eliminate_fixpoints(parse(formula_text, LanguageMode::arrow_fp));
      else f = parse(formula_text, t->source);
      if (t) f = apply_translation(f, *t);
      const LanguageMode out_mode = t ? t->target : LanguageMode::arrow;
      const std::string s = render(f, out_mode);
      emit(json{{"map", map_name}, {"result", s}}, s + "\n");
      return 0;
    }

    if (*bisim_cmd) {
      const KripkeModel K = read_model(k_path), M = read_model(m_path);
      const VariableSet pv = split_vars(bisim_vars);
      const BisimLayers b = bounded_bisim(K, M, pv, bisim_depth);
      const Relation full = full_bisim(K, M, pv);
      json j{{"vars", vars_json(pv)}, {"layers", json::array()}};
      std::ostringstream os;
      for (std::size_t a = 0; a < b.layers.size(); ++a) {
        json pairs = json::array();
        os << "Z" << a << ":";
        for (NodeId k = 0; k < K.size(); ++k)
          for (NodeId m = 0; m < M.size(); ++m)
            if (b.layers[a][k][m]) {
              pairs.push_back({K.nodes[k], M.nodes[m]});
              os << " (" << K.nodes[k] << "," << M.nodes[m] << ")";
            }
        os << "\n";
        j["layers"].push_back(pairs);
      }
      json fp = json::array();
      os << "full:";
      for (NodeId k = 0; k < K.size(); ++k)
        for (NodeId m = 0; m < M.size(); ++m)
          if (full[k][m]) {
            fp.push_back({K.nodes[k], M.nodes[m]});
            os << " (" << K.nodes[k] << "," << M.nodes[m] << ")";
          }
      os << "\n";
      j["full"] = fp;
      emit(j, os.str());
      return 0;
    }

    if (*amal_cmd) {
      const Logic logic = parse_logic(logic_name);
      const KripkeModel K = read_model(k_path), M = read_model(m_path);
      if (!K.root || !M.root) throw error("both models need a root");
      const AdequateSet X(parse(adequate_of, mode_of(logic)), logic);
      const Amalgam a = amalgamate(K, *K.root, M, *M.root, X, budget);
      if (!out_path.empty()) write_model(out_path, a.model);
      emit(json{{"model", model_to_json(a.model)}, {"root", a.model.nodes[a.root]}},
           "amalgam: " + std::to_string(a.model.size()) + " node(s), root " + a.model.nodes[a.root] + "\n");
      return 0;
    }

    if (*check_cmd) {
      const FrameClass cls = parse_class(class_name);
      KripkeModel m = read_model(k_path);
      if (close) m = close_model(m, cls);
      const auto vs = validate_model(m, cls);
      json j{{"class", to_string(cls)}, {"valid", vs.empty()}, {"violations", json::array()}};
      std::string text = vs.empty() ? "valid\n" : "invalid\n";
      for (const auto& v : vs) {
        j["violations"].push_back({{"condition", v.condition}, {"witness", v.witness}});
        text += "  " + describe(v) + "\n";
      }
      if (!check_formulas.empty() && vs.empty()) {
        Evaluator ev(m);
        j["forcing"] = json::object();
        for (const auto& s : check_formulas) {
          const Formula f = parse(s, LanguageMode::arrow_fp);
          json nodes = json::array();
          text += s + ":";
          for (NodeId x = 0; x < m.size(); ++x)
            if (ev.forces(x, f)) {
              nodes.push_back(m.nodes[x]);
              text += " " + m.nodes[x];
            }
          text += "\n";
          j["forcing"][s] = nodes;
        }
      }
      if (!out_path.empty()) write_model(out_path, m);
      emit(j, text);
      return vs.empty() ? 0 : 1;
    }

    if (*ec_cmd) {
      const Logic logic = parse_logic(logic_name);
      EnumBudget eb;
      eb.kernel = budget;
      const VariableSet pv = split_vars(ec_vars);
      if (g.bound) eb.max_depth = *g.bound;
      eb.max_vars = std::max(eb.max_vars, pv.size());
      try {
        const ClassEnumeration e = enum_representatives(pv, ec_depth, logic, eb);
        json reps = json::array();
        std::string text;
        for (const Formula& f : e.reps) {
          reps.push_back(render(f, mode_of(logic)));
          text += render(f, mode_of(logic)) + "\n";
        }
        text += "# " + std::to_string(e.reps.size()) + " classes\n";
        emit(json{{"vars", vars_json(pv)}, {"depth", ec_depth}, {"logic", to_string(logic)}, {"count", e.reps.size()},
                  {"representatives", reps}},
             text);
        return 0;
      } catch (const enumeration_budget_exceeded& ex) {
        std::cerr << "budget exceeded: " << ex.what() << " (" << ex.partial().layers_done
                  << " complete layer(s))\n";
        return 3;
      }
    }

    if (*em_cmd) {
      const FrameClass cls = parse_class(class_name);
      const VariableSet pv = split_vars(em_vars);
      std::size_t count = 0;
      json all = json::array();
      for_each_model(pv, g.max_nodes, cls, [&](const KripkeModel& m) {
        ++count;
        if (!count_only) {
          if (g.json) all.push_back(model_to_json(m));
          else std::cout << model_to_json(m).dump() << "\n";
        }
        return true;
      }, std::max<std::size_t>(g.max_nodes, 4));
      if (g.json) std::cout << (count_only ? json{{"count", count}} : all).dump(2) << "\n";
      else if (count_only) std::cout << count << "\n";
      return 0;
    }
  } catch (const budget_exceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
