#include <cmath>
#include <random>

#include "doctest.h"
#include "ltn/error.hpp"
#include "ltn/kb/kb.hpp"
#include "ltn/logic/similarity.hpp"
#include "ltn/parser/parser.hpp"
#include "oracles.hpp"

using namespace ltn;

namespace {

std::shared_ptr<LambdaPredicate> fixed(double v) {
  return std::make_shared<LambdaPredicate>([v](Graph& g, std::span<const NodeId> args) {
    return g.constant(Array::full({g.shape(args[0])[0]}, v));
  });
}

Formula holds(const std::string& pred) { return Formula::forall({"x"}, Formula::predicate(pred, {Term::variable("x")})); }

Bindings one_var() {
  Bindings b;
  b.bind("x", Array::matrix(3, 1, {0, 1, 2}));
  return b;
}

// three well separated 2-d clusters with one-hot labels
Dataset clusters(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.05);
  const double centres[3][2] = {{0.1, 0.1}, {0.9, 0.1}, {0.5, 0.9}};
  Dataset d{Array(Shape{n, 2}), Array::zeros({n, 3})};
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = i % 3;
    d.x.at(i, 0) = centres[c][0] + noise(rng);
    d.x.at(i, 1) = centres[c][1] + noise(rng);
    d.y.at(i, c) = 1;
  }
  return d;
}

KnowledgeBase cluster_kb() {
  KnowledgeBase kb;
  MlpSpec spec{2, {16, 16}, 3, Activation::Elu, Activation::Sigmoid, 3};
  kb.grounding.add_mlp_predicate("P", spec, {"a", "b", "c"});
  const auto list = parse_formula_list(
      "forall x_a: P(x_a, a)\n"
      "forall x_b: P(x_b, b)\n"
      "forall x_c: P(x_c, c)\n"
      "forall x: ~(P(x, a) & P(x, b))\n"
      "forall x: ~(P(x, a) & P(x, c))\n"
      "forall x: ~(P(x, b) & P(x, c))\n",
      ParseOptions{{"a", "b", "c"}});
  for (const auto& a : list) kb.add_axiom(a.name, a.formula);
  return kb;
}

TaskSpec cluster_task() { return TaskSpec{TaskKind::MultiLabel, "P", {"a", "b", "c"}}; }

}  // namespace

TEST_CASE("kb_satisfiability examples") {
  KnowledgeBase kb;
  kb.grounding.add_predicate("Half", fixed(0.5));
  kb.grounding.add_predicate("One", fixed(1.0));
  kb.grounding.add_predicate("Some", fixed(0.3));
  const Bindings b = one_var();

  kb.add_axiom("some", holds("Some"));
  CHECK(kb_satisfiability(kb, b) == doctest::Approx(query(kb.grounding, holds("Some"), b, QuantifierConfig{2, 2, 2})).epsilon(1e-12));
  CHECK(kb_satisfiability(kb, b) == doctest::Approx(0.3).epsilon(1e-12));

  KnowledgeBase crisp;
  crisp.grounding.add_predicate("One", fixed(1.0));
  crisp.add_axiom("a", holds("One"));
  crisp.add_axiom("b", holds("One"));
  CHECK(kb_satisfiability(crisp, b) == doctest::Approx(1.0).epsilon(1e-6));

  KnowledgeBase two;
  two.grounding.add_predicate("One", fixed(1.0));
  two.grounding.add_predicate("Half", fixed(0.5));
  two.add_axiom("one", holds("One"));
  two.add_axiom("half", holds("Half"));
  CHECK(kb_satisfiability(two, b) == doctest::Approx(1.0 - std::sqrt(0.125)).epsilon(1e-9));
  CHECK(std::abs(kb_satisfiability(two, b) - 0.64645) < 1e-5);
}

TEST_CASE("satisfiability ignores axiom order and never drops when a true axiom is added") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 30; ++trial) {
    KnowledgeBase kb;
    std::vector<std::string> names;
    for (int i = 0; i < 5; ++i) {
      names.push_back("Q" + std::to_string(i));
      kb.grounding.add_predicate(names.back(), fixed(u(rng)));
    }
    kb.grounding.add_predicate("True", fixed(1.0));
    for (const auto& n : names) kb.add_axiom(n, holds(n));
    const Bindings b = one_var();
    const double sat = kb_satisfiability(kb, b);
    std::shuffle(kb.axioms.begin(), kb.axioms.end(), rng);
    CHECK(kb_satisfiability(kb, b) == doctest::Approx(sat).epsilon(1e-12));
    kb.add_axiom("true", holds("True"));
    CHECK(kb_satisfiability(kb, b) >= sat);
  }
}

TEST_CASE("kb errors") {
  KnowledgeBase kb;
  kb.grounding.add_predicate("Half", fixed(0.5));
  CHECK_THROWS_AS(kb_satisfiability(kb, one_var()), LogicError);
  kb.add_axiom("a", holds("Half"));
  CHECK_THROWS_AS(kb.add_axiom("a", holds("Half")), LogicError);
  kb.add_axiom("open", Formula::predicate("Half", {Term::variable("x")}));
  CHECK_THROWS_AS(kb_satisfiability(kb, one_var()), LogicError);
  kb.axioms.pop_back();
  kb.add_axiom("unbound", Formula::forall({"y"}, Formula::predicate("Half", {Term::variable("y")})));
  CHECK_THROWS_AS(kb_satisfiability(kb, one_var()), LogicError);
  Graph g;
  CHECK(build_satisfiability(g, kb, one_var(), EvalMode::Train, true).used.size() == 1);
}

TEST_CASE("query leaves parameters untouched") {
  KnowledgeBase kb = cluster_kb();
  const Dataset d = clusters(30, 1);
  const Bindings b = bind_dataset(cluster_task(), d);
  const auto before = kb.grounding.params.hash();
  const Formula f = kb.axioms[3].formula;
  const double q = query(kb.grounding, f, b, kb.quantifier_config);
  CHECK(kb.grounding.params.hash() == before);
  Graph g(&kb.grounding.params);
  CHECK(q == g.value(eval_formula(g, f, kb.grounding, b, kb.quantifier_config, EvalMode::Query).node).item());
}

TEST_CASE("dataset bindings") {
  const Dataset d = clusters(9, 2);
  const Bindings b = bind_dataset(cluster_task(), d);
  CHECK(b.find("x")->values.dim(0) == 9);
  CHECK(b.find("x_a")->values.dim(0) == 3);
  const std::vector<std::size_t> rows{0, 3};
  const Bindings only_a = bind_dataset(cluster_task(), d.subset(rows));
  CHECK(only_a.find("x_b") == nullptr);

  Dataset r{Array::matrix(3, 1, {0, 1, 2}), Array::matrix(3, 1, {5, 6, 7})};
  const Bindings rb = bind_dataset(TaskSpec{TaskKind::Regression, "f"}, r);
  CHECK(rb.find("x")->axis == "sample");
  CHECK(rb.find("y")->axis == "sample");
  CHECK_THROWS_AS(bind_dataset(cluster_task(), Dataset{d.x, Array::zeros({9, 2})}), ShapeError);
}

TEST_CASE("epochs = 0 records one snapshot and changes nothing") {
  KnowledgeBase kb = cluster_kb();
  const Dataset d = clusters(60, 3);
  const auto before = kb.grounding.params.hash();
  const MetricsLog log = train(kb, cluster_task(), d, d, TrainConfig{0, 16, 0.01, 1, {}});
  REQUIRE(log.records().size() == 1);
  CHECK(log.records()[0].epoch == 0);
  CHECK(kb.grounding.params.hash() == before);
  const double sat0 = log.records()[0].sat_train;
  CHECK(sat0 > 0.0);
  CHECK(sat0 < 1.0);
}

TEST_CASE("training raises satisfiability and accuracy, deterministically") {
  const Dataset tr = clusters(300, 5);
  const Dataset te = clusters(90, 6);
  TrainConfig cfg{15, 32, 0.01, 7, {}};
  cfg.queries.push_back({"q", parse_formula("forall x: P(x, a) -> ~P(x, b)", ParseOptions{{"a", "b"}})});
  KnowledgeBase kb = cluster_kb();
  const MetricsLog a = train(kb, cluster_task(), tr, te, cfg);
  REQUIRE(a.records().size() == 16);
  CHECK(a.query_names() == std::vector<std::string>{"q"});
  CHECK(a.records().back().sat_train >= a.records().front().sat_train + 0.2);
  CHECK(a.records().back().acc_test >= 0.95);
  CHECK(a.records().back().queries[0] > 0.9);
  for (const auto& r : a.records()) {
    CHECK(r.sat_train >= 0.0);
    CHECK(r.sat_test <= 1.0);
  }
  CHECK(task_accuracy(kb.grounding, cluster_task(), te) == a.records().back().acc_test);

  KnowledgeBase again = cluster_kb();
  const MetricsLog b = train(again, cluster_task(), tr, te, cfg);
  CHECK(again.grounding.params.hash() == kb.grounding.params.hash());
  for (std::size_t i = 0; i < a.records().size(); ++i) {
    CHECK(a.records()[i].sat_train == b.records()[i].sat_train);
    CHECK(a.records()[i].acc_test == b.records()[i].acc_test);
  }
}

TEST_CASE("regression training with a similarity predicate") {
  KnowledgeBase kb;
  kb.grounding.add_mlp_function("f", MlpSpec{1, {8, 8}, 1, Activation::Elu, Activation::Identity, 2});
  kb.grounding.add_predicate("Sim", std::make_shared<SimilarityPredicate>(Distance::Euclidean));
  kb.add_axiom("fit", parse_formula("forall x, y: Sim(f(x), y)"));
  Dataset d{Array(Shape{40, 1}), Array(Shape{40, 1})};
  for (std::size_t i = 0; i < 40; ++i) {
    d.x[i] = static_cast<double>(i) / 39.0;
    d.y[i] = 0.2 + 0.6 * d.x[i];
  }
  const TaskSpec task{TaskKind::Regression, "f"};
  const MetricsLog log = train(kb, task, d, d, TrainConfig{150, 8, 0.01, 1, {}});
  CHECK(log.records().back().acc_train > 0.95);
  CHECK(log.records().back().sat_train > log.records().front().sat_train);
  const Array pred = predict(kb.grounding, task, d.x);
  CHECK(pred.shape() == Shape{40, 1});
}

TEST_CASE("divergence names the epoch") {
  KnowledgeBase kb;
  kb.grounding.params.add("w", Array::scalar(1.0));
  kb.grounding.add_predicate("P", std::make_shared<LambdaPredicate>([](Graph& g, std::span<const NodeId> args) {
                               NodeId w = g.parameter("w");
                               if (g.value(w).item() > 1.5) return g.log(g.constant(Array::zeros({g.shape(args[0])[0]})));
                               return g.reshape(g.sigmoid(g.mul(args[0], w)), Shape{g.shape(args[0])[0]});
                             }));
  kb.grounding.add_function("f", std::make_shared<LambdaFunction>([](Graph&, std::span<const NodeId> a) { return a[0]; }));
  kb.add_axiom("a", parse_formula("forall x: P(x)"));
  Dataset d{Array::matrix(4, 1, {1, 2, 3, 4}), Array::matrix(4, 1, {0, 0, 0, 0})};
  const TaskSpec task{TaskKind::Regression, "f", {}, "x", "y"};
  try {
    train(kb, task, d, d, TrainConfig{5, 2, 1.0, 1, {}});
    FAIL("no error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CAPTURE(msg);
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
  }
}
