#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ltn/error.hpp"

namespace ltn::testing {

Gradients numeric_gradients(ParameterStore& store, const std::function<double()>& f, double h) {
  Gradients out;
  std::vector<std::string> names;
  for (const auto& [name, _] : store.all()) names.push_back(name);
  for (const auto& name : names) {
    Array grad(store.get(name).shape());
    const std::size_t n = store.get(name).size();
    for (std::size_t i = 0; i < n; ++i) {
      double& v = store.get_mutable(name).mutable_data()[i];
      const double saved = v;
      v = saved + h;
      const double up = f();
      store.get_mutable(name).mutable_data()[i] = saved - h;
      const double down = f();
      store.get_mutable(name).mutable_data()[i] = saved;
      grad.mutable_data()[i] = (up - down) / (2.0 * h);
    }
    out.emplace(name, std::move(grad));
  }
  return out;
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double max_relative_error(const Gradients& a, const Gradients& b, double floor) {
  std::set<std::string> names;
  for (const auto& [n, _] : a) names.insert(n);
  for (const auto& [n, _] : b) names.insert(n);
  double worst = 0.0;
  for (const auto& n : names) {
    auto ia = a.find(n);
    auto ib = b.find(n);
    const std::size_t size = ia != a.end() ? ia->second.size() : ib->second.size();
    for (std::size_t i = 0; i < size; ++i) {
      const double va = ia != a.end() ? ia->second[i] : 0.0;
      const double vb = ib != b.end() ? ib->second[i] : 0.0;
      worst = std::max(worst, relative_error(va, vb, floor));
    }
  }
  return worst;
}

std::string BruteWorld::axis_of(const std::string& var) const {
  auto it = axis.find(var);
  return it == axis.end() ? var : it->second;
}

std::size_t BruteWorld::extent(const std::string& ax) const {
  for (const auto& [var, rows] : variables) {
    if (axis_of(var) == ax) return rows.size();
  }
  throw Error("oracle: unknown axis " + ax);
}

namespace {

Row term_value(const Term& t, const BruteWorld& w, const std::map<std::string, std::size_t>& assign) {
  switch (t.kind) {
    case Term::Kind::Variable: {
      const auto& rows = w.variables.at(t.name);
      return rows.at(assign.at(w.axis_of(t.name)));
    }
    case Term::Kind::Constant:
      return w.constants.at(t.name);
    case Term::Kind::Function: {
      std::vector<Row> args;
      for (const auto& a : t.args) args.push_back(term_value(a, w, assign));
      return w.functions.at(t.name)(args);
    }
  }
  return {};
}

void term_variables(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Variable) out.insert(t.name);
  for (const auto& a : t.args) term_variables(a, out);
}

// Free variables that denote individuals (label arguments excluded).
void free_vars(const Formula& f, const BruteWorld& w, std::set<std::string>& out) {
  switch (f.kind()) {
    case FormulaKind::Predicate: {
      const auto& labels = w.predicates.at(f.name()).labels;
      for (const auto& t : f.terms()) {
        if (t.kind == Term::Kind::Variable &&
            std::find(labels.begin(), labels.end(), t.name) != labels.end() && !w.variables.count(t.name)) {
          continue;
        }
        term_variables(t, out);
      }
      return;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      std::set<std::string> inner;
      free_vars(f.child(0), w, inner);
      for (const auto& v : f.vars()) inner.erase(v);
      out.insert(inner.begin(), inner.end());
      return;
    }
    default:
      for (std::size_t i = 0; i < f.child_count(); ++i) free_vars(f.child(i), w, out);
  }
}

double p_mean_forall(const std::vector<double>& v, double p) {
  double s = 0.0;
  for (double a : v) s += std::pow(std::clamp(1.0 - a, kAggregationEpsilon, 1.0), p);
  return 1.0 - std::pow(s / static_cast<double>(v.size()), 1.0 / p);
}

double p_mean_exists(const std::vector<double>& v, double p) {
  double s = 0.0;
  for (double a : v) s += std::pow(std::clamp(a, kAggregationEpsilon, 1.0), p);
  return std::pow(s / static_cast<double>(v.size()), 1.0 / p);
}

}  // namespace

double brute_truth(const Formula& f, const BruteWorld& w, const std::map<std::string, std::size_t>& assign,
                   const QuantifierConfig& config, EvalMode mode) {
  switch (f.kind()) {
    case FormulaKind::Predicate: {
      const auto& pred = w.predicates.at(f.name());
      std::vector<Row> args;
      std::optional<std::size_t> label;
      for (const auto& t : f.terms()) {
        const bool named = t.kind != Term::Kind::Function && !w.variables.count(t.name);
        auto it = std::find(pred.labels.begin(), pred.labels.end(), t.name);
        if (named && it != pred.labels.end()) {
          label = static_cast<std::size_t>(it - pred.labels.begin());
          continue;
        }
        args.push_back(term_value(t, w, assign));
      }
      const Row out = pred.fn(args);
      return label ? out.at(*label) : out.at(0);
    }
    case FormulaKind::Not:
      return 1.0 - brute_truth(f.child(0), w, assign, config, mode);
    case FormulaKind::And: {
      const double a = brute_truth(f.child(0), w, assign, config, mode);
      const double b = brute_truth(f.child(1), w, assign, config, mode);
      return a * b;
    }
    case FormulaKind::Or: {
      const double a = brute_truth(f.child(0), w, assign, config, mode);
      const double b = brute_truth(f.child(1), w, assign, config, mode);
      return a + b - a * b;
    }
    case FormulaKind::Implies: {
      const double a = brute_truth(f.child(0), w, assign, config, mode);
      const double b = brute_truth(f.child(1), w, assign, config, mode);
      return 1.0 - a + a * b;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      const bool universal = f.kind() == FormulaKind::Forall;
      double p = universal ? config.p_forall_query : config.p_exists_query;
      if (mode == EvalMode::Train) p = config.p_train;
      if (f.p()) p = *f.p();
      std::set<std::string> body_free;
      free_vars(f.child(0), w, body_free);
      std::vector<std::string> axes;
      for (const auto& v : f.vars()) {
        if (!body_free.count(v)) continue;
        const auto ax = w.axis_of(v);
        if (std::find(axes.begin(), axes.end(), ax) == axes.end()) axes.push_back(ax);
      }
      if (axes.empty()) return brute_truth(f.child(0), w, assign, config, mode);
      std::vector<double> values;
      std::map<std::string, std::size_t> a = assign;
      std::vector<std::size_t> idx(axes.size(), 0);
      for (;;) {
        for (std::size_t i = 0; i < axes.size(); ++i) a[axes[i]] = idx[i];
        values.push_back(brute_truth(f.child(0), w, a, config, mode));
        std::size_t d = axes.size();
        while (d > 0) {
          --d;
          if (++idx[d] < w.extent(axes[d])) break;
          idx[d] = 0;
          if (d == 0) {
            d = axes.size() + 1;
            break;
          }
        }
        if (d == axes.size() + 1) break;
      }
      return universal ? p_mean_forall(values, p) : p_mean_exists(values, p);
    }
  }
  return 0.0;
}

std::vector<double> brute_grid(const Formula& f, const BruteWorld& w, const std::vector<std::string>& axes,
                               const QuantifierConfig& config, EvalMode mode) {
  std::vector<double> out;
  std::vector<std::size_t> idx(axes.size(), 0);
  std::map<std::string, std::size_t> a;
  for (;;) {
    for (std::size_t i = 0; i < axes.size(); ++i) a[axes[i]] = idx[i];
    out.push_back(brute_truth(f, w, a, config, mode));
    std::size_t d = axes.size();
    bool done = true;
    while (d > 0) {
      --d;
      if (++idx[d] < w.extent(axes[d])) {
        done = false;
        break;
      }
      idx[d] = 0;
    }
    if (done) break;
  }
  return out;
}

namespace {

template <class T>
const T& choose(std::mt19937_64& rng, const std::vector<T>& v) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

bool coin(std::mt19937_64& rng, double chance) { return std::uniform_real_distribution<double>(0, 1)(rng) < chance; }

Term random_term(std::mt19937_64& rng, const RandomFormulaOptions& o) {
  std::uniform_int_distribution<int> kind(0, 9);
  const int k = kind(rng);
  if (k == 0 && !o.constants.empty()) return Term::constant(choose(rng, o.constants));
  if (k == 1 && !o.functions.empty()) {
    return Term::function(choose(rng, o.functions), {Term::variable(choose(rng, o.variables))});
  }
  return Term::variable(choose(rng, o.variables));
}

Formula random_atom(std::mt19937_64& rng, const RandomFormulaOptions& o) {
  const auto& sig = choose(rng, o.predicates);
  std::vector<Term> args;
  for (std::size_t i = 0; i < sig.arity; ++i) args.push_back(random_term(rng, o));
  if (!sig.labels.empty()) {
    std::uniform_int_distribution<std::size_t> pos(0, args.size());
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos(rng)), Term::constant(choose(rng, sig.labels)));
  }
  return Formula::predicate(sig.name, std::move(args));
}

std::optional<double> random_p(std::mt19937_64& rng, const RandomFormulaOptions& o) {
  if (!coin(rng, o.explicit_p_chance)) return std::nullopt;
  static const std::vector<double> ps{1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 10.25};
  return choose(rng, ps);
}

Formula random_rec(std::mt19937_64& rng, const RandomFormulaOptions& o, std::size_t depth,
                   std::set<std::string>& bound) {
  if (depth <= 1) return random_atom(rng, o);
  std::uniform_int_distribution<int> kind(0, 6);
  switch (kind(rng)) {
    case 0: return random_atom(rng, o);
    case 1: return Formula::negation(random_rec(rng, o, depth - 1, bound));
    case 2: return Formula::conjunction(random_rec(rng, o, depth - 1, bound), random_rec(rng, o, depth - 1, bound));
    case 3: return Formula::disjunction(random_rec(rng, o, depth - 1, bound), random_rec(rng, o, depth - 1, bound));
    case 4: return Formula::implication(random_rec(rng, o, depth - 1, bound), random_rec(rng, o, depth - 1, bound));
    default: {
      std::vector<std::string> free;
      for (const auto& v : o.variables) {
        if (!bound.count(v)) free.push_back(v);
      }
      if (free.empty()) return random_atom(rng, o);
      std::shuffle(free.begin(), free.end(), rng);
      std::uniform_int_distribution<std::size_t> count(1, std::min<std::size_t>(2, free.size()));
      free.resize(count(rng));
      for (const auto& v : free) bound.insert(v);
      Formula body = random_rec(rng, o, depth - 1, bound);
      for (const auto& v : free) bound.erase(v);
      const auto p = random_p(rng, o);
      return coin(rng, 0.5) ? Formula::forall(free, body, p) : Formula::exists(free, body, p);
    }
  }
}

}  // namespace

Formula random_formula(std::mt19937_64& rng, const RandomFormulaOptions& o) {
  std::size_t depth = o.max_depth;
  if (o.closed && depth > 1) --depth;
  for (;;) {
    std::set<std::string> bound;
    Formula f = random_rec(rng, o, depth, bound);
    if (!o.closed) return f;
    auto free = f.free_variables();
    if (free.empty()) return f;
    f = coin(rng, 0.5) ? Formula::forall(free, f) : Formula::exists(free, f);
    try {
      f.validate();
      return f;
    } catch (const LogicError&) {
      // a free variable is also bound further down; draw again
    }
  }
}

std::string random_identifier(std::mt19937_64& rng, std::size_t max_len) {
  static const std::string first = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  static const std::string rest = first + "0123456789_";
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::string s(1, first[std::uniform_int_distribution<std::size_t>(0, first.size() - 1)(rng)]);
  const auto n = len(rng);
  for (std::size_t i = 1; i < n; ++i) s += rest[std::uniform_int_distribution<std::size_t>(0, rest.size() - 1)(rng)];
  if (s == "forall" || s == "exists" || s == "p") s += "_";
  return s;
}

}  // namespace ltn::testing

#include <fstream>
#include <sstream>

#include "ltn/logic/similarity.hpp"
#include "ltn/nn/mlp.hpp"

namespace ltn::testing {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

Array random_batch(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Array a(Shape{n, d});
  for (auto& v : a.mutable_data()) v = u(rng);
  return a;
}

std::vector<Row> rows_of(const Array& a) {
  std::vector<Row> out;
  for (std::size_t i = 0; i < a.dim(0); ++i) {
    Row r;
    for (std::size_t j = 0; j < a.dim(1); ++j) r.push_back(a.at(i, j));
    out.push_back(r);
  }
  return out;
}

}  // namespace

std::unique_ptr<TestWorld> make_test_world(std::mt19937_64& rng, std::size_t max_individuals) {
  auto w = std::make_unique<TestWorld>();
  Grounding& gr = w->grounding;
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  Array aw(Shape{2, 1});
  for (auto& v : aw.mutable_data()) v = u(rng);
  gr.params.add("A.w", aw);
  gr.params.add("A.b", Array::vector({u(rng)}));
  gr.add_predicate("A", std::make_shared<LambdaPredicate>([](Graph& g, std::span<const NodeId> args) {
                     NodeId z = g.add(g.matmul(args[0], g.parameter("A.w")), g.parameter("A.b"));
                     return g.reshape(g.sigmoid(z), Shape{g.shape(z)[0]});
                   }));

  MlpSpec spec;
  spec.input_dim = 2;
  spec.hidden_dims = {4, 4};
  spec.output_dim = 1;
  spec.seed = rng();
  gr.add_mlp_predicate("M", spec);

  Array lw(Shape{2, 2});
  for (auto& v : lw.mutable_data()) v = u(rng);
  gr.params.add("L.w", lw);
  gr.params.add("L.b", Array::vector({u(rng), u(rng)}));
  gr.add_predicate("L", std::make_shared<LambdaPredicate>(
                            [](Graph& g, std::span<const NodeId> args) {
                              return g.sigmoid(g.add(g.matmul(args[0], g.parameter("L.w")), g.parameter("L.b")));
                            },
                            std::vector<std::string>{"a", "b"}));

  gr.add_predicate("R", std::make_shared<LambdaPredicate>([](Graph& g, std::span<const NodeId> args) {
                     NodeId d = g.sub(args[0], args[1]);
                     return g.exp(g.mul(g.sum(g.mul(d, d), 1), g.scalar(-1.0)));
                   }));
  gr.add_predicate("S", std::make_shared<SimilarityPredicate>(Distance::Euclidean));
  gr.add_function("g", std::make_shared<LambdaFunction>([](Graph& g, std::span<const NodeId> args) {
                    return g.add(g.mul(args[0], g.scalar(0.5)), g.scalar(0.1));
                  }));
  gr.add_constant("c", Array::vector({0.3, -0.2}));

  std::uniform_int_distribution<std::size_t> count(1, max_individuals);
  for (const char* v : {"x", "y", "z"}) {
    Array batch = random_batch(rng, count(rng), 2);
    w->brute.variables[v] = rows_of(batch);
    w->bindings.bind(v, batch);
  }

  const ParameterStore* store = &gr.params;
  BruteWorld& b = w->brute;
  b.constants["c"] = {0.3, -0.2};
  b.functions["g"] = [](const std::vector<Row>& a) {
    return Row{0.5 * a[0][0] + 0.1, 0.5 * a[0][1] + 0.1};
  };
  b.predicates["A"] = {{}, [store](const std::vector<Row>& a) {
                         const Array& pw = store->get("A.w");
                         return Row{sigmoid(a[0][0] * pw[0] + a[0][1] * pw[1] + store->get("A.b")[0])};
                       }};
  const auto mlp = Mlp("M", spec);
  b.predicates["M"] = {{}, [store, mlp](const std::vector<Row>& a) {
                         Array in = Array::matrix(1, 2, {a[0][0], a[0][1]});
                         return Row{mlp_forward(mlp.spec(), mlp.params(*store), in)[0]};
                       }};
  b.predicates["L"] = {{"a", "b"}, [store](const std::vector<Row>& a) {
                         const Array& pw = store->get("L.w");
                         const Array& pb = store->get("L.b");
                         Row out;
                         for (std::size_t j = 0; j < 2; ++j) {
                           out.push_back(sigmoid(a[0][0] * pw.at(0, j) + a[0][1] * pw.at(1, j) + pb[j]));
                         }
                         return out;
                       }};
  b.predicates["R"] = {{}, [](const std::vector<Row>& a) {
                         double s = 0.0;
                         for (std::size_t j = 0; j < 2; ++j) s += (a[0][j] - a[1][j]) * (a[0][j] - a[1][j]);
                         return Row{std::exp(-s)};
                       }};
  b.predicates["S"] = {{}, [](const std::vector<Row>& a) {
                         double s = 0.0;
                         for (std::size_t j = 0; j < 2; ++j) s += (a[0][j] - a[1][j]) * (a[0][j] - a[1][j]);
                         return Row{std::exp(-std::sqrt(std::max(s, 1e-12)))};
                       }};
  return w;
}

RandomFormulaOptions test_world_formula_options() {
  RandomFormulaOptions o;
  o.variables = {"x", "y", "z"};
  o.predicates = {{"A", 1, {}}, {"M", 1, {}}, {"L", 1, {"a", "b"}}, {"R", 2, {}}, {"S", 2, {}}};
  o.functions = {"g"};
  o.constants = {"c"};
  o.max_depth = 4;
  return o;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ltn_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ltn::testing
