#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "ltn/error.hpp"
#include "ltn/nn/mlp.hpp"
#include "oracles.hpp"

using namespace ltn;

namespace {

Array uniform(std::mt19937_64& rng, Shape shape, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Array a(std::move(shape));
  for (auto& v : a.mutable_data()) v = u(rng);
  return a;
}

MlpParams zero_params(const MlpSpec& spec) {
  MlpParams p = mlp_init(spec);
  for (auto& w : p.weights) w = Array::zeros(w.shape());
  return p;
}

}  // namespace

TEST_CASE("mlp_init shapes, zero biases, determinism") {
  MlpSpec spec{4, {8, 8}, 3, Activation::Elu, Activation::Sigmoid, 7};
  const MlpParams p = mlp_init(spec);
  REQUIRE(p.weights.size() == 3);
  CHECK(p.weights[0].shape() == Shape{4, 8});
  CHECK(p.weights[1].shape() == Shape{8, 8});
  CHECK(p.weights[2].shape() == Shape{8, 3});
  for (const auto& b : p.biases) {
    for (double v : b.data()) CHECK(v == 0.0);
  }
  const MlpParams q = mlp_init(spec);
  for (std::size_t l = 0; l < 3; ++l) CHECK(p.weights[l] == q.weights[l]);
  spec.seed = 8;
  CHECK(!(mlp_init(spec).weights[0] == p.weights[0]));
}

TEST_CASE("glorot limit bounds the initial weights") {
  MlpSpec spec{10, {30, 30}, 5, Activation::Elu, Activation::Sigmoid, 1};
  const MlpParams p = mlp_init(spec);
  const auto dims = spec.dims();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    double mean = 0.0;
    for (double v : p.weights[l].data()) {
      CHECK(std::abs(v) <= limit);
      mean += v;
    }
    mean /= static_cast<double>(p.weights[l].size());
    CHECK(std::abs(mean) < limit / 4);
  }
}

TEST_CASE("mlp_forward examples") {
  std::mt19937_64 rng(2);
  const Array batch = uniform(rng, {5, 4}, -2, 2);

  MlpSpec sig{4, {6, 6}, 2, Activation::Elu, Activation::Sigmoid, 1};
  const Array out = mlp_forward(sig, zero_params(sig), batch);
  CHECK(out.shape() == Shape{5, 2});
  for (double v : out.data()) CHECK(v == 0.5);

  MlpSpec soft{4, {6, 6}, 3, Activation::Relu, Activation::Softmax, 1};
  const Array s = mlp_forward(soft, zero_params(soft), batch);
  for (double v : s.data()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(mlp_forward(sig, mlp_init(sig), uniform(rng, {5, 3}, 0, 1)), ShapeError);
}

TEST_CASE("mlp output ranges") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Array batch = uniform(rng, {7, 3}, -2, 2);
    MlpSpec sig{3, {5, 5}, 4, Activation::Elu, Activation::Sigmoid, rng()};
    const Array out = mlp_forward(sig, mlp_init(sig), batch);
    for (double v : out.data()) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    MlpSpec soft{3, {5, 5}, 4, Activation::Relu, Activation::Softmax, rng()};
    const Array s = mlp_forward(soft, mlp_init(soft), batch);
    for (std::size_t r = 0; r < 7; ++r) {
      double sum = 0;
      for (std::size_t c = 0; c < 4; ++c) sum += s.at(r, c);
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("mlp_forward is permutation-equivariant over the batch") {
  std::mt19937_64 rng(6);
  MlpSpec spec{3, {8, 8}, 2, Activation::Elu, Activation::Sigmoid, 3};
  const MlpParams p = mlp_init(spec);
  const Array batch = uniform(rng, {9, 3}, -2, 2);
  std::vector<std::size_t> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const Array out = mlp_forward(spec, p, batch);
  const Array permuted = mlp_forward(spec, p, batch.take_rows(perm));
  CHECK(permuted == out.take_rows(perm));
}

TEST_CASE("graph forward agrees with plain forward") {
  std::mt19937_64 rng(8);
  MlpSpec spec{3, {6, 6}, 2, Activation::Elu, Activation::Sigmoid, 5};
  Mlp mlp("net", spec);
  ParameterStore store;
  mlp.register_params(store);
  const Array batch = uniform(rng, {4, 3}, -2, 2);
  Graph g(&store);
  const Array a = g.value(mlp.forward(g, g.input("x", batch)));
  const Array b = mlp_forward(spec, mlp.params(store), batch);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
  CHECK(store.contains(mlp.weight_name(0)));
  CHECK(store.contains(mlp.bias_name(2)));
}

TEST_CASE("spec validation") {
  CHECK_THROWS(MlpSpec{0, {4}, 1, Activation::Elu, Activation::Sigmoid, 0}.validate());
  CHECK_THROWS(MlpSpec{2, {0}, 1, Activation::Elu, Activation::Sigmoid, 0}.validate());
  CHECK_THROWS(MlpSpec{2, {4}, 1, Activation::Sigmoid, Activation::Sigmoid, 0}.validate());
  CHECK_THROWS(MlpSpec{2, {4}, 1, Activation::Elu, Activation::Relu, 0}.validate());
  CHECK(MlpSpec{2, {4, 4}, 1, Activation::Elu, Activation::Identity, 0}.deep());
  CHECK(!MlpSpec{2, {4}, 1, Activation::Elu, Activation::Identity, 0}.deep());
  CHECK(activation_from_string("relu") == Activation::Relu);
  CHECK_THROWS(activation_from_string("tanh"));
}

TEST_CASE("cross_entropy examples") {
  const Array onehot = Array::matrix(2, 3, {1, 0, 0, 0, 0, 1});
  CHECK(cross_entropy(onehot, onehot) == 0.0);

  Array uniform5 = Array::full({4, 5}, 0.2);
  Array labels = Array::zeros({4, 5});
  for (std::size_t r = 0; r < 4; ++r) labels.at(r, r) = 1;
  CHECK(cross_entropy(uniform5, labels) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK(cross_entropy(uniform5, labels) == doctest::Approx(1.60944).epsilon(1e-5));

  const Array half = Array::matrix(1, 2, {0.5, 0.5});
  CHECK(cross_entropy(half, Array::matrix(1, 2, {0, 1})) == doctest::Approx(0.69315).epsilon(1e-5));

  // clamped at 1e-12
  CHECK(cross_entropy(Array::matrix(1, 2, {1, 0}), Array::matrix(1, 2, {0, 1})) ==
        doctest::Approx(-std::log(1e-12)).epsilon(1e-12));

  CHECK_THROWS(cross_entropy(half, Array::matrix(1, 2, {1, 1})));
  CHECK_THROWS(cross_entropy(Array::matrix(1, 2, {0.5, 0.6}), Array::matrix(1, 2, {1, 0})));
}

TEST_CASE("graph cross_entropy matches the plain version and finite differences") {
  std::mt19937_64 rng(12);
  MlpSpec spec{3, {5, 5}, 4, Activation::Relu, Activation::Softmax, 9};
  Mlp mlp("dnn", spec);
  ParameterStore store;
  mlp.register_params(store);
  const Array x = uniform(rng, {6, 3}, -2, 2);
  Array y = Array::zeros({6, 4});
  for (std::size_t r = 0; r < 6; ++r) y.at(r, r % 4) = 1;
  auto loss = [&](Graph& g) { return cross_entropy(g, mlp.forward(g, g.input("x", x)), y); };
  Graph g(&store);
  NodeId root = loss(g);
  CHECK(g.value(root).item() == doctest::Approx(cross_entropy(mlp_forward(spec, mlp.params(store), x), y)));
  const auto analytic = g.parameter_gradients(g.backward(root));
  const auto numeric = ltn::testing::numeric_gradients(store, [&] {
    Graph h(&store);
    return h.value(loss(h)).item();
  });
  CHECK(ltn::testing::max_relative_error(analytic, numeric) < 1e-4);
}

TEST_CASE("a small Adam step does not increase cross-entropy") {
  std::mt19937_64 rng(21);
  int violations = 0;
  for (int trial = 0; trial < 25; ++trial) {
    MlpSpec spec{4, {8, 8}, 3, Activation::Relu, Activation::Softmax, rng()};
    Mlp mlp("m", spec);
    ParameterStore store;
    mlp.register_params(store);
    const Array x = uniform(rng, {16, 4}, -2, 2);
    Array y = Array::zeros({16, 3});
    for (std::size_t r = 0; r < 16; ++r) y.at(r, rng() % 3) = 1;
    Graph g(&store);
    NodeId root = cross_entropy(g, mlp.forward(g, g.input("x", x)), y);
    const double before = g.value(root).item();
    Adam adam(AdamConfig{1e-4});
    adam.step(store, g.parameter_gradients(g.backward(root)));
    g.forward();
    if (g.value(root).item() > before) ++violations;
  }
  CHECK(violations <= 1);
}

TEST_CASE("train_dnn learns a separable problem and is deterministic") {
  std::mt19937_64 rng(30);
  const std::size_t n = 300;
  Array x(Shape{n, 2});
  Array y = Array::zeros({n, 3});
  std::normal_distribution<double> noise(0.0, 0.3);
  const double centres[3][2] = {{-2, 0}, {2, 0}, {0, 2.5}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % 3;
    x.at(i, 0) = centres[c][0] + noise(rng);
    x.at(i, 1) = centres[c][1] + noise(rng);
    y.at(i, c) = 1;
  }
  auto run = [&] {
    Mlp mlp("dnn", MlpSpec{2, {16, 16}, 3, Activation::Relu, Activation::Softmax, 4});
    ParameterStore store;
    mlp.register_params(store);
    return train_dnn(mlp, store, x, y, x, y, DnnTrainConfig{15, 32, 0.01, 2});
  };
  const auto a = run();
  REQUIRE(a.size() == 16);
  CHECK(a.front().epoch == 0);
  CHECK(a.back().acc_train >= 0.95);
  CHECK(a.back().loss_train < a.front().loss_train);
  const auto b = run();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].loss_train == b[i].loss_train);
    CHECK(a[i].acc_test == b[i].acc_test);
  }

  Mlp mlp("dnn", MlpSpec{2, {4, 4}, 3, Activation::Relu, Activation::Softmax, 4});
  ParameterStore store;
  mlp.register_params(store);
  const auto hash = store.hash();
  const auto zero = train_dnn(mlp, store, x, y, x, y, DnnTrainConfig{0, 32, 0.01, 2});
  CHECK(zero.size() == 1);
  CHECK(store.hash() == hash);
}
