#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "nnkit/attention.hpp"
#include "nnkit/checkpoint.hpp"
#include "nnkit/gradcheck.hpp"
#include "nnkit/graph.hpp"
#include "nnkit/params.hpp"
#include "nnkit/rnn.hpp"
#include "nnkit/tensor.hpp"

using namespace seam;
using namespace seam::nn;

namespace {

// Deterministic O(1)-magnitude values kept away from relu's kink.
Tensor64 random_tensor(std::vector<int> dims, Rng& rng) {
  Tensor64 t(std::move(dims));
  for (double& v : t.data) {
    v = rng.symmetric(1.0);
    if (std::fabs(v) < 0.05) v += 0.1;
  }
  return t;
}

ParameterStore64& fixture(ParameterStore64& store, const std::string& name,
                          std::vector<int> dims, Rng& rng) {
  store.adopt(name, random_tensor(std::move(dims), rng));
  return store;
}

// Reduces any output to a scalar whose gradient exercises every element.
// The pooling weights are a fixed function of position so repeated builds of
// the same loss (as grad_check does) see identical values.
Graph64::Var pooled(Graph64& g, Graph64::Var x) {
  Tensor64 w(g.value(x).shape);
  for (std::size_t i = 0; i < w.data.size(); ++i) {
    w.data[i] = 0.25 + std::sin(0.7 * static_cast<double>(i) + 0.3);
  }
  return g.sum_all(g.mul(x, g.input(w)));
}

double check_op(const std::string& tag,
                const std::function<Graph64::Var(Graph64&, ParameterStore64&)>& body,
                ParameterStore64& store) {
  GradCheckReport r = grad_check(store, body);
  INFO(tag, " worst: ", r.worst);
  return r.max_rel_error;
}

std::filesystem::path temp_path(const std::string& stem) {
  return std::filesystem::temp_directory_path() / (stem + "-" + std::to_string(::getpid()));
}

// Plain unmasked single-head attention, written independently of the graph
// ops: softmax(q k^T / sqrt(d)) v with naive loops.
Tensor64 naive_attention(const Tensor64& q, const Tensor64& k, const Tensor64& v) {
  const int nq = q.shape[0], nk = k.shape[0], d = q.shape[1];
  Tensor64 out({nq, d});
  for (int i = 0; i < nq; ++i) {
    std::vector<double> logits(static_cast<std::size_t>(nk));
    for (int j = 0; j < nk; ++j) {
      double s = 0;
      for (int c = 0; c < d; ++c) s += q.at(i, c) * k.at(j, c);
      logits[static_cast<std::size_t>(j)] = s / std::sqrt(static_cast<double>(d));
    }
    double mx = logits[0];
    for (double l : logits) mx = std::max(mx, l);
    double sum = 0;
    for (double& l : logits) {
      l = std::exp(l - mx);
      sum += l;
    }
    for (int j = 0; j < nk; ++j) {
      for (int c = 0; c < d; ++c) out.at(i, c) += logits[static_cast<std::size_t>(j)] / sum * v.at(j, c);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("tensor shape bookkeeping and validation") {
  Tensor64 t({2, 3}, 1.5);
  CHECK(t.rank() == 2);
  CHECK(t.numel() == 6);
  CHECK(t.at(1, 2) == 1.5);
  t.at(0, 1) = -2.0;
  CHECK(t.at(0, 1) == -2.0);

  CHECK_THROWS_AS(Tensor64({1, 2, 3, 4, 5}), SeamError);
  CHECK_THROWS_AS(Tensor64({2, 0}), SeamError);
  CHECK_THROWS_AS(Tensor64::from({2, 2}, {1.0, 2.0, 3.0}), SeamError);

  Graph64 g;
  Tensor64 bad({2});
  bad.data[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(g.input(bad), doctest::Contains("non-finite"), SeamError);
}

TEST_CASE("softmax of a constant row is uniform and rows sum to one") {
  Graph64 g;
  auto y = g.softmax(g.input(Tensor64({3})));
  for (int j = 0; j < 3; ++j) CHECK(g.value(y).at(j) == doctest::Approx(1.0 / 3).epsilon(1e-12));

  Rng rng(7);
  auto z = g.softmax(g.input(random_tensor({5, 9}, rng)));
  for (int i = 0; i < 5; ++i) {
    double sum = 0;
    for (int j = 0; j < 9; ++j) sum += g.value(z).at(i, j);
    CHECK(std::fabs(sum - 1.0) < 1e-6);
  }

  // Large logits must not overflow.
  Tensor64 big({2});
  big.data = {1000.0, 999.0};
  auto w = g.softmax(g.input(big));
  CHECK(g.value(w).at(0) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}

TEST_CASE("layer norm of a constant vector is all zeros") {
  Graph64 g;
  auto y = g.layer_norm(g.input(Tensor64({6}, 4.25)));
  for (int j = 0; j < 6; ++j) CHECK(g.value(y).at(j) == 0.0);
}

TEST_CASE("matmul matches a brute-force triple loop") {
  Rng rng(11);
  Tensor64 a = random_tensor({2, 3}, rng);
  Tensor64 b = random_tensor({3, 2}, rng);
  Graph64 g;
  auto c = g.matmul(g.input(a), g.input(b));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += a.at(i, k) * b.at(k, j);
      CHECK(g.value(c).at(i, j) == doctest::Approx(s).epsilon(1e-12));
    }
  }
}

TEST_CASE("small op forwards: concat, mean, transpose, embedding, relu") {
  Graph64 g;
  auto a = g.input(Tensor64::from({2, 2}, {1, 2, 3, 4}));
  auto b = g.input(Tensor64::from({2, 1}, {5, 6}));
  auto cat = g.concat_cols(a, b);
  CHECK(g.value(cat).shape == std::vector<int>{2, 3});
  CHECK(g.value(cat).at(0, 2) == 5.0);
  CHECK(g.value(cat).at(1, 0) == 3.0);

  auto m0 = g.mean_axis(a, 0);
  CHECK(g.value(m0).at(0) == 2.0);
  CHECK(g.value(m0).at(1) == 3.0);
  auto m1 = g.mean_axis(a, 1);
  CHECK(g.value(m1).at(0) == 1.5);

  auto tr = g.transpose(a);
  CHECK(g.value(tr).at(0, 1) == 3.0);

  auto table = g.input(Tensor64::from({3, 2}, {0, 1, 10, 11, 20, 21}));
  auto emb = g.embedding(table, {2, 0, 2});
  CHECK(g.value(emb).at(0, 1) == 21.0);
  CHECK(g.value(emb).at(1, 0) == 0.0);
  CHECK(g.value(emb).at(2, 0) == 20.0);
  CHECK_THROWS_AS(g.embedding(table, {3}), SeamError);
  CHECK_THROWS_AS(g.embedding(table, {}), SeamError);

  auto r = g.relu(g.input(Tensor64::from({3}, {-1, 0, 2})));
  CHECK(g.value(r).at(0) == 0.0);
  CHECK(g.value(r).at(2) == 2.0);

  auto row0 = g.input(Tensor64::from({2}, {1, 2}));
  auto row1 = g.input(Tensor64::from({2}, {3, 4}));
  auto st = g.stack_rows({row0, row1});
  CHECK(g.value(st).shape == std::vector<int>{2, 2});
  CHECK(g.value(st).at(1, 0) == 3.0);
  CHECK_THROWS_AS(g.stack_rows({}), SeamError);
  CHECK_THROWS_AS(g.stack_rows({row0, g.input(Tensor64::from({3}, {1, 2, 3}))}), SeamError);
}

TEST_CASE("every differentiable op passes a finite-difference check") {
  Rng rng(23);
  double worst = 0;
  auto track = [&](double e) { worst = std::max(worst, e); };

  {
    ParameterStore64 s;
    fixture(s, "a", {3, 4}, rng);
    fixture(s, "b", {4, 2}, rng);
    track(check_op("matmul", [&](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.matmul(g.param(p, "a"), g.param(p, "b")));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "a", {2, 3, 4}, rng);
    fixture(s, "b", {2, 4, 3}, rng);
    track(check_op("bmm", [&](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.bmm(g.param(p, "a"), g.param(p, "b")));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "a", {2, 3, 4}, rng);
    track(check_op("transpose", [&](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.transpose(g.param(p, "a")));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "a", {3, 4}, rng);
    fixture(s, "b", {3, 4}, rng);
    fixture(s, "c", {4}, rng);
    track(check_op("add/mul with broadcast", [&](Graph64& g, ParameterStore64& p) {
      auto both = g.mul(g.add(g.param(p, "a"), g.param(p, "c")),
                        g.add(g.param(p, "b"), g.param(p, "c")));
      return pooled(g, g.mul(both, g.param(p, "c")));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "x", {2, 3, 4}, rng);
    fixture(s, "m", {3, 4}, rng);
    track(check_op("mul_batch/scale", [&](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.scale(g.mul_batch(g.param(p, "x"), g.param(p, "m")), 0.7));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "a", {3, 2}, rng);
    fixture(s, "b", {3, 3}, rng);
    fixture(s, "v", {4}, rng);
    fixture(s, "w", {2}, rng);
    track(check_op("concat_cols", [&](Graph64& g, ParameterStore64& p) {
      auto wide = g.concat_cols(g.param(p, "a"), g.param(p, "b"));
      auto flat = g.concat_cols(g.param(p, "v"), g.param(p, "w"));
      return g.add(pooled(g, wide), pooled(g, flat));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "a", {4, 3}, rng);
    track(check_op("mean_axis", [&](Graph64& g, ParameterStore64& p) {
      auto rows = g.mean_axis(g.param(p, "a"), 0);
      auto cols = g.mean_axis(g.param(p, "a"), 1);
      return g.add(pooled(g, rows), g.add(pooled(g, cols), g.mean_axis(rows, 0)));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "r0", {4}, rng);
    fixture(s, "r1", {4}, rng);
    track(check_op("stack_rows", [&](Graph64& g, ParameterStore64& p) {
      auto a = g.param(p, "r0");
      return pooled(g, g.stack_rows({a, g.param(p, "r1"), a}));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "table", {5, 3}, rng);
    track(check_op("embedding", [&](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.embedding(g.param(p, "table"), {1, 4, 1, 0}));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "x", {3, 6}, rng);
    track(check_op("layer_norm", [&](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.layer_norm(g.param(p, "x")));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "x", {2, 3, 4}, rng);
    track(check_op("softmax", [&](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.softmax(g.param(p, "x")));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "x", {2, 3, 4}, rng);
    Tensor64 mask({3, 4});
    mask.data = {1, 0, 1, 0, 0, 1, 1, 1, 1, 1, 0, 0};
    track(check_op("masked_softmax", [&, mask](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.masked_softmax(g.param(p, "x"), mask));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "x", {4, 5}, rng);
    track(check_op("relu/sigmoid/tanh", [&](Graph64& g, ParameterStore64& p) {
      auto x = g.param(p, "x");
      return g.add(pooled(g, g.relu(x)),
                   g.add(pooled(g, g.sigmoid(x)), pooled(g, g.tanh_(x))));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "logits", {4, 6}, rng);
    track(check_op("cross_entropy", [&](Graph64& g, ParameterStore64& p) {
      return g.cross_entropy(g.param(p, "logits"), {2, 0, 5, 2});
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "x", {2, 4, 4}, rng);
    fixture(s, "rel", {2, 5}, rng);
    track(check_op("add_relative_bias", [&](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.add_relative_bias(g.param(p, "x"), g.param(p, "rel"), 2));
    }, s));
  }
  {
    ParameterStore64 s;
    fixture(s, "x", {3, 6}, rng);
    track(check_op("split/merge heads", [&](Graph64& g, ParameterStore64& p) {
      return pooled(g, g.merge_heads(g.split_heads(g.param(p, "x"), 2)));
    }, s));
  }

  CHECK(worst < 1e-4);
}

TEST_CASE("linear layer with cross entropy grad-checks below 1e-6") {
  Rng rng(31);
  ParameterStore64 s;
  fixture(s, "w", {5, 4}, rng);
  fixture(s, "b", {4}, rng);
  Tensor64 x = random_tensor({6, 5}, rng);
  GradCheckReport r = grad_check(s, [&](Graph64& g, ParameterStore64& p) {
    auto logits = g.add(g.matmul(g.input(x), g.param(p, "w")), g.param(p, "b"));
    return g.cross_entropy(logits, {0, 3, 1, 2, 3, 0});
  });
  CHECK(r.max_rel_error < 1e-6);
}

TEST_CASE("masked attention block grad-checks below 1e-4") {
  Rng rng(37);
  ParameterStore64 s;
  fixture(s, "wq", {6, 8}, rng);
  fixture(s, "wk", {6, 8}, rng);
  fixture(s, "wv", {6, 8}, rng);
  fixture(s, "rel", {2, 7}, rng);
  Tensor64 x = random_tensor({5, 6}, rng);
  Tensor64 mask({5, 5});
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) mask.at(i, j) = (std::abs(i - j) <= 1 || (i + j) % 3 == 0) ? 1.0 : 0.0;
  }
  GradCheckReport r = grad_check(s, [&](Graph64& g, ParameterStore64& p) {
    auto xin = g.input(x);
    auto att = masked_attention<double>(g, g.matmul(xin, g.param(p, "wq")),
                                        g.matmul(xin, g.param(p, "wk")),
                                        g.matmul(xin, g.param(p, "wv")), mask, g.param(p, "rel"),
                                        3, 2);
    return pooled(g, att.out);
  });
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("recurrent cell unrolled five steps grad-checks below 1e-4") {
  Rng rng(41);
  ParameterStore64 s;
  create_recurrent_params(s, "cell", 3, 4, rng);
  std::vector<Tensor64> xs;
  for (int t = 0; t < 5; ++t) xs.push_back(random_tensor({2, 3}, rng));
  GradCheckReport r = grad_check(s, [&](Graph64& g, ParameterStore64& p) {
    RecurrentState<double> st = zero_state<double>(g, 2, 4);
    for (int t = 0; t < 5; ++t) st = recurrent_step(g, p, "cell", g.input(xs[t]), st);
    return pooled(g, st.h);
  });
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("identity mask returns the value rows untouched") {
  Rng rng(43);
  Tensor64 q = random_tensor({4, 6}, rng);
  Tensor64 k = random_tensor({4, 6}, rng);
  Tensor64 v = random_tensor({4, 6}, rng);
  Tensor64 eye({4, 4});
  for (int i = 0; i < 4; ++i) eye.at(i, i) = 1.0;
  Graph64 g(false);
  auto att = masked_attention<double>(g, g.input(q), g.input(k), g.input(v), eye, {}, 1, 2);
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 6; ++c) CHECK(g.value(att.out).at(i, c) == v.at(i, c));
  }
}

TEST_CASE("all-ones mask with no relative bias equals plain attention") {
  Rng rng(47);
  Tensor64 q = random_tensor({3, 4}, rng);
  Tensor64 k = random_tensor({5, 4}, rng);
  Tensor64 v = random_tensor({5, 4}, rng);
  Tensor64 oracle = naive_attention(q, k, v);
  Graph64 g(false);
  auto att = masked_attention<double>(g, g.input(q), g.input(k), g.input(v),
                                      ones_mask<double>(3, 5), {}, 1, 1);
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 4; ++c) {
      CHECK(g.value(att.out).at(i, c) == doctest::Approx(oracle.at(i, c)).epsilon(1e-9));
    }
  }
  // Attention rows sum to one.
  for (int i = 0; i < 3; ++i) {
    double sum = 0;
    for (int j = 0; j < 5; ++j) sum += g.value(att.weights).at(0, i, j);
    CHECK(std::fabs(sum - 1.0) < 1e-6);
  }
}

TEST_CASE("additive masking zeroes weights exactly; literal mode does not") {
  Rng rng(53);
  Tensor64 q = random_tensor({3, 4}, rng);
  Tensor64 k = random_tensor({3, 4}, rng);
  Tensor64 v = random_tensor({3, 4}, rng);
  Tensor64 mask({3, 3}, 1.0);
  mask.at(0, 2) = 0.0;
  mask.at(2, 0) = 0.0;

  Graph64 g(false);
  auto additive = masked_attention<double>(g, g.input(q), g.input(k), g.input(v), mask, {}, 1, 1);
  CHECK(g.value(additive.weights).at(0, 0, 2) == 0.0);
  CHECK(g.value(additive.weights).at(0, 2, 0) == 0.0);

  auto literal = masked_attention<double>(g, g.input(q), g.input(k), g.input(v), mask, {}, 1, 1,
                                          MaskMode::Literal);
  CHECK(g.value(literal.weights).at(0, 0, 2) > 0.0);
}

TEST_CASE("masked-out content cannot influence attendable rows") {
  Rng rng(59);
  Tensor64 q = random_tensor({3, 4}, rng);
  Tensor64 k = random_tensor({3, 4}, rng);
  Tensor64 v = random_tensor({3, 4}, rng);
  Tensor64 mask({3, 3}, 1.0);
  mask.at(0, 1) = 0.0;  // row 0 cannot see position 1

  Graph64 g1(false);
  auto a1 = masked_attention<double>(g1, g1.input(q), g1.input(k), g1.input(v), mask, {}, 1, 2);
  Tensor64 k2 = k, v2 = v;
  for (int c = 0; c < 4; ++c) {
    k2.at(1, c) += 100.0 * rng.unit();
    v2.at(1, c) -= 17.0 * rng.unit();
  }
  Graph64 g2(false);
  auto a2 = masked_attention<double>(g2, g2.input(q), g2.input(k2), g2.input(v2), mask, {}, 1, 2);
  for (int c = 0; c < 4; ++c) {
    CHECK(g1.value(a1.out).at(0, c) == g2.value(a2.out).at(0, c));
  }
  // Rows that can see position 1 must change.
  bool moved = false;
  for (int c = 0; c < 4; ++c) moved = moved || g1.value(a1.out).at(1, c) != g2.value(a2.out).at(1, c);
  CHECK(moved);
}

TEST_CASE("relative bias shares one entry beyond the clip distance") {
  Graph64 g(false);
  auto logits = g.input(Tensor64({1, 1, 10}));
  Rng rng(61);
  Tensor64 table = random_tensor({1, 5}, rng);
  auto biased = g.add_relative_bias(logits, g.input(table), 2);
  CHECK(g.value(biased).at(0, 0, 5) == table.at(0, 4));
  CHECK(g.value(biased).at(0, 0, 9) == table.at(0, 4));
  CHECK(g.value(biased).at(0, 0, 5) == g.value(biased).at(0, 0, 9));
  CHECK(g.value(biased).at(0, 0, 1) == table.at(0, 3));
}

TEST_CASE("an all-zero mask row raises an error naming the row") {
  Graph64 g;
  Rng rng(67);
  auto x = g.input(random_tensor({2, 3, 3}, rng));
  Tensor64 mask({3, 3}, 1.0);
  for (int j = 0; j < 3; ++j) mask.at(1, j) = 0.0;
  CHECK_THROWS_WITH_AS(g.masked_softmax(x, mask), doctest::Contains("row 1"), SeamError);

  Tensor64 badvals({3, 3}, 0.5);
  CHECK_THROWS_WITH_AS(g.masked_softmax(x, badvals), doctest::Contains("0 or 1"), SeamError);
}

TEST_CASE("parameter store enforces unique names and seeded bounds") {
  Rng rng(71);
  ParameterStore64 s;
  s.create("w", {9, 4}, rng);
  CHECK_THROWS_AS(s.create("w", {2}, rng), SeamError);
  const double bound = 1.0 / 3.0;  // fan-in 9
  for (double v : s.value("w").data) {
    CHECK(v <= bound);
    CHECK(v >= -bound);
  }

  Rng r1(99), r2(99);
  ParameterStore64 a, b;
  a.create("w", {4, 4}, r1);
  b.create("w", {4, 4}, r2);
  CHECK(a.value("w").data == b.value("w").data);
  CHECK(s.parameter_count() == 36);
}

TEST_CASE("sgd with momentum follows the hand-computed trajectory") {
  ParameterStore64 s;
  s.adopt("p", Tensor64::from({1}, {1.0}));
  StepSchedule sched;
  sched.base = 0.1;
  SgdMomentum<double> opt(0.5, sched);

  s.grad("p").data[0] = 2.0;
  opt.step(s);
  // v = 2, p = 1 - 0.1*2 = 0.8
  CHECK(s.value("p").at(0) == doctest::Approx(0.8).epsilon(1e-12));
  s.zero_grads();
  s.grad("p").data[0] = 1.0;
  opt.step(s);
  // v = 0.5*2 + 1 = 2, p = 0.8 - 0.1*2 = 0.6
  CHECK(s.value("p").at(0) == doctest::Approx(0.6).epsilon(1e-12));

  StepSchedule warm{1.0, 4, 0.5, 2};
  CHECK(warm.at(0) == doctest::Approx(0.25));
  CHECK(warm.at(3) == doctest::Approx(1.0));
  CHECK(warm.at(4) == doctest::Approx(1.0));
  CHECK(warm.at(6) == doctest::Approx(0.5));
  CHECK(warm.at(8) == doctest::Approx(0.25));
}

TEST_CASE("a tiny network overfits four points") {
  Rng rng(73);
  ParameterStore64 s;
  s.create("w1", {2, 16}, rng);
  s.create("b1", {16}, rng);
  s.create("w2", {16, 2}, rng);
  s.create("b2", {2}, rng);
  Tensor64 x = Tensor64::from({4, 2}, {0, 0, 0, 1, 1, 0, 1, 1});
  std::vector<int> y = {0, 1, 1, 0};
  SgdMomentum<double> opt(0.9, StepSchedule{0.1, 0, 1.0, 0});
  double first = 0, last = 0;
  for (int step = 0; step < 400; ++step) {
    s.zero_grads();
    Graph64 g;
    auto h = g.relu(g.add(g.matmul(g.input(x), g.param(s, "w1")), g.param(s, "b1")));
    auto logits = g.add(g.matmul(h, g.param(s, "w2")), g.param(s, "b2"));
    auto loss = g.cross_entropy(logits, y);
    g.backward(loss);
    opt.step(s);
    if (step == 0) first = g.value(loss).at(0);
    last = g.value(loss).at(0);
  }
  CHECK(last < 0.01);
  CHECK(last < first);
}

TEST_CASE("checkpoints reload bit-exactly with their config sidecar") {
  Rng rng(79);
  ParameterStore64 s;
  s.create("enc.w", {3, 5}, rng);
  s.create("enc.b", {5}, rng);
  s.create("dec.table", {4, 3}, rng);
  const auto path = temp_path("nnkit-ckpt");
  const std::string config = "{\"d_x\":3,\"seed\":79}";
  save_checkpoint(s, path, config);

  ParameterStore64 loaded;
  CHECK(load_checkpoint(loaded, path) == config);
  CHECK(loaded.names() == s.names());
  for (const auto& name : s.names()) {
    CHECK(loaded.value(name).shape == s.value(name).shape);
    CHECK(loaded.value(name).data == s.value(name).data);
  }

  const auto path2 = temp_path("nnkit-ckpt2");
  save_checkpoint(loaded, path2, config);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);
  CHECK(!b1.empty());

  // Width mismatch is rejected, not misread.
  ParameterStore wrong;
  CHECK_THROWS_WITH_AS(load_checkpoint(wrong, path), doctest::Contains("width"), SeamError);

  // Float stores round-trip bit-exactly too.
  Rng frng(83);
  ParameterStore fs;
  fs.create("w", {7, 7}, frng);
  const auto fpath = temp_path("nnkit-ckpt-f32");
  save_checkpoint(fs, fpath, "{}");
  ParameterStore floaded;
  load_checkpoint(floaded, fpath);
  CHECK(floaded.value("w").data == fs.value("w").data);

  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
  std::filesystem::remove(path2);
  std::filesystem::remove(path2.string() + ".json");
  std::filesystem::remove(fpath);
  std::filesystem::remove(fpath.string() + ".json");
}
