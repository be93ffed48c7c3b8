#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmlab/core/errors.hpp"
#include "cmlab/core/rng.hpp"
#include "cmlab/nn/mlp.hpp"
#include "cmlab/ref/reference.hpp"

using namespace cmlab;

namespace {

MlpConfig small_cfg(int dim = 2) {
  MlpConfig cfg;
  cfg.input_dim = dim;
  cfg.hidden = {16, 16};
  cfg.time_embed_dim = 8;
  return cfg;
}

Vec random_vec(RandomStream& rng, int n, double scale = 1.0) {
  Vec v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

// Central-difference gradient of loss(theta) = ||F(x, t)||^2.
Vec fd_gradient(const MlpNet& net, VecView x, double t, double h = 1e-6) {
  Vec probe(net.params().values);
  Vec grad(probe.size());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double keep = probe[i];
    probe[i] = keep + h;
    Vec yp = net.forward_with(probe, x, t);
    probe[i] = keep - h;
    Vec ym = net.forward_with(probe, x, t);
    probe[i] = keep;
    grad[i] = (dot(yp, yp) - dot(ym, ym)) / (2.0 * h);
  }
  return grad;
}

}  // namespace

TEST_CASE("forward: zero weights give zero output") {
  MlpNet net(small_cfg());
  RandomStream rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    const Vec x = random_vec(rng, 2, 3.0);
    const Vec y = net.forward(x, 1.5);
    for (double v : y) CHECK(v == 0.0);
  }
}

TEST_CASE("forward: single affine layer with identity block is the identity") {
  MlpConfig cfg;
  cfg.input_dim = 3;
  cfg.hidden = {};
  cfg.time_embed_dim = 4;
  MlpNet net(cfg);
  // w_out is 3 x (3 + 4); set the x block to the identity.
  auto w = net.params().slice(0);
  for (int r = 0; r < 3; ++r) w[r * cfg.joint_dim() + r] = 1.0;

  RandomStream rng(4);
  const Vec x = random_vec(rng, 3, 2.0);
  const Vec y = net.forward(x, 0.7);
  for (int i = 0; i < 3; ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("forward: matches the straight-line reference evaluation") {
  for (std::uint64_t seed : {1u, 7u, 42u}) {
    MlpNet net(small_cfg(3));
    net.init_dense(seed);
    RandomStream rng(seed + 100);
    for (int rep = 0; rep < 10; ++rep) {
      const Vec x = random_vec(rng, 3, 2.0);
      const double t = 0.002 + 79.0 * rng.uniform();
      const Vec a = net.forward(x, t);
      const Vec b = ref::forward(net.config(), net.params().values, x, t);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward: deterministic and bit-stable") {
  MlpNet net(small_cfg());
  net.init_dense(9);
  const Vec x{0.4, -1.2};
  const Vec a = net.forward(x, 3.0);
  const Vec b = net.forward(x, 3.0);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("forward: dimension mismatch is an input error") {
  MlpNet net(small_cfg(2));
  CHECK_THROWS_AS(net.forward(Vec{1.0, 2.0, 3.0}, 1.0), input_error);
  CHECK_THROWS_AS(net.forward(Vec{1.0, 2.0}, -1.0), input_error);
}

TEST_CASE("grad_params: zero-weight net has zero gradient everywhere fed by zero activations") {
  MlpNet net(small_cfg());
  const std::pair<Vec, double> pt{{0.5, -0.25}, 2.0};
  Vec grad;
  const double loss =
      grad_params(net, net.params().values, std::span(&pt, 1),
                  [](VecView y, std::size_t) {
                    Vec dy(y.size());
                    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 2.0 * y[i];
                    return std::make_pair(dot(y, y), dy);
                  },
                  grad);
  CHECK(loss == 0.0);
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("grad_params: matches central finite differences") {
  for (std::uint64_t seed : {2u, 11u, 23u}) {
    MlpNet net(small_cfg());
    net.init_dense(seed);
    RandomStream rng(seed);
    const std::pair<Vec, double> pt{random_vec(rng, 2, 1.5), 0.01 + 5.0 * rng.uniform()};

    Vec grad;
    grad_params(net, net.params().values, std::span(&pt, 1),
                [](VecView y, std::size_t) {
                  Vec dy(y.size());
                  for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 2.0 * y[i];
                  return std::make_pair(dot(y, y), dy);
                },
                grad);
    const Vec fd = fd_gradient(net, pt.first, pt.second);
    for (std::size_t i = 0; i < grad.size(); ++i) {
      if (std::fabs(grad[i]) > 1e-8) {
        CHECK(std::fabs(grad[i] - fd[i]) / std::fabs(grad[i]) < 1e-4);
      }
    }
  }
}

TEST_CASE("grad_params: doubling the loss doubles the gradient exactly") {
  MlpNet net(small_cfg());
  net.init_dense(5);
  const std::pair<Vec, double> pt{{0.3, 0.9}, 1.1};
  Vec g1, g2;
  grad_params(net, net.params().values, std::span(&pt, 1),
              [](VecView y, std::size_t) {
                Vec dy(y.size());
                for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 2.0 * y[i];
                return std::make_pair(dot(y, y), dy);
              },
              g1);
  grad_params(net, net.params().values, std::span(&pt, 1),
              [](VecView y, std::size_t) {
                Vec dy(y.size());
                for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 4.0 * y[i];
                return std::make_pair(2.0 * dot(y, y), dy);
              },
              g2);
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == 2.0 * g1[i]);
}

TEST_CASE("jvp: zero tangents give zero output") {
  MlpNet net(small_cfg());
  net.init_dense(8);
  const Vec x{1.0, -2.0};
  const Vec v = net.jvp_xt(net.params().values, x, 2.5, Vec{0.0, 0.0}, 0.0);
  for (double w : v) CHECK(w == 0.0);
}

TEST_CASE("jvp: matches central differences over joint (x, t)") {
  for (std::uint64_t seed : {3u, 13u, 31u}) {
    MlpNet net(small_cfg());
    net.init_dense(seed);
    RandomStream rng(seed + 50);
    const Vec x = random_vec(rng, 2, 1.0);
    const double t = 0.5 + 3.0 * rng.uniform();
    const Vec vx = random_vec(rng, 2, 1.0);
    const double vt = rng.normal();

    const Vec jvp = net.jvp_xt(net.params().values, x, t, vx, vt);

    const double h = 1e-4;
    Vec xp = x, xm = x;
    axpy(h, vx, xp);
    axpy(-h, vx, xm);
    const Vec yp = net.forward(xp, t + h * vt);
    const Vec ym = net.forward(xm, t - h * vt);
    for (std::size_t i = 0; i < jvp.size(); ++i) {
      const double fd = (yp[i] - ym[i]) / (2.0 * h);
      const double scale = std::max(std::fabs(jvp[i]), 1e-8);
      CHECK(std::fabs(jvp[i] - fd) / scale < 1e-4);
    }
  }
}

TEST_CASE("jvp: single affine layer equals weight block times vx exactly") {
  MlpConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {};
  cfg.time_embed_dim = 4;
  MlpNet net(cfg);
  RandomStream rng(21);
  auto w = net.params().slice(0);
  for (double& v : w) v = rng.normal();

  const Vec x{0.3, -0.8};
  const Vec vx{1.7, 0.4};
  const Vec jvp = net.jvp_xt(net.params().values, x, 1.9, vx, 0.0);
  for (int r = 0; r < 2; ++r) {
    const double expect = w[r * cfg.joint_dim() + 0] * vx[0] + w[r * cfg.joint_dim() + 1] * vx[1];
    CHECK(jvp[r] == expect);
  }
}

TEST_CASE("jvp: linear in the tangents to machine precision") {
  MlpNet net(small_cfg());
  net.init_dense(17);
  RandomStream rng(99);
  const Vec x = random_vec(rng, 2, 1.0);
  const double t = 2.2;
  const Vec u = random_vec(rng, 2, 1.0);
  const Vec w = random_vec(rng, 2, 1.0);
  const double ut = rng.normal(), wt = rng.normal();
  const double a = 1.3, b = -0.6;

  Vec combo(2);
  for (int i = 0; i < 2; ++i) combo[i] = a * u[i] + b * w[i];
  const Vec lhs = net.jvp_xt(net.params().values, x, t, combo, a * ut + b * wt);
  const Vec ju = net.jvp_xt(net.params().values, x, t, u, ut);
  const Vec jw = net.jvp_xt(net.params().values, x, t, w, wt);
  for (int i = 0; i < 2; ++i)
    CHECK(lhs[i] == doctest::Approx(a * ju[i] + b * jw[i]).epsilon(1e-12));
}

TEST_CASE("param vector: layout validation") {
  MlpNet net(small_cfg());
  ParamVector pv = net.params();
  CHECK_NOTHROW(pv.validate());
  pv.values.pop_back();
  CHECK_THROWS_AS(pv.validate(), input_error);
}
