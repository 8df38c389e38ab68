#include <cstdio>
#include <functional>

#include "covpath/nn/actor.hpp"
#include "covpath/nn/checkpoint.hpp"
#include "covpath/nn/core.hpp"
#include "doctest.h"

using namespace covpath;
using namespace covpath::nn;

namespace {

template <typename S>
MatX<S> random_mat(Rng& rng, Eigen::Index r, Eigen::Index c, double lo = 0.0,
                   double hi = 1.0) {
  MatX<S> m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = static_cast<S>(rng.uniform(lo, hi));
  return m;
}

// Tiny configuration small enough for exhaustive finite differences.
NetConfig tiny_config(Arch arch, HeadKind head) {
  NetConfig c;
  c.arch = arch;
  c.head = head;
  c.scales = 2;
  c.grid_size = 16;
  c.lidar_rays = 5;
  c.conv_channels = 4;
  c.fc_units = 16;
  return c;
}

// Central-difference check of d(loss)/d(params) over every parameter.
void check_all_gradients(VecX<double>& params, const VecX<double>& analytic,
                         const std::function<double()>& loss) {
  REQUIRE(params.size() == analytic.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double p0 = params[i];
    const double h = 1e-5 * std::max(1.0, std::abs(p0));
    params[i] = p0 + h;
    const double lp = loss();
    params[i] = p0 - h;
    const double lm = loss();
    params[i] = p0;
    const double fd = (lp - lm) / (2.0 * h);
    const double rel = std::abs(analytic[i] - fd) / (std::abs(analytic[i]) + 1e-8);
    worst = std::max(worst, rel);
    if (rel >= 1e-4) {
      CAPTURE(i);
      CAPTURE(analytic[i]);
      CAPTURE(fd);
      REQUIRE(rel < 1e-4);
    }
  }
  MESSAGE("worst relative gradient error: ", worst);
}

}  // namespace

TEST_CASE("SGCNN feature chain matches the published shape arithmetic") {
  NetConfig cfg;  // defaults: SGCNN actor, m=4, 32x32, 24 rays
  SacNet<float> net(cfg, 1);
  typename SacNet<float>::Workspace ws;
  typename SacNet<float>::FusionPass fp;
  Rng rng(2, rng_stream::kInit);
  const int B = 3;
  MatX<float> maps = random_mat<float>(rng, cfg.map_inputs(), B);
  MatX<float> lidar = random_mat<float>(rng, cfg.lidar_rays, B);
  net.forward(maps, lidar, nullptr, ws, fp);

  // 3x32x32 -> 6x16x16 -> 6x14x14 -> 6x12x12 -> 6x10x10 per group.
  REQUIRE(ws.act.size() == 4);
  REQUIRE(ws.act[0].size() == 4);
  CHECK(ws.act[0][0].rows() == B * 16 * 16);
  CHECK(ws.act[1][0].rows() == B * 14 * 14);
  CHECK(ws.act[2][0].rows() == B * 12 * 12);
  CHECK(ws.act[3][0].rows() == B * 10 * 10);
  CHECK(ws.act[3][0].cols() == 6);
  CHECK(ws.flat.rows() == 2400);  // concat 4*6*10*10
  CHECK(ws.map_feat.rows() == 256);
  CHECK(fp.head.rows() == 4);
}

TEST_CASE("parameter counts land on the published budgets") {
  NetConfig sgcnn;  // mow profile: 24 lidar rays
  SacNet<float> net(sgcnn, 1);
  // Layer arithmetic: convs 4272, map FC 614656, lidar FC 600,
  // fusion 71936 + 65792, head 1028.
  const Eigen::Index convs = 4 * ((2 * 2 * 3 * 6 + 6) + 3 * (3 * 3 * 6 * 6 + 6));
  const Eigen::Index map_fc = 2400 * 256 + 256;
  const Eigen::Index lidar_fc = 24 * 24 + 24;
  const Eigen::Index fusion = (256 + 24) * 256 + 256 + 256 * 256 + 256;
  const Eigen::Index head = 256 * 4 + 4;
  CHECK(net.param_count() == convs + map_fc + lidar_fc + fusion + head);
  CHECK(net.param_count() >= 0.8e6 * 0.85);
  CHECK(net.param_count() <= 0.8e6 * 1.15);

  NetConfig mlp = sgcnn;
  mlp.arch = Arch::MLP;
  SacNet<float> mlp_net(mlp, 1);
  const Eigen::Index mlp_expected =
      (12288 + 24) * 256 + 256 + 256 * 256 + 256 + 256 * 4 + 4;
  CHECK(mlp_net.param_count() == mlp_expected);
  CHECK(mlp_net.param_count() >= 3.2e6 * 0.85);
  CHECK(mlp_net.param_count() <= 3.2e6 * 1.15);

  NetConfig cnn = sgcnn;
  cnn.arch = Arch::CNN;
  SacNet<float> cnn_net(cnn, 1);
  CHECK(cnn_net.param_count() <= 2 * net.param_count());
  CHECK(cnn_net.param_count() >= net.param_count() / 2);

  NetConfig critic = sgcnn;
  critic.head = HeadKind::Critic;
  SacNet<float> critic_net(critic, 2);
  // Critic appends the 2-dim action to the fusion input and has 1 output.
  CHECK(critic_net.param_count() ==
        convs + map_fc + lidar_fc + fusion + 2 * 256 + 256 * 1 + 1);
}

TEST_CASE("zero head gives centered actions; fixed seeds reproduce samples") {
  NetConfig cfg = tiny_config(Arch::SGCNN, HeadKind::Actor);
  SacNet<float> net(cfg, 7);
  // Zero the final layer: mean must be exactly zero.
  auto handles = net.store().handles();
  auto& names = net.store().names();
  for (size_t i = 0; i < handles.size(); ++i)
    if (names[i] == "head_w" || names[i] == "head_b")
      ParamStore<float>::view(net.params(), handles[i]).setZero();

  Rng rng(3, rng_stream::kInit);
  MatX<float> maps = random_mat<float>(rng, cfg.map_inputs(), 4);
  MatX<float> lidar = random_mat<float>(rng, cfg.lidar_rays, 4);
  typename SacNet<float>::Workspace ws;
  typename SacNet<float>::FusionPass fp;
  net.forward(maps, lidar, nullptr, ws, fp);
  CHECK(net.actor_mean(fp).cwiseAbs().maxCoeff() == 0.0f);

  MatX<float> xi = random_mat<float>(rng, 2, 4, -2.0, 2.0);
  ActorSample<float> s1 = sample_actor(net, fp, xi);
  ActorSample<float> s2 = sample_actor(net, fp, xi);
  CHECK(s1.action == s2.action);
  CHECK((s1.action.array().abs() < 1.0f).all());

  SacNet<float> twin(cfg, 7);
  for (size_t i = 0; i < handles.size(); ++i)
    if (names[i] == "head_w" || names[i] == "head_b")
      ParamStore<float>::view(twin.params(), handles[i]).setZero();
  typename SacNet<float>::Workspace ws2;
  typename SacNet<float>::FusionPass fp2;
  twin.forward(maps, lidar, nullptr, ws2, fp2);
  ActorSample<float> s3 = sample_actor(twin, fp2, xi);
  CHECK(s1.action == s3.action);
}

TEST_CASE("critics: independent seeds, zero params, extreme inputs") {
  NetConfig cfg = tiny_config(Arch::SGCNN, HeadKind::Critic);
  SacNet<float> c1(cfg, 11);
  SacNet<float> c2(cfg, 12);
  Rng rng(5, rng_stream::kInit);
  MatX<float> maps = random_mat<float>(rng, cfg.map_inputs(), 2);
  MatX<float> lidar = random_mat<float>(rng, cfg.lidar_rays, 2);
  MatX<float> action = random_mat<float>(rng, 2, 2, -1.0, 1.0);

  typename SacNet<float>::Workspace w1, w2;
  typename SacNet<float>::FusionPass f1, f2;
  c1.forward(maps, lidar, &action, w1, f1);
  c2.forward(maps, lidar, &action, w2, f2);
  CHECK(f1.head(0, 0) != f2.head(0, 0));

  c1.params().setZero();
  c1.forward(maps, lidar, &action, w1, f1);
  CHECK(f1.head(0, 0) == 0.0f);  // Q equals the (zero) head bias

  SacNet<float> c3(cfg, 13);
  MatX<float> ones = MatX<float>::Ones(cfg.map_inputs(), 2);
  MatX<float> lones = MatX<float>::Ones(cfg.lidar_rays, 2);
  MatX<float> extreme(2, 2);
  extreme << 1.0f, -1.0f, -1.0f, 1.0f;
  typename SacNet<float>::Workspace w3;
  typename SacNet<float>::FusionPass f3;
  c3.forward(ones, lones, &extreme, w3, f3);
  CHECK(std::isfinite(f3.head(0, 0)));
  CHECK(std::isfinite(f3.head(0, 1)));

  SUBCASE("one trunk evaluation serves several actions") {
    MatX<float> a2 = -extreme;
    typename SacNet<float>::FusionPass fa, fb;
    c3.forward_head(w3, &extreme, fa);
    c3.forward_head(w3, &a2, fb);
    CHECK(fa.head == f3.head);
    CHECK(fa.head != fb.head);
  }

  SUBCASE("shape mismatches are rejected") {
    MatX<float> bad = MatX<float>::Zero(cfg.map_inputs() - 1, 2);
    CHECK_THROWS_AS(c3.forward(bad, lones, &extreme, w3, f3), std::invalid_argument);
    CHECK_THROWS_AS(c3.forward(ones, lones, nullptr, w3, f3), std::invalid_argument);
  }
}

TEST_CASE("SGCNN group independence: scales do not cross-talk before fusion") {
  NetConfig cfg;  // full-size SGCNN actor
  SacNet<float> net(cfg, 21);
  Rng rng(9, rng_stream::kInit);
  MatX<float> maps = random_mat<float>(rng, cfg.map_inputs(), 2);
  MatX<float> lidar = random_mat<float>(rng, cfg.lidar_rays, 2);

  typename SacNet<float>::Workspace ws;
  typename SacNet<float>::FusionPass fp;
  net.forward(maps, lidar, nullptr, ws, fp);
  MatX<float> group0 = ws.act[3][0];

  // Perturb every channel belonging to scale 2 (kind-major layout).
  const int g2 = cfg.grid_size * cfg.grid_size;
  MatX<float> perturbed = maps;
  for (int kind = 0; kind < 3; ++kind)
    perturbed.middleRows((kind * cfg.scales + 1) * g2, g2).setConstant(0.77f);
  net.forward(perturbed, lidar, nullptr, ws, fp);
  CHECK(ws.act[3][0] == group0);
  CHECK(ws.act[3][1] != MatX<float>(group0));
}

TEST_CASE("critic gradient check (SGCNN, CNN, MLP) against finite differences") {
  for (Arch arch : {Arch::SGCNN, Arch::CNN, Arch::MLP}) {
    CAPTURE(static_cast<int>(arch));
    NetConfig cfg = tiny_config(arch, HeadKind::Critic);
    SacNet<double> net(cfg, 31 + static_cast<int>(arch));
    REQUIRE(net.param_count() <= 400000);

    Rng rng(41, rng_stream::kInit);
    const int B = 3;
    MatX<double> maps = random_mat<double>(rng, cfg.map_inputs(), B);
    MatX<double> lidar = random_mat<double>(rng, cfg.lidar_rays, B);
    MatX<double> action = random_mat<double>(rng, 2, B, -0.9, 0.9);
    VecX<double> y = random_mat<double>(rng, B, 1, -1.0, 1.0);

    typename SacNet<double>::Workspace ws;
    typename SacNet<double>::FusionPass fp;
    auto loss = [&]() {
      net.forward(maps, lidar, &action, ws, fp);
      const auto q = fp.head.row(0).transpose();
      return (q - y).squaredNorm() / B;
    };

    const double base = loss();
    (void)base;
    VecX<double> grads = VecX<double>::Zero(net.param_count());
    MatX<double> dq = (2.0 / B) * (fp.head.row(0).transpose() - y).transpose();
    net.backward(ws, fp, dq, &grads);
    check_all_gradients(net.params(), grads, loss);

    // Linearity: gradients of a*L1 + b*L2.
    VecX<double> y2 = random_mat<double>(rng, B, 1, -1.0, 1.0);
    VecX<double> g1 = VecX<double>::Zero(net.param_count());
    VecX<double> g2 = VecX<double>::Zero(net.param_count());
    loss();
    net.backward(ws, fp, dq, &g1);
    MatX<double> dq2 = (2.0 / B) * (fp.head.row(0).transpose() - y2).transpose();
    net.backward(ws, fp, dq2, &g2);
    VecX<double> combined = VecX<double>::Zero(net.param_count());
    MatX<double> dq_combined = 0.3 * dq + 0.7 * dq2;
    net.backward(ws, fp, dq_combined, &combined);
    CHECK((combined - (0.3 * g1 + 0.7 * g2)).cwiseAbs().maxCoeff() < 1e-9);

    // A constant loss has zero gradient everywhere.
    VecX<double> gz = VecX<double>::Zero(net.param_count());
    MatX<double> zero_dq = MatX<double>::Zero(1, B);
    net.backward(ws, fp, zero_dq, &gz);
    CHECK(gz.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("actor loss gradient check through tanh, log-prob and twin critics") {
  NetConfig acfg = tiny_config(Arch::SGCNN, HeadKind::Actor);
  NetConfig ccfg = tiny_config(Arch::SGCNN, HeadKind::Critic);
  SacNet<double> actor(acfg, 51);
  SacNet<double> q1(ccfg, 52);
  SacNet<double> q2(ccfg, 53);

  Rng rng(61, rng_stream::kInit);
  const int B = 4;
  MatX<double> maps = random_mat<double>(rng, acfg.map_inputs(), B);
  MatX<double> lidar = random_mat<double>(rng, acfg.lidar_rays, B);
  MatX<double> xi = random_mat<double>(rng, 2, B, -1.5, 1.5);
  const double alpha = 0.37;

  typename SacNet<double>::Workspace aws, w1, w2;
  typename SacNet<double>::FusionPass afp, f1, f2;
  auto loss = [&]() {
    actor.forward(maps, lidar, nullptr, aws, afp);
    ActorSample<double> s = sample_actor(actor, afp, xi);
    q1.forward(maps, lidar, &s.action, w1, f1);
    q2.forward(maps, lidar, &s.action, w2, f2);
    double total = 0.0;
    for (int i = 0; i < B; ++i)
      total += alpha * s.log_prob[i] - std::min(f1.head(0, i), f2.head(0, i));
    return total / B;
  };

  loss();
  ActorSample<double> s = sample_actor(actor, afp, xi);

  // d(loss)/d(action) flows through whichever critic is the minimum.
  MatX<double> d_action = MatX<double>::Zero(2, B);
  MatX<double> dq1 = MatX<double>::Zero(1, B), dq2 = MatX<double>::Zero(1, B);
  for (int i = 0; i < B; ++i)
    (f1.head(0, i) <= f2.head(0, i) ? dq1(0, i) : dq2(0, i)) = -1.0 / B;
  MatX<double> da1, da2;
  q1.backward(w1, f1, dq1, nullptr, &da1);
  q2.backward(w2, f2, dq2, nullptr, &da2);
  d_action = da1 + da2;

  VecX<double> d_logp = VecX<double>::Constant(B, alpha / B);
  MatX<double> ghead = actor_head_grad(actor, afp, s, d_action, d_logp);
  VecX<double> grads = VecX<double>::Zero(actor.param_count());
  actor.backward(aws, afp, ghead, &grads);
  check_all_gradients(actor.params(), grads, loss);
}

TEST_CASE("critic input-gradient path matches finite differences on the action") {
  NetConfig cfg = tiny_config(Arch::SGCNN, HeadKind::Critic);
  SacNet<double> net(cfg, 71);
  Rng rng(81, rng_stream::kInit);
  const int B = 3;
  MatX<double> maps = random_mat<double>(rng, cfg.map_inputs(), B);
  MatX<double> lidar = random_mat<double>(rng, cfg.lidar_rays, B);
  MatX<double> action = random_mat<double>(rng, 2, B, -0.9, 0.9);

  typename SacNet<double>::Workspace ws;
  typename SacNet<double>::FusionPass fp;
  auto loss = [&]() {
    net.forward(maps, lidar, &action, ws, fp);
    return fp.head.row(0).sum();
  };
  loss();
  MatX<double> dq = MatX<double>::Ones(1, B);
  MatX<double> d_action;
  net.backward(ws, fp, dq, nullptr, &d_action);

  for (int i = 0; i < B; ++i)
    for (int j = 0; j < 2; ++j) {
      const double a0 = action(j, i);
      const double h = 1e-6;
      action(j, i) = a0 + h;
      const double lp = loss();
      action(j, i) = a0 - h;
      const double lm = loss();
      action(j, i) = a0;
      const double fd = (lp - lm) / (2 * h);
      REQUIRE(std::abs(d_action(j, i) - fd) / (std::abs(fd) + 1e-8) < 1e-4);
    }
}

TEST_CASE("adam: zero gradient is a fixed point, first step has lr magnitude") {
  VecX<float> params = VecX<float>::Constant(10, 1.5f);
  AdamState<float> state(10);
  VecX<float> zero = VecX<float>::Zero(10);
  adam_step(params, zero, state, 1e-3);
  CHECK((params.array() == 1.5f).all());

  VecX<float> g = VecX<float>::Constant(10, 0.25f);
  VecX<float> before = params;
  AdamState<float> fresh(10);
  adam_step(params, g, fresh, 1e-3);
  // On the very first step the bias-corrected moments give ~lr * sign(g).
  CHECK(((before - params).array() > 0.99e-3f).all());
  CHECK(((before - params).array() < 1.01e-3f).all());

  SUBCASE("deterministic given the same state") {
    VecX<float> p2 = before;
    AdamState<float> s2(10);
    adam_step(p2, g, s2, 1e-3);
    CHECK(p2 == params);
  }
}

TEST_CASE("checkpoint: save, load, forward bit-identical") {
  NetConfig cfg = tiny_config(Arch::SGCNN, HeadKind::Actor);
  SacNet<float> net(cfg, 91);
  const std::string path = "test_checkpoint.bin";
  save_checkpoint(path, net, "actor", 1234);

  CheckpointHeader header;
  SacNet<float> loaded = load_checkpoint(path, &header);
  CHECK(header.step == 1234);
  CHECK(header.kind == "actor");
  CHECK(loaded.param_count() == net.param_count());
  CHECK(loaded.params() == net.params());

  Rng rng(7, rng_stream::kInit);
  MatX<float> maps = random_mat<float>(rng, cfg.map_inputs(), 2);
  MatX<float> lidar = random_mat<float>(rng, cfg.lidar_rays, 2);
  typename SacNet<float>::Workspace wa, wb;
  typename SacNet<float>::FusionPass fa, fb;
  net.forward(maps, lidar, nullptr, wa, fa);
  loaded.forward(maps, lidar, nullptr, wb, fb);
  CHECK(fa.head == fb.head);
  std::remove(path.c_str());
}
