#pragma once

#include "covpath/nn/network.hpp"

namespace covpath::nn {

// Reparameterized tanh-Gaussian policy sample for one batch.
template <typename S>
struct ActorSample {
  MatX<S> mean;     // 2 x B
  MatX<S> log_std;  // 2 x B, clamped
  MatX<S> u;        // pre-squash sample
  MatX<S> action;   // tanh(u), strictly inside (-1, 1)
  VecX<S> log_prob; // length B, includes the tanh change of variables
};

inline constexpr double kTanhEps = 1e-6;

template <typename S>
ActorSample<S> sample_actor(const SacNet<S>& net,
                            const typename SacNet<S>::FusionPass& fp,
                            const MatX<S>& xi) {
  ActorSample<S> out;
  out.mean = net.actor_mean(fp);
  out.log_std = net.actor_log_std(fp);
  const MatX<S> std = out.log_std.array().exp().matrix();
  out.u = out.mean + std.cwiseProduct(xi);
  out.action = out.u.array().tanh().matrix();

  const Eigen::Index batch = out.mean.cols();
  out.log_prob = VecX<S>::Zero(batch);
  const S log_2pi = static_cast<S>(std::log(2.0 * M_PI));
  const S eps = static_cast<S>(kTanhEps);
  for (Eigen::Index i = 0; i < batch; ++i) {
    S lp{0};
    for (int j = 0; j < 2; ++j) {
      const S z = xi(j, i);
      const S a = out.action(j, i);
      lp += S{-0.5} * z * z - out.log_std(j, i) - S{0.5} * log_2pi;
      lp -= std::log(S{1} - a * a + eps);
    }
    out.log_prob[i] = lp;
  }
  return out;
}

// Converts d(loss)/d(action) and d(loss)/d(log_prob) into the gradient at
// the raw actor head (4 x B: mean rows then log_std rows). Coordinates
// outside the log_std clamp window receive zero gradient.
template <typename S>
MatX<S> actor_head_grad(const SacNet<S>& net,
                        const typename SacNet<S>::FusionPass& fp,
                        const ActorSample<S>& sample, const MatX<S>& d_action,
                        const VecX<S>& d_log_prob) {
  const NetConfig& cfg = net.config();
  const Eigen::Index batch = sample.mean.cols();
  const MatX<S> raw = net.actor_log_std_raw(fp);
  const S eps = static_cast<S>(kTanhEps);

  MatX<S> ghead = MatX<S>::Zero(4, batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    for (int j = 0; j < 2; ++j) {
      const S a = sample.action(j, i);
      const S t = S{1} - a * a;           // tanh'
      const S denom = t + eps;
      // d log_prob / du through the squash correction term.
      const S dlp_du = S{2} * a * t / denom;
      const S du = d_action(j, i) * t + d_log_prob[i] * dlp_du;
      ghead(j, i) = du;

      const S sigma_xi = sample.u(j, i) - sample.mean(j, i);  // sigma * xi
      S dls = du * sigma_xi - d_log_prob[i];
      const bool clamped = raw(2 + j, i) <= static_cast<S>(cfg.log_std_min) ||
                           raw(2 + j, i) >= static_cast<S>(cfg.log_std_max);
      ghead(2 + j, i) = clamped ? S{0} : dls;
    }
  }
  return ghead;
}

template <typename S>
MatX<S> deterministic_action(const SacNet<S>& net,
                             const typename SacNet<S>::FusionPass& fp) {
  return net.actor_mean(fp).array().tanh().matrix();
}

}  // namespace covpath::nn
