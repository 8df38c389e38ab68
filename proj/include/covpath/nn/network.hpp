#pragma once

#include <cmath>

#include "covpath/nn/core.hpp"

namespace covpath::nn {

enum class Arch { MLP, CNN, SGCNN };
enum class HeadKind { Actor, Critic };

inline const char* to_string(Arch a) {
  switch (a) {
    case Arch::MLP: return "mlp";
    case Arch::CNN: return "cnn";
    default: return "sgcnn";
  }
}
inline Arch arch_from_string(const std::string& s) {
  if (s == "mlp") return Arch::MLP;
  if (s == "cnn") return Arch::CNN;
  if (s == "sgcnn") return Arch::SGCNN;
  throw std::invalid_argument("unknown architecture: " + s);
}

struct NetConfig {
  Arch arch = Arch::SGCNN;
  HeadKind head = HeadKind::Actor;
  int scales = 4;
  int grid_size = 32;
  int lidar_rays = 24;
  int conv_channels = 24;  // total across all groups
  int fc_units = 256;
  bool frontier_channel = true;
  double log_std_min = -20.0;
  double log_std_max = 2.0;
  double log_std_bias = -1.0;

  int map_kinds() const { return frontier_channel ? 3 : 2; }
  int map_channels() const { return map_kinds() * scales; }
  int map_inputs() const { return map_channels() * grid_size * grid_size; }
  int action_dim() const { return 2; }
  int head_outputs() const { return head == HeadKind::Actor ? 4 : 1; }
};

// Actor / critic network: a map feature extractor (grouped convolutions for
// SGCNN, one conv stack for CNN, flatten for MLP), a lidar extractor, a
// two-layer fusion module and a linear head. The critic's action joins at
// the fusion input, so one trunk evaluation can serve several actions.
// ReLU activations throughout.
//
// Conv activations live in GEMM layout: per group a (batch*out_pixels) x
// channels matrix, which keeps every layer a single matrix product per
// group without scatter passes.
template <typename S>
class SacNet {
 public:
  struct ConvLayer {
    int k = 3;
    int stride = 1;
    int cin = 0, cout = 0;  // per group
    int in_h = 0, in_w = 0, out_h = 0, out_w = 0;
    std::vector<ParamHandle> w;  // per group, (cin*k*k) x cout
    std::vector<ParamHandle> b;  // per group, 1 x cout
    Eigen::Index out_pixels() const {
      return static_cast<Eigen::Index>(out_h) * out_w;
    }
    Eigen::Index in_pixels() const {
      return static_cast<Eigen::Index>(in_h) * in_w;
    }
    int patch() const { return cin * k * k; }
  };

  // Trunk state: everything derived from (maps, lidar) alone.
  struct Workspace {
    std::vector<std::vector<MatX<S>>> act;  // [layer][group], post-ReLU
    std::vector<std::vector<MatX<S>>> cols; // cached im2col, [layer][group]
    MatX<S> flat;                           // conv features as (flat x B)
    MatX<S> map_feat;                       // post-ReLU map FC output
    MatX<S> lidar_feat;                     // post-ReLU lidar FC output
    bool cols_cached = false;
    const MatX<S>* maps = nullptr;          // borrowed inputs
    const MatX<S>* lidar = nullptr;
    // scratch
    MatX<S> col_scratch, gy, gcol, gflat, gin_a, gin_b;
    std::vector<std::vector<MatX<S>>> gact;
  };

  // One head evaluation on top of a trunk (critics may run several).
  struct FusionPass {
    MatX<S> fusion_in;
    MatX<S> fc1, fc2;  // post-ReLU
    MatX<S> head;      // raw head output
    const MatX<S>* action = nullptr;
    MatX<S> g1, g2, gin;  // scratch
  };

  SacNet(const NetConfig& config, std::uint64_t seed) : cfg_(config) {
    if (cfg_.arch != Arch::MLP && cfg_.grid_size < 16)
      throw std::invalid_argument("conv architectures need grid_size >= 16");
    build();
    Rng rng(seed, rng_stream::kInit);
    store_.init_fan_in(rng);
    if (cfg_.head == HeadKind::Actor) {
      // Bias the pre-clamp log_std so fresh policies explore moderately.
      auto b = ParamStore<S>::view(store_.values(), head_.b);
      b(2, 0) = static_cast<S>(cfg_.log_std_bias);
      b(3, 0) = static_cast<S>(cfg_.log_std_bias);
    }
  }

  const NetConfig& config() const { return cfg_; }
  Eigen::Index param_count() const { return store_.size(); }
  VecX<S>& params() { return store_.values(); }
  const VecX<S>& params() const { return store_.values(); }
  const ParamStore<S>& store() const { return store_; }
  const std::vector<ConvLayer>& conv_layers() const { return convs_; }
  int groups() const { return groups_; }

  void forward_trunk(const MatX<S>& maps, const MatX<S>& lidar, Workspace& ws,
                     bool cache_cols = true) const {
    const Eigen::Index batch = maps.cols();
    if (maps.rows() != cfg_.map_inputs())
      throw std::invalid_argument("SacNet: map input shape mismatch");
    if (lidar.rows() != cfg_.lidar_rays || lidar.cols() != batch)
      throw std::invalid_argument("SacNet: lidar input shape mismatch");
    ws.maps = &maps;
    ws.lidar = &lidar;
    ws.cols_cached = cache_cols;
    if (cfg_.arch == Arch::MLP) return;  // identity extractors

    ws.act.resize(convs_.size());
    ws.cols.resize(convs_.size());
    for (std::size_t li = 0; li < convs_.size(); ++li) {
      const ConvLayer& layer = convs_[li];
      ws.act[li].resize(groups_);
      ws.cols[li].resize(groups_);
      for (int gr = 0; gr < groups_; ++gr) {
        MatX<S>& col = cache_cols ? ws.cols[li][gr] : ws.col_scratch;
        im2col(static_cast<int>(li), gr, ws, col);
        auto w = ParamStore<S>::view(store_.values(), layer.w[gr]);
        auto b = ParamStore<S>::view(store_.values(), layer.b[gr]);
        MatX<S>& out = ws.act[li][gr];
        out.noalias() = col * w;
        out.rowwise() += b.row(0);
        out = out.cwiseMax(S{0});
      }
    }

    // Flatten to (groups * cout * out_pixels) x batch for the map FC.
    const ConvLayer& last = convs_.back();
    const Eigen::Index ohw = last.out_pixels();
    ws.flat.resize(static_cast<Eigen::Index>(groups_) * last.cout * ohw, batch);
    for (int gr = 0; gr < groups_; ++gr) {
      const MatX<S>& a = ws.act.back()[gr];
      for (int c = 0; c < last.cout; ++c)
        for (Eigen::Index i = 0; i < batch; ++i)
          ws.flat.col(i).segment((gr * last.cout + c) * ohw, ohw) =
              a.col(c).segment(i * ohw, ohw);
    }
    fc_forward(map_fc_, ws.flat, ws.map_feat, /*relu=*/true);
    fc_forward(lidar_fc_, lidar, ws.lidar_feat, /*relu=*/true);
  }

  // Head evaluation; `action` must be non-null iff this is a critic.
  void forward_head(Workspace& ws, const MatX<S>* action, FusionPass& fp) const {
    if ((cfg_.head == HeadKind::Critic) != (action != nullptr))
      throw std::invalid_argument("SacNet: action presence mismatch");
    const MatX<S>& mf = cfg_.arch == Arch::MLP ? *ws.maps : ws.map_feat;
    const MatX<S>& lf = cfg_.arch == Arch::MLP ? *ws.lidar : ws.lidar_feat;
    const Eigen::Index batch = mf.cols();
    if (action && (action->rows() != cfg_.action_dim() || action->cols() != batch))
      throw std::invalid_argument("SacNet: action shape mismatch");
    fp.action = action;
    const Eigen::Index d = mf.rows() + lf.rows() + (action ? action->rows() : 0);
    fp.fusion_in.resize(d, batch);
    fp.fusion_in.topRows(mf.rows()) = mf;
    fp.fusion_in.middleRows(mf.rows(), lf.rows()) = lf;
    if (action) fp.fusion_in.bottomRows(action->rows()) = *action;
    fc_forward(fc1_, fp.fusion_in, fp.fc1, /*relu=*/true);
    fc_forward(fc2_, fp.fc1, fp.fc2, /*relu=*/true);
    fc_forward(head_, fp.fc2, fp.head, /*relu=*/false);
  }

  void forward(const MatX<S>& maps, const MatX<S>& lidar, const MatX<S>* action,
               Workspace& ws, FusionPass& fp, bool cache_cols = true) const {
    forward_trunk(maps, lidar, ws, cache_cols);
    forward_head(ws, action, fp);
  }

  // Backpropagates d(loss)/d(head output) for one fusion pass. With `grads`
  // given, parameter gradients accumulate into it (requires cached cols).
  // With `d_action` given, the gradient w.r.t. the action input is emitted;
  // when grads == nullptr the walk stops at the fusion input, skipping the
  // trunk entirely.
  void backward(Workspace& ws, FusionPass& fp, const MatX<S>& ghead,
                VecX<S>* grads, MatX<S>* d_action = nullptr) const {
    fc_backward(head_, fp.fc2, fp.head, ghead, grads, &fp.g2, /*relu=*/false);
    fc_backward(fc2_, fp.fc1, fp.fc2, fp.g2, grads, &fp.g1, /*relu=*/true);
    fc_backward(fc1_, fp.fusion_in, fp.fc1, fp.g1, grads, &fp.gin, /*relu=*/true);
    if (d_action) *d_action = fp.gin.bottomRows(cfg_.action_dim());
    if (!grads) return;
    if (cfg_.arch == Arch::MLP) return;  // identity extractors
    if (!ws.cols_cached)
      throw std::logic_error("SacNet::backward: trunk was run without col cache");

    const Eigen::Index mf_rows = ws.map_feat.rows();
    const Eigen::Index lf_rows = ws.lidar_feat.rows();
    ws.gin_a = fp.gin.middleRows(mf_rows, lf_rows);
    fc_backward(lidar_fc_, *ws.lidar, ws.lidar_feat, ws.gin_a, grads, nullptr,
                /*relu=*/true);
    ws.gin_b = fp.gin.topRows(mf_rows);
    fc_backward(map_fc_, ws.flat, ws.map_feat, ws.gin_b, grads, &ws.gflat,
                /*relu=*/true);

    // Unflatten the map-FC input gradient into per-group GEMM layout.
    const ConvLayer& last = convs_.back();
    const Eigen::Index ohw = last.out_pixels();
    const Eigen::Index batch = ws.gflat.cols();
    ws.gact.resize(convs_.size());
    for (std::size_t li = 0; li < convs_.size(); ++li) ws.gact[li].resize(groups_);
    for (int gr = 0; gr < groups_; ++gr) {
      MatX<S>& g = ws.gact.back()[gr];
      g.resize(batch * ohw, last.cout);
      for (int c = 0; c < last.cout; ++c)
        for (Eigen::Index i = 0; i < batch; ++i)
          g.col(c).segment(i * ohw, ohw) =
              ws.gflat.col(i).segment((gr * last.cout + c) * ohw, ohw);
    }

    for (int li = static_cast<int>(convs_.size()) - 1; li >= 0; --li) {
      const ConvLayer& layer = convs_[li];
      const bool need_input_grad = li > 0;
      if (need_input_grad)
        for (int gr = 0; gr < groups_; ++gr)
          ws.gact[li - 1][gr].setZero(convs_[li - 1].out_pixels() * batch,
                                      convs_[li - 1].cout);
      for (int gr = 0; gr < groups_; ++gr) {
        // ReLU gate against the stored post-activation.
        ws.gy = (ws.act[li][gr].array() > S{0})
                    .select(ws.gact[li][gr], MatX<S>::Zero(ws.gact[li][gr].rows(),
                                                           ws.gact[li][gr].cols()));
        auto dw = ParamStore<S>::view(*grads, layer.w[gr]);
        auto db = ParamStore<S>::view(*grads, layer.b[gr]);
        dw.noalias() += ws.cols[li][gr].transpose() * ws.gy;
        db.row(0) += ws.gy.colwise().sum();
        if (need_input_grad) {
          auto w = ParamStore<S>::view(store_.values(), layer.w[gr]);
          ws.gcol.noalias() = ws.gy * w.transpose();
          col2im_add(static_cast<int>(li), ws.gcol, ws.gact[li - 1][gr]);
        }
      }
    }
  }

  // Actor head views (after forward): rows 0-1 mean, rows 2-3 raw log_std.
  MatX<S> actor_mean(const FusionPass& fp) const { return fp.head.topRows(2); }
  MatX<S> actor_log_std(const FusionPass& fp) const {
    return fp.head.bottomRows(2)
        .cwiseMax(static_cast<S>(cfg_.log_std_min))
        .cwiseMin(static_cast<S>(cfg_.log_std_max));
  }
  MatX<S> actor_log_std_raw(const FusionPass& fp) const {
    return fp.head.bottomRows(2);
  }

 private:
  struct FcLayer {
    ParamHandle w;  // out x in
    ParamHandle b;  // out x 1
  };

  void build() {
    const int g = cfg_.grid_size;
    if (cfg_.arch != Arch::MLP) {
      const int groups = cfg_.arch == Arch::SGCNN ? cfg_.scales : 1;
      const int cout = std::max(1, cfg_.conv_channels / groups);
      const int cin0 =
          cfg_.arch == Arch::SGCNN ? cfg_.map_kinds() : cfg_.map_channels();
      groups_ = groups;
      int h = g;
      int cin = cin0;
      for (int li = 0; li < 4; ++li) {
        ConvLayer layer;
        layer.k = li == 0 ? 2 : 3;
        layer.stride = li == 0 ? 2 : 1;
        layer.cin = cin;
        layer.cout = cout;
        layer.in_h = layer.in_w = h;
        layer.out_h = layer.out_w = (h - layer.k) / layer.stride + 1;
        for (int gr = 0; gr < groups; ++gr) {
          const std::string tag = std::to_string(li) + "_" + std::to_string(gr);
          layer.w.push_back(store_.add("conv" + tag + "_w", layer.patch(), cout));
          layer.b.push_back(store_.add("conv" + tag + "_b", 1, cout));
        }
        convs_.push_back(layer);
        h = layer.out_h;
        cin = cout;
      }
      const Eigen::Index flat = static_cast<Eigen::Index>(groups) * cout * h * h;
      map_fc_ = {store_.add("map_fc_w", cfg_.fc_units, flat),
                 store_.add("map_fc_b", cfg_.fc_units, 1)};
      lidar_fc_ = {store_.add("lidar_fc_w", cfg_.lidar_rays, cfg_.lidar_rays),
                   store_.add("lidar_fc_b", cfg_.lidar_rays, 1)};
    }

    Eigen::Index fusion_in = cfg_.arch == Arch::MLP
                                 ? cfg_.map_inputs() + cfg_.lidar_rays
                                 : cfg_.fc_units + cfg_.lidar_rays;
    if (cfg_.head == HeadKind::Critic) fusion_in += cfg_.action_dim();
    fc1_ = {store_.add("fusion1_w", cfg_.fc_units, fusion_in),
            store_.add("fusion1_b", cfg_.fc_units, 1)};
    fc2_ = {store_.add("fusion2_w", cfg_.fc_units, cfg_.fc_units),
            store_.add("fusion2_b", cfg_.fc_units, 1)};
    head_ = {store_.add("head_w", cfg_.head_outputs(), cfg_.fc_units),
             store_.add("head_b", cfg_.head_outputs(), 1)};
  }

  // Feature offset of input channel `c` of group `gr` in the kind-major
  // observation layout (layer 0 only).
  Eigen::Index obs_channel_offset(int gr, int c) const {
    const int g2 = cfg_.grid_size * cfg_.grid_size;
    if (cfg_.arch == Arch::SGCNN)
      return static_cast<Eigen::Index>(c * cfg_.scales + gr) * g2;
    return static_cast<Eigen::Index>(c) * g2;
  }

  void im2col(int li, int gr, const Workspace& ws, MatX<S>& col) const {
    const ConvLayer& layer = convs_[li];
    const Eigen::Index batch = ws.maps->cols();
    const Eigen::Index ohw = layer.out_pixels();
    const Eigen::Index ihw = layer.in_pixels();
    col.resize(batch * ohw, layer.patch());
    for (int c = 0; c < layer.cin; ++c) {
      for (int ky = 0; ky < layer.k; ++ky) {
        for (int kx = 0; kx < layer.k; ++kx) {
          const Eigen::Index col_idx =
              (static_cast<Eigen::Index>(c) * layer.k + ky) * layer.k + kx;
          S* dst = col.data() + col_idx * col.rows();
          for (Eigen::Index i = 0; i < batch; ++i) {
            const S* src_base =
                li == 0 ? ws.maps->data() + i * ws.maps->rows() +
                              obs_channel_offset(gr, c)
                        : ws.act[li - 1][gr].data() + c * ws.act[li - 1][gr].rows() +
                              i * ihw;
            for (int oy = 0; oy < layer.out_h; ++oy) {
              const S* src = src_base + (oy * layer.stride + ky) * layer.in_w + kx;
              if (layer.stride == 1) {
                std::copy(src, src + layer.out_w, dst);
                dst += layer.out_w;
              } else {
                for (int ox = 0; ox < layer.out_w; ++ox)
                  *dst++ = src[ox * layer.stride];
              }
            }
          }
        }
      }
    }
  }

  // Scatter-adds a (batch*out_pixels) x patch column gradient into the
  // previous layer's GEMM-layout gradient.
  void col2im_add(int li, const MatX<S>& gcol, MatX<S>& gin) const {
    const ConvLayer& layer = convs_[li];
    const Eigen::Index batch = gcol.rows() / layer.out_pixels();
    const Eigen::Index ihw = layer.in_pixels();
    for (int c = 0; c < layer.cin; ++c) {
      for (int ky = 0; ky < layer.k; ++ky) {
        for (int kx = 0; kx < layer.k; ++kx) {
          const Eigen::Index col_idx =
              (static_cast<Eigen::Index>(c) * layer.k + ky) * layer.k + kx;
          const S* src = gcol.data() + col_idx * gcol.rows();
          for (Eigen::Index i = 0; i < batch; ++i) {
            S* dst_base = gin.data() + c * gin.rows() + i * ihw;
            for (int oy = 0; oy < layer.out_h; ++oy) {
              S* dst = dst_base + (oy * layer.stride + ky) * layer.in_w + kx;
              if (layer.stride == 1) {
                for (int ox = 0; ox < layer.out_w; ++ox) dst[ox] += *src++;
              } else {
                for (int ox = 0; ox < layer.out_w; ++ox)
                  dst[ox * layer.stride] += *src++;
              }
            }
          }
        }
      }
    }
  }

  void fc_forward(const FcLayer& fc, const MatX<S>& x, MatX<S>& y, bool relu) const {
    auto w = ParamStore<S>::view(store_.values(), fc.w);
    auto b = ParamStore<S>::view(store_.values(), fc.b);
    y.noalias() = w * x;
    y.colwise() += b.col(0);
    if (relu) y = y.cwiseMax(S{0});
  }

  void fc_backward(const FcLayer& fc, const MatX<S>& x, const MatX<S>& y,
                   const MatX<S>& gy_in, VecX<S>* grads, MatX<S>* gx,
                   bool relu) const {
    const MatX<S>* gy = &gy_in;
    MatX<S> gated;
    if (relu) {
      gated = (y.array() > S{0}).select(gy_in, MatX<S>::Zero(y.rows(), y.cols()));
      gy = &gated;
    }
    if (grads) {
      auto dw = ParamStore<S>::view(*grads, fc.w);
      auto db = ParamStore<S>::view(*grads, fc.b);
      dw.noalias() += (*gy) * x.transpose();
      db.col(0) += gy->rowwise().sum();
    }
    if (gx) gx->noalias() = ParamStore<S>::view(store_.values(), fc.w).transpose() * (*gy);
  }

  NetConfig cfg_;
  ParamStore<S> store_;
  std::vector<ConvLayer> convs_;
  int groups_ = 1;
  FcLayer map_fc_, lidar_fc_, fc1_, fc2_, head_;
};

}  // namespace covpath::nn
