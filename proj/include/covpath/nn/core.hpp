#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "covpath/rng.hpp"

namespace covpath::nn {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

struct ParamHandle {
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index size() const { return rows * cols; }
};

// Flat parameter vector plus named layer slices. Gradients live in a
// separate equally-sized vector so parameter snapshots stay read-only.
template <typename S>
class ParamStore {
 public:
  ParamHandle add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    ParamHandle h{total_, rows, cols};
    names_.push_back(name);
    handles_.push_back(h);
    total_ += h.size();
    return h;
  }

  void allocate() { values_ = VecX<S>::Zero(total_); }

  // Fan-in scaled uniform init, one stream per store.
  void init_fan_in(Rng& rng) {
    allocate();
    for (const ParamHandle& h : handles_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(h.cols, 1)));
      for (Eigen::Index i = 0; i < h.size(); ++i)
        values_[h.offset + i] = static_cast<S>(rng.uniform(-bound, bound));
    }
  }

  Eigen::Index size() const { return total_; }
  VecX<S>& values() { return values_; }
  const VecX<S>& values() const { return values_; }

  static Eigen::Map<MatX<S>> view(VecX<S>& v, const ParamHandle& h) {
    return Eigen::Map<MatX<S>>(v.data() + h.offset, h.rows, h.cols);
  }
  static Eigen::Map<const MatX<S>> view(const VecX<S>& v, const ParamHandle& h) {
    return Eigen::Map<const MatX<S>>(v.data() + h.offset, h.rows, h.cols);
  }

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ParamHandle>& handles() const { return handles_; }

 private:
  Eigen::Index total_ = 0;
  VecX<S> values_;
  std::vector<std::string> names_;
  std::vector<ParamHandle> handles_;
};

// Adaptive-moment estimation over a flat parameter vector.
template <typename S>
struct AdamState {
  VecX<S> m;
  VecX<S> v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(Eigen::Index n = 0) { resize(n); }
  void resize(Eigen::Index n) {
    m = VecX<S>::Zero(n);
    v = VecX<S>::Zero(n);
    step = 0;
  }
};

template <typename S>
void adam_step(VecX<S>& params, const VecX<S>& grads, AdamState<S>& state, double lr) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: size mismatch");
  ++state.step;
  const S b1 = static_cast<S>(state.beta1);
  const S b2 = static_cast<S>(state.beta2);
  state.m = b1 * state.m + (S{1} - b1) * grads;
  state.v = b2 * state.v + (S{1} - b2) * grads.cwiseProduct(grads);
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const S alpha = static_cast<S>(lr / bc1);
  const S eps = static_cast<S>(state.eps);
  params.array() -= alpha * state.m.array() /
                    ((state.v.array() / static_cast<S>(bc2)).sqrt() + eps);
}

}  // namespace covpath::nn
