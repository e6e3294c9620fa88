#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wordrep {

// Dense containers. Training runs at 32-bit; gradient verification
// instantiates the same code at 64-bit.
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using MatF = Mat<float>;
using VecF = Vec<float>;
using MatD = Mat<double>;
using VecD = Vec<double>;

template <class S>
Vec<S> softmax(const Vec<S>& logits);

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

#ifndef NDEBUG
#define WORDREP_DCHECK_FINITE(expr, what)                                      \
  do {                                                                         \
    if (!::wordrep::all_finite(expr))                                          \
      throw std::runtime_error(std::string("non-finite values in ") + (what)); \
  } while (0)
#else
#define WORDREP_DCHECK_FINITE(expr, what) \
  do {                                    \
  } while (0)
#endif

// Flat view over one parameter tensor; Adam and the gradient checker walk
// models through lists of these.
template <class S>
struct TensorView {
  std::string name;
  S* data = nullptr;
  Eigen::Index size = 0;

  Eigen::Map<Vec<S>> map() { return Eigen::Map<Vec<S>>(data, size); }
  Eigen::Map<const Vec<S>> map() const { return Eigen::Map<const Vec<S>>(data, size); }
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <class S>
struct AdamState {
  std::vector<Vec<S>> m, v;
  long t = 0;

  static AdamState like(const std::vector<TensorView<S>>& params);
};

// Standard Adam update with bias correction. Parameter and gradient lists
// must match the state's shapes.
template <class S>
void adam_step(std::vector<TensorView<S>>& params, const std::vector<TensorView<S>>& grads,
               AdamState<S>& state, const AdamConfig& cfg);

// Mean over unmasked positions of -log softmax(logits)[target]. `pad_mask`
// is 1 at pad positions, which contribute neither loss nor gradient. When
// `dlogits` is non-null it receives the gradient of the mean loss.
// Throws std::invalid_argument when every position is masked.
template <class S>
double masked_cross_entropy(const Mat<S>& logits, std::span<const int> targets,
                            std::span<const uint8_t> pad_mask, Mat<S>* dlogits = nullptr);

// Sum-reduction building block used by the training loop: adds the gradient
// of the summed loss into `dlogits_accum` (same shape as logits) and returns
// {loss_sum, unmasked_count}.
template <class S>
std::pair<double, long> masked_cross_entropy_sum(const Mat<S>& logits, std::span<const int> targets,
                                                 std::span<const uint8_t> pad_mask,
                                                 Mat<S>* dlogits_accum);

}  // namespace wordrep
