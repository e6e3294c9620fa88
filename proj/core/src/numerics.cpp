#include "wordrep/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace wordrep {

template <class S>
Vec<S> softmax(const Vec<S>& logits) {
  const S m = logits.maxCoeff();
  Vec<S> p = (logits.array() - m).exp();
  p /= p.sum();
  return p;
}

template <class S>
AdamState<S> AdamState<S>::like(const std::vector<TensorView<S>>& params) {
  AdamState<S> st;
  st.m.reserve(params.size());
  st.v.reserve(params.size());
  for (const auto& p : params) {
    st.m.push_back(Vec<S>::Zero(p.size));
    st.v.push_back(Vec<S>::Zero(p.size));
  }
  return st;
}

template <class S>
void adam_step(std::vector<TensorView<S>>& params, const std::vector<TensorView<S>>& grads,
               AdamState<S>& state, const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: tensor list sizes disagree");
  for (size_t i = 0; i < params.size(); ++i) {
    if (params[i].size != grads[i].size || params[i].size != state.m[i].size())
      throw std::invalid_argument("adam_step: shape mismatch for tensor '" + params[i].name + "'");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  const S beta1 = static_cast<S>(cfg.beta1);
  const S beta2 = static_cast<S>(cfg.beta2);
  const S alpha = static_cast<S>(cfg.lr / bc1);
  const S denom_scale = static_cast<S>(1.0 / std::sqrt(bc2));
  const S eps = static_cast<S>(cfg.eps);
  for (size_t i = 0; i < params.size(); ++i) {
    auto g = grads[i].map();
    auto p = params[i].map();
    state.m[i] = beta1 * state.m[i] + (S{1} - beta1) * g;
    state.v[i] = beta2 * state.v[i] + (S{1} - beta2) * g.cwiseProduct(g);
    p.array() -= alpha * state.m[i].array() / (state.v[i].array().sqrt() * denom_scale + eps);
  }
}

template <class S>
std::pair<double, long> masked_cross_entropy_sum(const Mat<S>& logits, std::span<const int> targets,
                                                 std::span<const uint8_t> pad_mask,
                                                 Mat<S>* dlogits_accum) {
  const Eigen::Index T = logits.rows();
  const Eigen::Index V = logits.cols();
  if (static_cast<Eigen::Index>(targets.size()) != T ||
      static_cast<Eigen::Index>(pad_mask.size()) != T)
    throw std::invalid_argument("masked_cross_entropy: target/mask length does not match logits rows");
  if (dlogits_accum && (dlogits_accum->rows() != T || dlogits_accum->cols() != V))
    throw std::invalid_argument("masked_cross_entropy: dlogits shape mismatch");

  double loss_sum = 0.0;
  long count = 0;
  for (Eigen::Index t = 0; t < T; ++t) {
    if (pad_mask[static_cast<size_t>(t)]) continue;
    const int y = targets[static_cast<size_t>(t)];
    if (y < 0 || y >= V)
      throw std::invalid_argument("masked_cross_entropy: target index out of range at position " +
                                  std::to_string(t));
    const Vec<S> row = logits.row(t).transpose();
    const S m = row.maxCoeff();
    const double log_z = static_cast<double>(m) +
                         std::log(static_cast<double>((row.array() - m).exp().sum()));
    loss_sum += log_z - static_cast<double>(row(y));
    ++count;
    if (dlogits_accum) {
      Vec<S> p = softmax(row);
      p(y) -= S{1};
      dlogits_accum->row(t) += p.transpose();
    }
  }
  return {loss_sum, count};
}

template <class S>
double masked_cross_entropy(const Mat<S>& logits, std::span<const int> targets,
                            std::span<const uint8_t> pad_mask, Mat<S>* dlogits) {
  Mat<S> accum;
  if (dlogits) {
    accum = Mat<S>::Zero(logits.rows(), logits.cols());
  }
  auto [sum, count] = masked_cross_entropy_sum(logits, targets, pad_mask, dlogits ? &accum : nullptr);
  if (count == 0) throw std::invalid_argument("masked_cross_entropy: all positions are masked");
  if (dlogits) *dlogits = accum / static_cast<S>(count);
  return sum / static_cast<double>(count);
}

template Vec<float> softmax<float>(const Vec<float>&);
template Vec<double> softmax<double>(const Vec<double>&);
template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::vector<TensorView<float>>&, const std::vector<TensorView<float>>&,
                               AdamState<float>&, const AdamConfig&);
template void adam_step<double>(std::vector<TensorView<double>>&,
                                const std::vector<TensorView<double>>&, AdamState<double>&,
                                const AdamConfig&);
template double masked_cross_entropy<float>(const Mat<float>&, std::span<const int>,
                                            std::span<const uint8_t>, Mat<float>*);
template double masked_cross_entropy<double>(const Mat<double>&, std::span<const int>,
                                             std::span<const uint8_t>, Mat<double>*);
template std::pair<double, long> masked_cross_entropy_sum<float>(const Mat<float>&, std::span<const int>,
                                                                 std::span<const uint8_t>, Mat<float>*);
template std::pair<double, long> masked_cross_entropy_sum<double>(const Mat<double>&,
                                                                  std::span<const int>,
                                                                  std::span<const uint8_t>,
                                                                  Mat<double>*);

}  // namespace wordrep
