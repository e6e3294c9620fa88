#include "wordrep/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wordrep/rng.hpp"

namespace wordrep {

std::string_view to_string(CellKind c) { return c == CellKind::kLstm ? "lstm" : "elman"; }

CellKind cell_kind_from_string(const std::string& s) {
  if (s == "lstm") return CellKind::kLstm;
  if (s == "elman" || s == "rnn") return CellKind::kElman;
  throw std::invalid_argument("unknown cell kind '" + s + "'");
}

std::string_view to_string(AblationMask::Side s) {
  return s == AblationMask::Side::kEncoder ? "encoder" : "decoder";
}

void ModelConfig::validate() const {
  std::string problems;
  auto add = [&](const std::string& p) { problems += problems.empty() ? p : "; " + p; };
  if (hidden_size < 1) add("hidden_size must be >= 1");
  if (num_layers < 1) add("num_layers must be >= 1");
  if (dropout < 0.0 || dropout > 0.7) add("dropout must be in [0, 0.7]");
  if (teacher_forcing < 0.0 || teacher_forcing > 0.7) add("teacher_forcing must be in [0, 0.7]");
  if (batch_size < 1) add("batch_size must be >= 1");
  if (learning_rate <= 0.0) add("learning_rate must be > 0");
  if (epochs < 1) add("epochs must be >= 1");
  if (vocab_size < 4) add("vocab_size must cover at least one phoneme plus SOS/EOS/PAD");
  if (max_decode_len < 0) add("max_decode_len must be >= 0");
  if (!problems.empty()) throw std::invalid_argument("invalid model config: " + problems);
}

long ModelConfig::parameter_count() const {
  const long V = vocab_size, H = hidden_size, G = gate_rows(), L = num_layers;
  return V * H + 2 * L * (2 * G * H + G);
}

template <class S>
ModelParams<S> ModelParams<S>::zeros(const ModelConfig& cfg) {
  ModelParams<S> p;
  const int H = cfg.hidden_size, G = cfg.gate_rows(), V = cfg.vocab_size;
  p.embedding = Mat<S>::Zero(V, H);
  for (int l = 0; l < cfg.num_layers; ++l) {
    p.encoder.push_back({Mat<S>::Zero(G, H), Mat<S>::Zero(G, H), Vec<S>::Zero(G)});
    p.decoder.push_back({Mat<S>::Zero(G, H), Mat<S>::Zero(G, H), Vec<S>::Zero(G)});
  }
  return p;
}

template <class S>
ModelParams<S> ModelParams<S>::init(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  ModelParams<S> p = zeros(cfg);
  const double k = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_size));
  Rng r = rng.child("param-init");
  for (auto& view : tensor_views(p)) {
    for (Eigen::Index i = 0; i < view.size; ++i)
      view.data[i] = static_cast<S>(r.uniform(-k, k));
  }
  return p;
}

template <class S>
void ModelParams<S>::set_zero() {
  embedding.setZero();
  for (auto& c : encoder) {
    c.wx.setZero();
    c.wh.setZero();
    c.b.setZero();
  }
  for (auto& c : decoder) {
    c.wx.setZero();
    c.wh.setZero();
    c.b.setZero();
  }
}

template <class S>
long ModelParams<S>::count() const {
  long n = embedding.size();
  for (const auto& c : encoder) n += c.wx.size() + c.wh.size() + c.b.size();
  for (const auto& c : decoder) n += c.wx.size() + c.wh.size() + c.b.size();
  return n;
}

template <class S>
template <class T>
ModelParams<T> ModelParams<S>::cast() const {
  ModelParams<T> out;
  out.embedding = embedding.template cast<T>();
  for (const auto& c : encoder)
    out.encoder.push_back({c.wx.template cast<T>(), c.wh.template cast<T>(), c.b.template cast<T>()});
  for (const auto& c : decoder)
    out.decoder.push_back({c.wx.template cast<T>(), c.wh.template cast<T>(), c.b.template cast<T>()});
  return out;
}

template <class S>
std::vector<TensorView<S>> tensor_views(ModelParams<S>& p) {
  std::vector<TensorView<S>> views;
  views.push_back({"embedding", p.embedding.data(), p.embedding.size()});
  auto add_cell = [&](const std::string& side, int layer, CellWeights<S>& c) {
    const std::string prefix = side + "." + std::to_string(layer) + ".";
    views.push_back({prefix + "wx", c.wx.data(), c.wx.size()});
    views.push_back({prefix + "wh", c.wh.data(), c.wh.size()});
    views.push_back({prefix + "b", c.b.data(), c.b.size()});
  };
  for (size_t l = 0; l < p.encoder.size(); ++l) add_cell("encoder", static_cast<int>(l), p.encoder[l]);
  for (size_t l = 0; l < p.decoder.size(); ++l) add_cell("decoder", static_cast<int>(l), p.decoder[l]);
  return views;
}

namespace {

template <class S>
void check_cell_shapes(const CellWeights<S>& w, const Vec<S>& x, const Vec<S>& h, int gate_mult) {
  const Eigen::Index H = h.size();
  if (w.wx.rows() != gate_mult * H || w.wh.rows() != gate_mult * H || w.b.size() != gate_mult * H ||
      w.wx.cols() != x.size() || w.wh.cols() != H)
    throw std::invalid_argument("recurrent step: weight/input shape mismatch");
}

template <class S>
S sigmoid(S v) {
  return S{1} / (S{1} + std::exp(-v));
}

template <class S>
int argmax_index(const Vec<S>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return static_cast<int>(best);
}

}  // namespace

template <class S>
Vec<S> elman_step(const CellWeights<S>& w, const Vec<S>& x, const Vec<S>& h) {
  check_cell_shapes(w, x, h, 1);
  Vec<S> pre = w.b;
  pre.noalias() += w.wx * x;
  pre.noalias() += w.wh * h;
  return pre.array().tanh();
}

template <class S>
void lstm_step(const CellWeights<S>& w, const Vec<S>& x, const Vec<S>& h, const Vec<S>& c,
               Vec<S>* h_out, Vec<S>* c_out, LstmGates<S>* gates) {
  check_cell_shapes(w, x, h, 4);
  if (c.size() != h.size()) throw std::invalid_argument("lstm_step: cell state shape mismatch");
  const Eigen::Index H = h.size();
  Vec<S> pre = w.b;
  pre.noalias() += w.wx * x;
  pre.noalias() += w.wh * h;
  Vec<S> i = pre.segment(0, H).unaryExpr([](S v) { return sigmoid(v); });
  Vec<S> f = pre.segment(H, H).unaryExpr([](S v) { return sigmoid(v); });
  Vec<S> g = pre.segment(2 * H, H).array().tanh();
  Vec<S> o = pre.segment(3 * H, H).unaryExpr([](S v) { return sigmoid(v); });
  Vec<S> c_new = f.cwiseProduct(c) + i.cwiseProduct(g);
  Vec<S> c_tanh = c_new.array().tanh();
  *h_out = o.cwiseProduct(c_tanh);
  *c_out = std::move(c_new);
  if (gates) {
    gates->i = std::move(i);
    gates->f = std::move(f);
    gates->g = std::move(g);
    gates->o = std::move(o);
    gates->c_tanh = std::move(c_tanh);
  }
}

namespace {

template <class S>
struct StepCache {
  Vec<S> x, h_prev, c_prev, h;
  LstmGates<S> gates;
};

// One training-mode cell step with cache capture.
template <class S>
void forward_cached(const ModelConfig& cfg, const CellWeights<S>& w, const Vec<S>& x, Vec<S>& h,
                    Vec<S>& c, StepCache<S>& cache) {
  cache.x = x;
  cache.h_prev = h;
  if (cfg.cell == CellKind::kLstm) {
    cache.c_prev = c;
    Vec<S> h_new, c_new;
    lstm_step(w, x, h, c, &h_new, &c_new, &cache.gates);
    h = std::move(h_new);
    c = std::move(c_new);
  } else {
    h = elman_step(w, x, h);
    cache.h = h;
  }
}

// Reverse of forward_cached. Consumes dh/dc for this step, emits dh/dc for
// the previous step and the gradient w.r.t. the step input.
template <class S>
void backward_cached(const ModelConfig& cfg, const CellWeights<S>& w, const StepCache<S>& cache,
                     const Vec<S>& dh, const Vec<S>& dc, CellWeights<S>& gw, Vec<S>& dx,
                     Vec<S>& dh_prev, Vec<S>& dc_prev) {
  if (cfg.cell == CellKind::kLstm) {
    const auto& gt = cache.gates;
    Vec<S> do_ = dh.cwiseProduct(gt.c_tanh);
    Vec<S> dc_total = dc + (dh.cwiseProduct(gt.o)
                                .cwiseProduct((S{1} - gt.c_tanh.array().square()).matrix().eval()));
    Vec<S> di = dc_total.cwiseProduct(gt.g);
    Vec<S> dg = dc_total.cwiseProduct(gt.i);
    Vec<S> df = dc_total.cwiseProduct(cache.c_prev);
    dc_prev = dc_total.cwiseProduct(gt.f);
    const Eigen::Index H = dh.size();
    Vec<S> dgates(4 * H);
    dgates.segment(0, H) = di.cwiseProduct(gt.i.cwiseProduct((S{1} - gt.i.array()).matrix().eval()));
    dgates.segment(H, H) = df.cwiseProduct(gt.f.cwiseProduct((S{1} - gt.f.array()).matrix().eval()));
    dgates.segment(2 * H, H) = dg.cwiseProduct((S{1} - gt.g.array().square()).matrix().eval());
    dgates.segment(3 * H, H) = do_.cwiseProduct(gt.o.cwiseProduct((S{1} - gt.o.array()).matrix().eval()));
    gw.wx.noalias() += dgates * cache.x.transpose();
    gw.wh.noalias() += dgates * cache.h_prev.transpose();
    gw.b += dgates;
    dx.noalias() = w.wx.transpose() * dgates;
    dh_prev.noalias() = w.wh.transpose() * dgates;
  } else {
    Vec<S> dpre = dh.cwiseProduct((S{1} - cache.h.array().square()).matrix().eval());
    gw.wx.noalias() += dpre * cache.x.transpose();
    gw.wh.noalias() += dpre * cache.h_prev.transpose();
    gw.b += dpre;
    dx.noalias() = w.wx.transpose() * dpre;
    dh_prev.noalias() = w.wh.transpose() * dpre;
    dc_prev.setZero();
  }
}

template <class S>
void apply_ablation(const ModelConfig& cfg, const AblationMask* abl, AblationMask::Side side, int layer,
                    Vec<S>& h, Vec<S>* c) {
  if (!abl || abl->side != side || abl->layer != layer) return;
  if (abl->unit < 0 || abl->unit >= cfg.hidden_size)
    throw std::out_of_range("ablation unit out of range: " + std::to_string(abl->unit));
  h(abl->unit) = S{0};
  if (abl->zero_cell && cfg.cell == CellKind::kLstm && c) (*c)(abl->unit) = S{0};
}

}  // namespace

template <class S>
RunState<S> encode(const ModelParams<S>& params, const ModelConfig& cfg, std::span<const int> tokens,
                   const AblationMask* ablation) {
  if (tokens.empty()) throw std::invalid_argument("encode: empty input sequence");
  const int L = cfg.num_layers;
  RunState<S> st;
  st.h.assign(static_cast<size_t>(L), Vec<S>::Zero(cfg.hidden_size));
  if (cfg.cell == CellKind::kLstm) st.c.assign(static_cast<size_t>(L), Vec<S>::Zero(cfg.hidden_size));
  for (int tok : tokens) {
    if (tok < 0 || tok >= cfg.vocab_size)
      throw std::invalid_argument("encode: unknown token id " + std::to_string(tok));
    Vec<S> x = params.embedding.row(tok).transpose();
    for (int l = 0; l < L; ++l) {
      auto& h = st.h[static_cast<size_t>(l)];
      if (cfg.cell == CellKind::kLstm) {
        auto& c = st.c[static_cast<size_t>(l)];
        Vec<S> h_new, c_new;
        lstm_step(params.encoder[static_cast<size_t>(l)], x, h, c, &h_new, &c_new);
        h = std::move(h_new);
        c = std::move(c_new);
        apply_ablation(cfg, ablation, AblationMask::Side::kEncoder, l, h, &c);
      } else {
        h = elman_step(params.encoder[static_cast<size_t>(l)], x, h);
        apply_ablation<S>(cfg, ablation, AblationMask::Side::kEncoder, l, h, nullptr);
      }
      x = h;
    }
  }
  return st;
}

template <class S>
std::vector<int> decode_greedy(const ModelParams<S>& params, const ModelConfig& cfg, RunState<S> st,
                               const AblationMask* ablation) {
  if (cfg.max_decode_len <= 0)
    throw std::logic_error("decode_greedy: max_decode_len has not been resolved");
  const int L = cfg.num_layers;
  const int sos = cfg.vocab_size - 3;
  const int eos = cfg.vocab_size - 2;
  std::vector<int> out;
  int tok = sos;
  for (int step = 0; step < cfg.max_decode_len; ++step) {
    Vec<S> x = params.embedding.row(tok).transpose();
    for (int l = 0; l < L; ++l) {
      auto& h = st.h[static_cast<size_t>(l)];
      if (cfg.cell == CellKind::kLstm) {
        auto& c = st.c[static_cast<size_t>(l)];
        Vec<S> h_new, c_new;
        lstm_step(params.decoder[static_cast<size_t>(l)], x, h, c, &h_new, &c_new);
        h = std::move(h_new);
        c = std::move(c_new);
        apply_ablation(cfg, ablation, AblationMask::Side::kDecoder, l, h, &c);
      } else {
        h = elman_step(params.decoder[static_cast<size_t>(l)], x, h);
        apply_ablation<S>(cfg, ablation, AblationMask::Side::kDecoder, l, h, nullptr);
      }
      x = h;
    }
    Vec<S> logits = params.embedding * st.h[static_cast<size_t>(L - 1)];
    const int arg = argmax_index(logits);
    if (arg == eos) break;
    out.push_back(arg);
    tok = arg;
  }
  return out;
}

template <class S>
ItemLoss seq2seq_item_loss(const ModelParams<S>& params, const ModelConfig& cfg,
                           std::span<const int> input, std::span<const int> target_padded,
                           int sos_id, int pad_id, Rng& rng, ModelParams<S>* grad_accum,
                           TrainTrace* trace) {
  if (input.empty()) throw std::invalid_argument("seq2seq_item_loss: empty input");
  if (target_padded.empty()) throw std::invalid_argument("seq2seq_item_loss: missing target");
  const int L = cfg.num_layers;
  const int H = cfg.hidden_size;
  const size_t n_enc = input.size();
  const size_t n_dec = target_padded.size();
  const S keep_scale = static_cast<S>(cfg.dropout > 0 ? 1.0 / (1.0 - cfg.dropout) : 1.0);

  auto draw_mask = [&](Vec<S>& mask) {
    mask.resize(H);
    for (int j = 0; j < H; ++j)
      mask(j) = rng.uniform01() < cfg.dropout ? S{0} : keep_scale;
  };

  // Encoder forward.
  std::vector<std::vector<StepCache<S>>> enc_cache(n_enc, std::vector<StepCache<S>>(static_cast<size_t>(L)));
  std::vector<Vec<S>> enc_mask(cfg.dropout > 0 ? n_enc : 0);
  std::vector<Vec<S>> h(static_cast<size_t>(L), Vec<S>::Zero(H));
  std::vector<Vec<S>> c(static_cast<size_t>(L), Vec<S>::Zero(H));
  for (size_t t = 0; t < n_enc; ++t) {
    const int tok = input[t];
    if (tok < 0 || tok >= cfg.vocab_size)
      throw std::invalid_argument("seq2seq_item_loss: unknown token id " + std::to_string(tok));
    Vec<S> x = params.embedding.row(tok).transpose();
    if (cfg.dropout > 0) {
      draw_mask(enc_mask[t]);
      x = x.cwiseProduct(enc_mask[t]);
    }
    for (int l = 0; l < L; ++l) {
      forward_cached(cfg, params.encoder[static_cast<size_t>(l)], x, h[static_cast<size_t>(l)],
                     c[static_cast<size_t>(l)], enc_cache[t][static_cast<size_t>(l)]);
      x = h[static_cast<size_t>(l)];
    }
  }

  // Decoder forward; h/c now hold the decoder state.
  std::vector<std::vector<StepCache<S>>> dec_cache(n_dec, std::vector<StepCache<S>>(static_cast<size_t>(L)));
  std::vector<Vec<S>> dec_mask(cfg.dropout > 0 ? n_dec : 0);
  std::vector<int> dec_inputs(n_dec);
  std::vector<Vec<S>> logits(n_dec);
  std::vector<Vec<S>> h_top(n_dec);
  int prev_argmax = sos_id;
  for (size_t t = 0; t < n_dec; ++t) {
    int tok;
    if (t == 0) {
      tok = sos_id;
    } else if (cfg.teacher_forcing > 0 && rng.bernoulli(cfg.teacher_forcing)) {
      tok = target_padded[t - 1];
    } else {
      tok = prev_argmax;
    }
    dec_inputs[t] = tok;
    Vec<S> x = params.embedding.row(tok).transpose();
    if (cfg.dropout > 0) {
      draw_mask(dec_mask[t]);
      x = x.cwiseProduct(dec_mask[t]);
    }
    for (int l = 0; l < L; ++l) {
      forward_cached(cfg, params.decoder[static_cast<size_t>(l)], x, h[static_cast<size_t>(l)],
                     c[static_cast<size_t>(l)], dec_cache[t][static_cast<size_t>(l)]);
      x = h[static_cast<size_t>(l)];
    }
    h_top[t] = h[static_cast<size_t>(L - 1)];
    logits[t].noalias() = params.embedding * h_top[t];
    prev_argmax = argmax_index(logits[t]);
  }

  // Loss over unmasked target positions; PAD contributes nothing.
  ItemLoss result;
  std::vector<Vec<S>> dlogits(grad_accum ? n_dec : 0);
  for (size_t t = 0; t < n_dec; ++t) {
    const int y = target_padded[t];
    if (y == pad_id) continue;
    if (y < 0 || y >= cfg.vocab_size)
      throw std::invalid_argument("seq2seq_item_loss: target token out of range");
    const S m = logits[t].maxCoeff();
    const double log_z =
        static_cast<double>(m) + std::log(static_cast<double>((logits[t].array() - m).exp().sum()));
    result.loss_sum += log_z - static_cast<double>(logits[t](y));
    result.positions += 1;
    if (grad_accum) {
      dlogits[t] = softmax(logits[t]);
      dlogits[t](y) -= S{1};
    }
  }

  if (trace) {
    trace->decoder_inputs = dec_inputs;
    trace->argmax_emissions.resize(n_dec);
    trace->logits.resize(static_cast<Eigen::Index>(n_dec), cfg.vocab_size);
    for (size_t t = 0; t < n_dec; ++t) {
      trace->argmax_emissions[t] = argmax_index(logits[t]);
      trace->logits.row(static_cast<Eigen::Index>(t)) =
          logits[t].template cast<double>().transpose();
    }
  }

  if (!grad_accum) return result;

  // Backward. Gradients are of the summed (not averaged) loss; the caller
  // rescales once per batch.
  std::vector<Vec<S>> dh(static_cast<size_t>(L), Vec<S>::Zero(H));
  std::vector<Vec<S>> dc(static_cast<size_t>(L), Vec<S>::Zero(H));
  Vec<S> dx(H), dh_prev(H), dc_prev(H);
  for (size_t t = n_dec; t-- > 0;) {
    if (dlogits[t].size() > 0) {
      grad_accum->embedding.noalias() += dlogits[t] * h_top[t].transpose();
      dh[static_cast<size_t>(L - 1)].noalias() += params.embedding.transpose() * dlogits[t];
    }
    for (int l = L - 1; l >= 0; --l) {
      backward_cached(cfg, params.decoder[static_cast<size_t>(l)], dec_cache[t][static_cast<size_t>(l)],
                      dh[static_cast<size_t>(l)], dc[static_cast<size_t>(l)],
                      grad_accum->decoder[static_cast<size_t>(l)], dx, dh_prev, dc_prev);
      dh[static_cast<size_t>(l)] = dh_prev;
      dc[static_cast<size_t>(l)] = dc_prev;
      if (l > 0) {
        dh[static_cast<size_t>(l - 1)] += dx;
      } else {
        // Argmax feedback is treated as a constant input; only the embedding
        // lookup of the fed token receives gradient.
        if (cfg.dropout > 0) dx = dx.cwiseProduct(dec_mask[t]);
        grad_accum->embedding.row(dec_inputs[t]) += dx.transpose();
      }
    }
  }
  // Decoder initial state is the encoder final state.
  for (size_t t = n_enc; t-- > 0;) {
    for (int l = L - 1; l >= 0; --l) {
      backward_cached(cfg, params.encoder[static_cast<size_t>(l)], enc_cache[t][static_cast<size_t>(l)],
                      dh[static_cast<size_t>(l)], dc[static_cast<size_t>(l)],
                      grad_accum->encoder[static_cast<size_t>(l)], dx, dh_prev, dc_prev);
      dh[static_cast<size_t>(l)] = dh_prev;
      dc[static_cast<size_t>(l)] = dc_prev;
      if (l > 0) {
        dh[static_cast<size_t>(l - 1)] += dx;
      } else {
        if (cfg.dropout > 0) dx = dx.cwiseProduct(enc_mask[t]);
        grad_accum->embedding.row(input[t]) += dx.transpose();
      }
    }
  }
  return result;
}

template struct ModelParams<float>;
template struct ModelParams<double>;
template ModelParams<double> ModelParams<float>::cast<double>() const;
template ModelParams<float> ModelParams<double>::cast<float>() const;
template ModelParams<float> ModelParams<float>::cast<float>() const;
template ModelParams<double> ModelParams<double>::cast<double>() const;
template std::vector<TensorView<float>> tensor_views<float>(ModelParams<float>&);
template std::vector<TensorView<double>> tensor_views<double>(ModelParams<double>&);
template Vec<float> elman_step<float>(const CellWeights<float>&, const Vec<float>&, const Vec<float>&);
template Vec<double> elman_step<double>(const CellWeights<double>&, const Vec<double>&,
                                        const Vec<double>&);
template void lstm_step<float>(const CellWeights<float>&, const Vec<float>&, const Vec<float>&,
                               const Vec<float>&, Vec<float>*, Vec<float>*, LstmGates<float>*);
template void lstm_step<double>(const CellWeights<double>&, const Vec<double>&, const Vec<double>&,
                                const Vec<double>&, Vec<double>*, Vec<double>*, LstmGates<double>*);
template RunState<float> encode<float>(const ModelParams<float>&, const ModelConfig&,
                                       std::span<const int>, const AblationMask*);
template RunState<double> encode<double>(const ModelParams<double>&, const ModelConfig&,
                                         std::span<const int>, const AblationMask*);
template std::vector<int> decode_greedy<float>(const ModelParams<float>&, const ModelConfig&,
                                               RunState<float>, const AblationMask*);
template std::vector<int> decode_greedy<double>(const ModelParams<double>&, const ModelConfig&,
                                                RunState<double>, const AblationMask*);
template ItemLoss seq2seq_item_loss<float>(const ModelParams<float>&, const ModelConfig&,
                                           std::span<const int>, std::span<const int>, int, int, Rng&,
                                           ModelParams<float>*, TrainTrace*);
template ItemLoss seq2seq_item_loss<double>(const ModelParams<double>&, const ModelConfig&,
                                            std::span<const int>, std::span<const int>, int, int, Rng&,
                                            ModelParams<double>*, TrainTrace*);

}  // namespace wordrep
