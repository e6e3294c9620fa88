#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wordrep/numerics.hpp"

namespace wordrep {
class Rng;

enum class CellKind { kElman, kLstm };
std::string_view to_string(CellKind c);
CellKind cell_kind_from_string(const std::string& s);

struct ModelConfig {
  CellKind cell = CellKind::kLstm;
  int hidden_size = 128;
  int num_layers = 1;
  double dropout = 0.0;
  int batch_size = 2048;
  double learning_rate = 1e-3;
  int epochs = 100;
  double teacher_forcing = 0.0;
  uint64_t seed = 1;
  int vocab_size = 42;       // inventory size + SOS/EOS/PAD
  int max_decode_len = 0;    // 0: resolved to longest training word + 2
  AdamConfig adam;           // lr is taken from learning_rate
  double grad_clip = 0.0;    // global-norm clip; 0 disables
  bool stop_when_memorized = false;

  void validate() const;  // throws std::invalid_argument listing the problem
  long parameter_count() const;
  int gate_rows() const { return cell == CellKind::kLstm ? 4 * hidden_size : hidden_size; }

  // Specials occupy the last three vocabulary slots, matching
  // Inventory::sos_id/eos_id/pad_id.
  int sos_id() const { return vocab_size - 3; }
  int eos_id() const { return vocab_size - 2; }
  int pad_id() const { return vocab_size - 1; }
};

template <class S>
struct CellWeights {
  Mat<S> wx;  // gate_rows x H
  Mat<S> wh;  // gate_rows x H
  Vec<S> b;   // gate_rows
};

// All trainable weights. The embedding matrix is shared by the encoder
// input, the decoder input, and (as its transpose) the decoder output
// projection: logits(v) = <embedding row v, hidden state>.
template <class S>
struct ModelParams {
  Mat<S> embedding;  // V x H
  std::vector<CellWeights<S>> encoder, decoder;  // one per layer

  static ModelParams init(const ModelConfig& cfg, Rng& rng);
  static ModelParams zeros(const ModelConfig& cfg);
  void set_zero();
  long count() const;

  template <class T>
  ModelParams<T> cast() const;
};

template <class S>
std::vector<TensorView<S>> tensor_views(ModelParams<S>& p);

// Zeroes one hidden unit's output at every timestep on one side of the
// model. For LSTM cells only the exposed h is zeroed unless zero_cell is set.
struct AblationMask {
  enum class Side { kEncoder, kDecoder };
  Side side = Side::kEncoder;
  int layer = 0;
  int unit = 0;
  bool zero_cell = false;
};
std::string_view to_string(AblationMask::Side s);

template <class S>
struct RunState {
  std::vector<Vec<S>> h;  // per layer
  std::vector<Vec<S>> c;  // per layer; empty for Elman
};

// One recurrent step; exposed for unit tests and reuse.
template <class S>
Vec<S> elman_step(const CellWeights<S>& w, const Vec<S>& x, const Vec<S>& h);

template <class S>
struct LstmGates {
  Vec<S> i, f, g, o, c_tanh;
};
template <class S>
void lstm_step(const CellWeights<S>& w, const Vec<S>& x, const Vec<S>& h, const Vec<S>& c,
               Vec<S>* h_out, Vec<S>* c_out, LstmGates<S>* gates = nullptr);

// Evaluation-mode encoder: embeds tokens (dropout off) and returns the final
// state of every layer. Throws on empty input or out-of-vocabulary tokens.
template <class S>
RunState<S> encode(const ModelParams<S>& params, const ModelConfig& cfg, std::span<const int> tokens,
                   const AblationMask* ablation = nullptr);

// Greedy decoding from an encoder state: starts from SOS, feeds back the
// argmax, stops at EOS or cfg.max_decode_len. Returns emitted tokens
// (EOS excluded). Pure function of (params, state).
template <class S>
std::vector<int> decode_greedy(const ModelParams<S>& params, const ModelConfig& cfg,
                               RunState<S> state, const AblationMask* ablation = nullptr);

// Optional diagnostics captured by the training-mode forward pass.
struct TrainTrace {
  std::vector<int> decoder_inputs;   // token fed at each step
  std::vector<int> argmax_emissions;
  MatD logits;  // T x V
};

struct ItemLoss {
  double loss_sum = 0.0;
  long positions = 0;
};

// Training-mode forward (teacher forcing with probability
// cfg.teacher_forcing, otherwise argmax feedback; embedding dropout from
// `rng`) and, when `grad_accum` is non-null, reverse-mode backward
// accumulating the gradient of the summed loss. `target_padded` is the
// input sequence followed by EOS and then PAD up to the batch width.
template <class S>
ItemLoss seq2seq_item_loss(const ModelParams<S>& params, const ModelConfig& cfg,
                           std::span<const int> input, std::span<const int> target_padded,
                           int sos_id, int pad_id, Rng& rng, ModelParams<S>* grad_accum,
                           TrainTrace* trace = nullptr);

}  // namespace wordrep
