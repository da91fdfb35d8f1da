// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_MODEL_HPP
#define CLCRN_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clcrn/autodiff.hpp"
#include "clcrn/data.hpp"
#include "clcrn/graph.hpp"
#include "clcrn/kernel.hpp"
#include "clcrn/metrics.hpp"

namespace clcrn {

/// Named, ordered parameter list. The order defines the checkpoint blob
/// layout and the Adam state layout.
class ParamStore {
 public:
  int add(const std::string& name, ad::Tensor value);
  int index_of(const std::string& name) const;  // -1 when absent
  std::size_t size() const { return values_.size(); }
  const std::string& name(int i) const { return names_[i]; }
  ad::Tensor& value(int i) { return values_[i]; }
  const ad::Tensor& value(int i) const { return values_[i]; }
  std::vector<ad::Tensor>& values() { return values_; }
  const std::vector<ad::Tensor>& values() const { return values_; }

 private:
  std::vector<std::string> names_;
  std::vector<ad::Tensor> values_;
};

struct ModelConfig {
  int signal_dim = 1;
  int hidden = 32;
  int layers = 1;
  int input_len = 12;
  int horizon = 12;
  int k = 8;
  MapKind map = MapKind::kHorizon;
  KernelComponents components;
  int heads = 6;
  std::vector<int> kernel_hidden{10, 8};
};

enum class TeacherForcing { kAlways, kNever, kScheduled };

TeacherForcing teacher_forcing_from_string(const std::string& name);
std::string to_string(TeacherForcing tf);

struct TrainConfig {
  int epochs = 30;
  int batch_size = 4;
  double lr = 0.01;
  double lr_decay = 0.95;  // applied every 10 epochs within the first 50
  double clip_norm = 5.0;
  TeacherForcing teacher_forcing = TeacherForcing::kScheduled;
  double tf_c = 2000.0;  // scheduled-sampling constant
  int patience = 10;
  std::uint64_t seed = 2021;
  int threads = 0;               // 0 = hardware concurrency
  int max_windows_per_epoch = 0; // 0 = every training window
};

struct EpochRow {
  int epoch = 0;
  double train_mae = 0.0;
  double val_mae = 0.0;
};

struct TrainResult {
  std::vector<EpochRow> history;
  int best_epoch = -1;
  double best_val_mae = 0.0;
};

/// CLC-GRU seq2seq forecaster. The kernel MLP and tau are shared across
/// gates and layers; gate linear maps are per layer.
class Seq2SeqModel {
 public:
  Seq2SeqModel(ModelConfig cfg, const std::vector<SpherePoint>& points,
               std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  const SphericalGraph& graph() const { return graph_; }
  const EdgeSet& edges() const { return edges_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  /// Current kernel parameters as a standalone CondLocalKernel view.
  CondLocalKernel kernel_snapshot() const;

  /// All model parameters registered as leaves on a tape, in store order.
  struct Bound {
    ad::Tape* tape = nullptr;
    std::vector<ad::Var> vars;
  };
  Bound bind(ad::Tape& tape) const;

  /// Per-edge kernel weights on the bound tape (computed once per tape and
  /// shared by every gate at every step).
  ad::Var kernel_weights_on(const Bound& bound) const;

  /// One recurrent update of layer `layer` of the given stack.
  ad::Var gru_step(const Bound& bound, bool decoder, int layer, ad::Var input,
                   ad::Var hidden, ad::Var kernel_w) const;

  /// Consumes input_len frames; returns per-layer hidden states.
  std::vector<ad::Var> encode(const Bound& bound,
                              const std::vector<ad::Tensor>& frames,
                              ad::Var kernel_w) const;

  /// Rolls the decoder for `horizon` steps from the encoder state. truth is
  /// required when any teacher-forcing decision is true.
  std::vector<ad::Var> decode(const Bound& bound, std::vector<ad::Var> hidden,
                              ad::Var kernel_w,
                              const std::vector<ad::Tensor>* truth,
                              const std::vector<bool>& teacher_forced) const;

  /// Mean MAE over the horizon (normalized space), for training.
  ad::Var training_loss(const Bound& bound,
                        const std::vector<ad::Tensor>& inputs,
                        const std::vector<ad::Tensor>& targets,
                        const std::vector<bool>& teacher_forced) const;

  /// Closed-loop predictions (normalized space), horizon frames of N x D.
  std::vector<ad::Tensor> predict(const std::vector<ad::Tensor>& inputs) const;

 private:
  struct GateIdx {
    int w_r, w_u, w_c, b_r, b_u, b_c;
  };
  ModelConfig cfg_;
  SphericalGraph graph_;
  EdgeSet edges_;
  ParamStore params_;
  std::vector<int> kernel_w_idx_, kernel_b_idx_;
  int tau_idx_ = -1;
  std::vector<GateIdx> encoder_gates_, decoder_gates_;
  int proj_w_idx_ = -1, proj_b_idx_ = -1;
};

/// BPTT training with Adam, gradient clipping, lr schedule, scheduled
/// sampling and best-validation checkpointing. Bit-reproducible for a fixed
/// seed regardless of thread count. Throws Diverged on NaN loss.
TrainResult train(Seq2SeqModel& model, const Dataset& ds, const TrainConfig& cfg);

/// Closed-loop metrics on a split, denormalized space. Throws EmptySplit.
std::vector<MetricsRow> evaluate(const Seq2SeqModel& model, const Dataset& ds,
                                 Split split, const std::vector<int>& horizons,
                                 int threads = 0);

/// Normalized input frames of the window starting at `start`.
std::vector<ad::Tensor> window_inputs(const Dataset& ds, int start);
/// Normalized target frames of the window starting at `start`.
std::vector<ad::Tensor> window_targets(const Dataset& ds, int start);

/// Loss history CSV: header epoch,train_mae,val_mae.
void write_loss_csv(std::ostream& os, const std::vector<EpochRow>& history);

}  // namespace clcrn

#endif
