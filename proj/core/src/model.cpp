// SPDX-License-Identifier: Apache-2.0
#include "clcrn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "clcrn/errors.hpp"
#include "clcrn/rng.hpp"

namespace clcrn {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Deterministic per-window seed, independent of thread scheduling.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t epoch,
                       std::uint64_t window) {
  std::uint64_t x = seed ^ (epoch * 0x9E3779B97F4A7C15ULL) ^
                    (window * 0xBF58476D1CE4E5B9ULL);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void glorot_init(ad::Tensor& t, Rng& rng) {
  const double bound = std::sqrt(6.0 / (t.rows() + t.cols()));
  for (double& v : t.data) v = rng.uniform(-bound, bound);
}

/// Runs fn(i) for i in [0, n) across `threads` workers on contiguous chunks.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

int ParamStore::add(const std::string& name, ad::Tensor value) {
  names_.push_back(name);
  values_.push_back(std::move(value));
  return static_cast<int>(values_.size()) - 1;
}

int ParamStore::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

TeacherForcing teacher_forcing_from_string(const std::string& name) {
  if (name == "always") return TeacherForcing::kAlways;
  if (name == "never") return TeacherForcing::kNever;
  if (name == "scheduled") return TeacherForcing::kScheduled;
  throw ConfigError("unknown teacher forcing mode '" + name +
                    "' (always|never|scheduled)");
}

std::string to_string(TeacherForcing tf) {
  switch (tf) {
    case TeacherForcing::kAlways: return "always";
    case TeacherForcing::kNever: return "never";
    case TeacherForcing::kScheduled: return "scheduled";
  }
  return "scheduled";
}

Seq2SeqModel::Seq2SeqModel(ModelConfig cfg,
                           const std::vector<SpherePoint>& points,
                           std::uint64_t seed)
    : cfg_(std::move(cfg)) {
  graph_ = knn_graph(points, cfg_.k);
  edges_ = build_edge_set(neighborhood_geometry(graph_, cfg_.map));

  // tau starts at the mean squared non-self neighbor distance.
  double rho2_sum = 0.0;
  long rho2_count = 0;
  for (int e = 0; e < edges_.num_edges(); ++e) {
    if (edges_.rho2.data[e] > 0.0) {
      rho2_sum += edges_.rho2.data[e];
      ++rho2_count;
    }
  }
  const double tau_init =
      rho2_count > 0 ? rho2_sum / static_cast<double>(rho2_count) : 1.0;

  const CondLocalKernel kernel = CondLocalKernel::init(
      cfg_.heads, cfg_.components, seed, tau_init, cfg_.kernel_hidden);
  for (std::size_t l = 0; l < kernel.weights.size(); ++l) {
    kernel_w_idx_.push_back(
        params_.add("kernel.w" + std::to_string(l), kernel.weights[l]));
    kernel_b_idx_.push_back(
        params_.add("kernel.b" + std::to_string(l), kernel.biases[l]));
  }
  tau_idx_ = params_.add("kernel.tau_raw", kernel.tau_raw);

  Rng rng(seed + 0x51A7E5ULL);
  const int h = cfg_.hidden;
  const int e = cfg_.heads;
  auto add_stack = [&](const char* prefix, std::vector<GateIdx>& gates) {
    for (int l = 0; l < cfg_.layers; ++l) {
      const int din = (l == 0 ? cfg_.signal_dim : h) + h;
      GateIdx g;
      auto gate = [&](const char* name, int& w_idx, int& b_idx) {
        ad::Tensor w = ad::Tensor::zeros({din * e, h});
        glorot_init(w, rng);
        const std::string base =
            std::string(prefix) + ".l" + std::to_string(l) + "." + name;
        w_idx = params_.add(base + ".W", std::move(w));
        b_idx = params_.add(base + ".b", ad::Tensor::zeros({1, h}));
      };
      gate("r", g.w_r, g.b_r);
      gate("u", g.w_u, g.b_u);
      gate("c", g.w_c, g.b_c);
      gates.push_back(g);
    }
  };
  add_stack("encoder", encoder_gates_);
  add_stack("decoder", decoder_gates_);

  ad::Tensor proj = ad::Tensor::zeros({h, cfg_.signal_dim});
  glorot_init(proj, rng);
  proj_w_idx_ = params_.add("proj.W", std::move(proj));
  proj_b_idx_ = params_.add("proj.b", ad::Tensor::zeros({1, cfg_.signal_dim}));
}

CondLocalKernel Seq2SeqModel::kernel_snapshot() const {
  CondLocalKernel k;
  k.components = cfg_.components;
  for (int idx : kernel_w_idx_) k.weights.push_back(params_.value(idx));
  for (int idx : kernel_b_idx_) k.biases.push_back(params_.value(idx));
  k.tau_raw = params_.value(tau_idx_);
  return k;
}

Seq2SeqModel::Bound Seq2SeqModel::bind(ad::Tape& tape) const {
  Bound b;
  b.tape = &tape;
  b.vars.reserve(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    b.vars.push_back(tape.leaf(params_.value(static_cast<int>(i))));
  }
  return b;
}

ad::Var Seq2SeqModel::kernel_weights_on(const Bound& bound) const {
  KernelLeaves leaves;
  for (int idx : kernel_w_idx_) leaves.weights.push_back(bound.vars[idx]);
  for (int idx : kernel_b_idx_) leaves.biases.push_back(bound.vars[idx]);
  leaves.tau_raw = bound.vars[tau_idx_];
  return kernel_weights_var(*bound.tape, leaves, cfg_.components, cfg_.heads,
                            edges_);
}

ad::Var Seq2SeqModel::gru_step(const Bound& bound, bool decoder, int layer,
                               ad::Var input, ad::Var hidden,
                               ad::Var kernel_w) const {
  const GateIdx& g = decoder ? decoder_gates_[layer] : encoder_gates_[layer];
  const ad::Var cat = ad::concat_cols(input, hidden);
  const ad::Var r = clc_conv(cat, kernel_w, edges_, bound.vars[g.w_r],
                             bound.vars[g.b_r], Activation::kSigmoid);
  const ad::Var u = clc_conv(cat, kernel_w, edges_, bound.vars[g.w_u],
                             bound.vars[g.b_u], Activation::kSigmoid);
  const ad::Var cat2 = ad::concat_cols(input, ad::hadamard(r, hidden));
  const ad::Var c = clc_conv(cat2, kernel_w, edges_, bound.vars[g.w_c],
                             bound.vars[g.b_c], Activation::kTanh);
  // Z = u (.) Z_prev + (1 - u) (.) C
  return ad::add(ad::hadamard(u, hidden),
                 ad::hadamard(ad::affine(u, -1.0, 1.0), c));
}

std::vector<ad::Var> Seq2SeqModel::encode(const Bound& bound,
                                          const std::vector<ad::Tensor>& frames,
                                          ad::Var kernel_w) const {
  if (frames.empty()) throw ShapeMismatch("encode: empty input sequence");
  ad::Tape& tape = *bound.tape;
  const int n = graph_.num_nodes();
  std::vector<ad::Var> hidden(cfg_.layers);
  for (int l = 0; l < cfg_.layers; ++l) {
    hidden[l] = tape.constant(ad::Tensor::zeros({n, cfg_.hidden}));
  }
  for (const ad::Tensor& frame : frames) {
    ad::Var x = tape.constant(frame);
    for (int l = 0; l < cfg_.layers; ++l) {
      hidden[l] = gru_step(bound, false, l, x, hidden[l], kernel_w);
      x = hidden[l];
    }
  }
  return hidden;
}

std::vector<ad::Var> Seq2SeqModel::decode(
    const Bound& bound, std::vector<ad::Var> hidden, ad::Var kernel_w,
    const std::vector<ad::Tensor>* truth,
    const std::vector<bool>& teacher_forced) const {
  ad::Tape& tape = *bound.tape;
  const int n = graph_.num_nodes();
  std::vector<ad::Var> preds;
  preds.reserve(cfg_.horizon);
  // The first decoder input is an all-zero "go" frame.
  ad::Var x = tape.constant(ad::Tensor::zeros({n, cfg_.signal_dim}));
  for (int t = 0; t < cfg_.horizon; ++t) {
    for (int l = 0; l < cfg_.layers; ++l) {
      hidden[l] = gru_step(bound, true, l, x, hidden[l], kernel_w);
      x = hidden[l];
    }
    const ad::Var pred =
        ad::add(ad::matmul(hidden[cfg_.layers - 1], bound.vars[proj_w_idx_]),
                bound.vars[proj_b_idx_]);
    preds.push_back(pred);
    if (t + 1 < cfg_.horizon) {
      const bool forced = t < static_cast<int>(teacher_forced.size()) &&
                          teacher_forced[t];
      if (forced) {
        if (truth == nullptr) {
          throw MissingTruth("decode: teacher forcing requested without truth");
        }
        x = tape.constant((*truth)[t]);
      } else {
        x = pred;
      }
    }
  }
  return preds;
}

ad::Var Seq2SeqModel::training_loss(
    const Bound& bound, const std::vector<ad::Tensor>& inputs,
    const std::vector<ad::Tensor>& targets,
    const std::vector<bool>& teacher_forced) const {
  ad::Tape& tape = *bound.tape;
  const ad::Var kernel_w = kernel_weights_on(bound);
  const std::vector<ad::Var> hidden = encode(bound, inputs, kernel_w);
  const std::vector<ad::Var> preds =
      decode(bound, hidden, kernel_w, &targets, teacher_forced);
  ad::Var total{};
  for (int t = 0; t < cfg_.horizon; ++t) {
    const ad::Var mae = ad::mean_abs_error(preds[t], tape.constant(targets[t]));
    total = (t == 0) ? mae : ad::add(total, mae);
  }
  return ad::scale(total, 1.0 / static_cast<double>(cfg_.horizon));
}

std::vector<ad::Tensor> Seq2SeqModel::predict(
    const std::vector<ad::Tensor>& inputs) const {
  ad::Tape tape;
  const Bound bound = bind(tape);
  const ad::Var kernel_w = kernel_weights_on(bound);
  const std::vector<ad::Var> hidden = encode(bound, inputs, kernel_w);
  const std::vector<ad::Var> preds =
      decode(bound, hidden, kernel_w, nullptr, {});
  std::vector<ad::Tensor> out;
  out.reserve(preds.size());
  for (ad::Var p : preds) out.push_back(tape.value(p));
  return out;
}

std::vector<ad::Tensor> window_inputs(const Dataset& ds, int start) {
  std::vector<ad::Tensor> frames;
  frames.reserve(ds.input_len);
  for (int t = 0; t < ds.input_len; ++t) {
    ad::Tensor f = ad::Tensor::zeros({ds.num_nodes, ds.dim});
    for (int n = 0; n < ds.num_nodes; ++n) {
      for (int d = 0; d < ds.dim; ++d) {
        f.at(n, d) = ds.normalize_value(ds.at(start + t, n, d), d);
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<ad::Tensor> window_targets(const Dataset& ds, int start) {
  std::vector<ad::Tensor> frames;
  frames.reserve(ds.horizon);
  for (int t = 0; t < ds.horizon; ++t) {
    ad::Tensor f = ad::Tensor::zeros({ds.num_nodes, ds.dim});
    for (int n = 0; n < ds.num_nodes; ++n) {
      for (int d = 0; d < ds.dim; ++d) {
        f.at(n, d) =
            ds.normalize_value(ds.at(start + ds.input_len + t, n, d), d);
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

namespace {

double validation_mae(const Seq2SeqModel& model, const Dataset& ds,
                      const std::vector<int>& starts, int threads) {
  std::vector<double> losses(starts.size(), 0.0);
  parallel_for(static_cast<int>(starts.size()), threads, [&](int i) {
    const std::vector<ad::Tensor> inputs = window_inputs(ds, starts[i]);
    const std::vector<ad::Tensor> targets = window_targets(ds, starts[i]);
    const std::vector<ad::Tensor> preds = model.predict(inputs);
    double sum = 0.0;
    long count = 0;
    for (std::size_t t = 0; t < preds.size(); ++t) {
      for (std::size_t j = 0; j < preds[t].data.size(); ++j) {
        sum += std::abs(preds[t].data[j] - targets[t].data[j]);
        ++count;
      }
    }
    losses[i] = sum / static_cast<double>(count);
  });
  double total = 0.0;
  for (double l : losses) total += l;  // fixed order: bit-reproducible
  return total / static_cast<double>(losses.size());
}

}  // namespace

TrainResult train(Seq2SeqModel& model, const Dataset& ds,
                  const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.batch_size < 1) {
    throw ConfigError("train: epochs and batch_size must be positive");
  }
  const std::vector<int> train_starts = window_starts(ds, Split::kTrain);
  const std::vector<int> val_starts = window_starts(ds, Split::kVal);
  if (train_starts.empty()) throw EmptySplit("train: no training windows");
  if (val_starts.empty()) throw EmptySplit("train: no validation windows");
  const int threads = resolve_threads(cfg.threads);

  ad::AdamConfig adam;
  adam.lr = cfg.lr;
  ad::AdamState adam_state;

  TrainResult result;
  std::vector<ad::Tensor> best_params;
  long global_batch = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // lr decays every 10 epochs within the first 50.
    const int decade = std::min(epoch / 10, 5);
    adam.lr = cfg.lr * std::pow(cfg.lr_decay, decade);

    std::vector<int> order = train_starts;
    Rng shuffle_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch), 0));
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i) {
      std::swap(order[i], order[shuffle_rng.below(i + 1)]);
    }
    if (cfg.max_windows_per_epoch > 0 &&
        static_cast<int>(order.size()) > cfg.max_windows_per_epoch) {
      order.resize(cfg.max_windows_per_epoch);
    }

    double epoch_loss = 0.0;
    long epoch_windows = 0;
    for (std::size_t pos = 0; pos < order.size(); pos += cfg.batch_size) {
      const int batch =
          std::min<std::size_t>(cfg.batch_size, order.size() - pos);
      double tf_prob = 0.0;
      switch (cfg.teacher_forcing) {
        case TeacherForcing::kAlways: tf_prob = 1.0; break;
        case TeacherForcing::kNever: tf_prob = 0.0; break;
        case TeacherForcing::kScheduled: {
          const double x = static_cast<double>(global_batch) / cfg.tf_c;
          tf_prob = x > 700.0 ? 0.0 : cfg.tf_c / (cfg.tf_c + std::exp(x));
          break;
        }
      }

      std::vector<std::vector<ad::Tensor>> window_grads(batch);
      std::vector<double> window_losses(batch, 0.0);
      parallel_for(batch, threads, [&](int b) {
        const int start = order[pos + b];
        Rng tf_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch) + 1,
                            static_cast<std::uint64_t>(start) + 1));
        std::vector<bool> forced(model.config().horizon, false);
        for (std::size_t t = 0; t < forced.size(); ++t) {
          forced[t] = tf_rng.uniform() < tf_prob;
        }
        ad::Tape tape;
        const Seq2SeqModel::Bound bound = model.bind(tape);
        const ad::Var loss = model.training_loss(
            bound, window_inputs(ds, start), window_targets(ds, start), forced);
        window_losses[b] = tape.value(loss).data[0];
        tape.backward(loss);
        auto& grads = window_grads[b];
        grads.reserve(bound.vars.size());
        for (ad::Var v : bound.vars) grads.push_back(tape.grad(v));
      });

      // Deterministic accumulation in window order.
      std::vector<ad::Tensor> grads = std::move(window_grads[0]);
      for (int b = 1; b < batch; ++b) {
        for (std::size_t p = 0; p < grads.size(); ++p) {
          for (std::size_t i = 0; i < grads[p].data.size(); ++i) {
            grads[p].data[i] += window_grads[b][p].data[i];
          }
        }
      }
      const double inv_batch = 1.0 / static_cast<double>(batch);
      for (auto& g : grads) {
        for (double& v : g.data) v *= inv_batch;
      }
      for (int b = 0; b < batch; ++b) {
        if (std::isnan(window_losses[b])) {
          throw Diverged("training loss became NaN at epoch " +
                         std::to_string(epoch));
        }
        epoch_loss += window_losses[b];
        ++epoch_windows;
      }
      ad::clip_by_global_norm(grads, cfg.clip_norm);
      ad::adam_step(model.params().values(), grads, adam_state, adam);
      ++global_batch;
    }

    EpochRow row;
    row.epoch = epoch;
    row.train_mae = epoch_loss / static_cast<double>(epoch_windows);
    row.val_mae = validation_mae(model, ds, val_starts, threads);
    if (std::isnan(row.val_mae)) {
      throw Diverged("validation loss became NaN at epoch " +
                     std::to_string(epoch));
    }
    result.history.push_back(row);

    if (result.best_epoch < 0 || row.val_mae < result.best_val_mae) {
      result.best_epoch = epoch;
      result.best_val_mae = row.val_mae;
      best_params = model.params().values();
    } else if (cfg.patience > 0 && epoch - result.best_epoch >= cfg.patience) {
      break;  // early stopping
    }
  }

  if (!best_params.empty()) model.params().values() = std::move(best_params);
  return result;
}

std::vector<MetricsRow> evaluate(const Seq2SeqModel& model, const Dataset& ds,
                                 Split split, const std::vector<int>& horizons,
                                 int threads) {
  const std::vector<int> starts = window_starts(ds, split);
  if (starts.empty()) throw EmptySplit("evaluate: split has no windows");
  const int nthreads = resolve_threads(threads);
  const std::size_t frame = static_cast<std::size_t>(ds.num_nodes) * ds.dim;

  std::vector<MetricsAccumulator> accs(starts.size(),
                                       MetricsAccumulator(ds.horizon));
  parallel_for(static_cast<int>(starts.size()), nthreads, [&](int i) {
    const int start = starts[i];
    const std::vector<ad::Tensor> preds = model.predict(window_inputs(ds, start));
    std::vector<double> denorm(frame);
    for (int t = 0; t < ds.horizon; ++t) {
      for (int n = 0; n < ds.num_nodes; ++n) {
        for (int d = 0; d < ds.dim; ++d) {
          denorm[static_cast<std::size_t>(n) * ds.dim + d] =
              ds.denormalize_value(preds[t].at(n, d), d);
        }
      }
      const double* truth =
          &ds.signals[(static_cast<std::size_t>(start) + ds.input_len + t) * frame];
      accs[i].add_frame(t, denorm.data(), truth, frame);
    }
  });
  // Merge in window order so repeated runs emit identical numbers.
  MetricsAccumulator total = accs[0];
  for (std::size_t i = 1; i < accs.size(); ++i) total.merge(accs[i]);

  std::vector<MetricsRow> rows;
  for (int h : horizons) rows.push_back(total.at_horizon(h));
  return rows;
}

void write_loss_csv(std::ostream& os, const std::vector<EpochRow>& history) {
  os << "epoch,train_mae,val_mae\n";
  char buf[96];
  for (const auto& row : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", row.epoch,
                  row.train_mae, row.val_mae);
    os << buf;
  }
}

}  // namespace clcrn
