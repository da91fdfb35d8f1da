// SPDX-License-Identifier: Apache-2.0
#include "clcrn/autodiff.hpp"

#include <cmath>
#include <cstring>

namespace clcrn::ad {

Tensor Tensor::zeros(std::vector<int> shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

std::string Tensor::shape_str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape != b.shape) {
    throw ShapeMismatch(std::string(op) + ": shapes " + a.shape_str() + " vs " +
                        b.shape_str());
  }
}

Tape* same_tape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) {
    throw NotTraced("operands recorded on different (or no) tapes");
  }
  return a.tape;
}

Var unary(Var a, double (*fwd)(double), double (*dfd)(double, double)) {
  Tape& t = *a.tape;
  const Tensor& x = t.value(a);
  Tensor y = x;
  for (double& v : y.data) v = fwd(v);
  // dfd receives (input, output) so cheap forms like 1 - y^2 can be used.
  Tensor xin = x;
  return t.custom(std::move(y), {a},
                  [a, xin = std::move(xin), dfd](Tape& tp, const Tensor& og,
                                                 const Tensor& ov) {
                    Tensor& ga = tp.grad_buffer(a);
                    for (std::size_t i = 0; i < og.data.size(); ++i) {
                      ga.data[i] += og.data[i] * dfd(xin.data[i], ov.data[i]);
                    }
                  });
}

}  // namespace

Var Tape::leaf(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::check(Var v) const {
  if (v.tape != this || v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
    throw NotTraced("variable does not belong to this tape");
  }
}

const Tensor& Tape::value(Var v) const {
  check(v);
  return nodes_[v.id].value;
}

const Tensor& Tape::grad(Var v) const {
  check(v);
  const Node& n = nodes_[v.id];
  if (n.grad.data.empty()) {
    // Node did not participate in the loss; expose zeros of matching shape.
    const_cast<Node&>(n).grad = Tensor::zeros(n.value.shape);
  }
  return n.grad;
}

Tensor& Tape::grad_buffer(Var v) {
  check(v);
  Node& n = nodes_[v.id];
  if (n.grad.data.empty()) n.grad = Tensor::zeros(n.value.shape);
  return n.grad;
}

void Tape::accumulate_grad(Var v, const Tensor& g) {
  Tensor& buf = grad_buffer(v);
  require_same_shape(buf, g, "accumulate_grad");
  for (std::size_t i = 0; i < g.data.size(); ++i) buf.data[i] += g.data[i];
}

Var Tape::custom(Tensor value, std::vector<Var> parents, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  n.parents.reserve(parents.size());
  for (Var p : parents) {
    check(p);
    n.parents.push_back(p.id);
  }
  n.back = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::backward(Var loss) {
  check(loss);
  if (nodes_.empty()) throw NotTraced("backward on an empty tape");
  if (nodes_[loss.id].value.size() != 1) {
    throw NotScalarLoss("backward: loss has shape " +
                        nodes_[loss.id].value.shape_str());
  }
  for (Node& n : nodes_) n.grad = Tensor();  // reset previous gradients
  grad_buffer(loss).data[0] = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.back || n.grad.data.empty()) continue;
    n.back(*this, n.grad, n.value);
  }
}

Var matmul(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  if (A.cols() != B.rows()) {
    throw ShapeMismatch("matmul: shapes " + A.shape_str() + " x " + B.shape_str());
  }
  const int m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C = Tensor::zeros({m, n});
  // ikj order keeps the inner loop contiguous for vectorization.
  for (int i = 0; i < m; ++i) {
    const double* arow = &A.data[static_cast<std::size_t>(i) * k];
    double* crow = &C.data[static_cast<std::size_t>(i) * n];
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = &B.data[static_cast<std::size_t>(p) * n];
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return t.custom(std::move(C), {a, b},
                  [a, b](Tape& tp, const Tensor& og, const Tensor&) {
                    const Tensor& A = tp.value(a);
                    const Tensor& B = tp.value(b);
                    const int m = A.rows(), k = A.cols(), n = B.cols();
                    Tensor& ga = tp.grad_buffer(a);  // dA += dC * B^T
                    for (int i = 0; i < m; ++i) {
                      const double* grow = &og.data[static_cast<std::size_t>(i) * n];
                      double* garow = &ga.data[static_cast<std::size_t>(i) * k];
                      for (int p = 0; p < k; ++p) {
                        const double* brow = &B.data[static_cast<std::size_t>(p) * n];
                        double acc = 0.0;
                        for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
                        garow[p] += acc;
                      }
                    }
                    Tensor& gb = tp.grad_buffer(b);  // dB += A^T * dC
                    for (int p = 0; p < k; ++p) {
                      double* gbrow = &gb.data[static_cast<std::size_t>(p) * n];
                      for (int i = 0; i < m; ++i) {
                        const double av = A.data[static_cast<std::size_t>(i) * k + p];
                        if (av == 0.0) continue;
                        const double* grow =
                            &og.data[static_cast<std::size_t>(i) * n];
                        for (int j = 0; j < n; ++j) gbrow[j] += av * grow[j];
                      }
                    }
                  });
}

Var add(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  const bool bias_row = A.shape.size() == 2 && B.rows() == 1 &&
                        B.cols() == A.cols() && A.rows() != 1;
  if (!bias_row) require_same_shape(A, B, "add");
  Tensor C = A;
  if (bias_row) {
    for (int i = 0; i < A.rows(); ++i) {
      for (int j = 0; j < A.cols(); ++j) C.at(i, j) += B.at(0, j);
    }
  } else {
    for (std::size_t i = 0; i < C.data.size(); ++i) C.data[i] += B.data[i];
  }
  return t.custom(std::move(C), {a, b},
                  [a, b, bias_row](Tape& tp, const Tensor& og, const Tensor&) {
                    Tensor& ga = tp.grad_buffer(a);
                    for (std::size_t i = 0; i < og.data.size(); ++i) {
                      ga.data[i] += og.data[i];
                    }
                    Tensor& gb = tp.grad_buffer(b);
                    if (bias_row) {
                      const int n = og.cols();
                      for (int i = 0; i < og.rows(); ++i) {
                        for (int j = 0; j < n; ++j) gb.data[j] += og.at(i, j);
                      }
                    } else {
                      for (std::size_t i = 0; i < og.data.size(); ++i) {
                        gb.data[i] += og.data[i];
                      }
                    }
                  });
}

Var sub(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require_same_shape(A, B, "sub");
  Tensor C = A;
  for (std::size_t i = 0; i < C.data.size(); ++i) C.data[i] -= B.data[i];
  return t.custom(std::move(C), {a, b},
                  [a, b](Tape& tp, const Tensor& og, const Tensor&) {
                    Tensor& ga = tp.grad_buffer(a);
                    Tensor& gb = tp.grad_buffer(b);
                    for (std::size_t i = 0; i < og.data.size(); ++i) {
                      ga.data[i] += og.data[i];
                      gb.data[i] -= og.data[i];
                    }
                  });
}

Var hadamard(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require_same_shape(A, B, "hadamard");
  Tensor C = A;
  for (std::size_t i = 0; i < C.data.size(); ++i) C.data[i] *= B.data[i];
  return t.custom(std::move(C), {a, b},
                  [a, b](Tape& tp, const Tensor& og, const Tensor&) {
                    const Tensor& A = tp.value(a);
                    const Tensor& B = tp.value(b);
                    Tensor& ga = tp.grad_buffer(a);
                    Tensor& gb = tp.grad_buffer(b);
                    for (std::size_t i = 0; i < og.data.size(); ++i) {
                      ga.data[i] += og.data[i] * B.data[i];
                      gb.data[i] += og.data[i] * A.data[i];
                    }
                  });
}

Var concat_cols(Var a, Var b) {
  Tape& t = *same_tape(a, b);
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  if (A.rows() != B.rows()) {
    throw ShapeMismatch("concat_cols: shapes " + A.shape_str() + " vs " +
                        B.shape_str());
  }
  const int m = A.rows(), ca = A.cols(), cb = B.cols();
  Tensor C = Tensor::zeros({m, ca + cb});
  for (int i = 0; i < m; ++i) {
    std::memcpy(&C.data[static_cast<std::size_t>(i) * (ca + cb)],
                &A.data[static_cast<std::size_t>(i) * ca], sizeof(double) * ca);
    std::memcpy(&C.data[static_cast<std::size_t>(i) * (ca + cb) + ca],
                &B.data[static_cast<std::size_t>(i) * cb], sizeof(double) * cb);
  }
  return t.custom(std::move(C), {a, b},
                  [a, b, m, ca, cb](Tape& tp, const Tensor& og, const Tensor&) {
                    Tensor& ga = tp.grad_buffer(a);
                    Tensor& gb = tp.grad_buffer(b);
                    for (int i = 0; i < m; ++i) {
                      for (int j = 0; j < ca; ++j) {
                        ga.data[static_cast<std::size_t>(i) * ca + j] +=
                            og.data[static_cast<std::size_t>(i) * (ca + cb) + j];
                      }
                      for (int j = 0; j < cb; ++j) {
                        gb.data[static_cast<std::size_t>(i) * cb + j] +=
                            og.data[static_cast<std::size_t>(i) * (ca + cb) + ca + j];
                      }
                    }
                  });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
               [](double, double y) { return y * (1.0 - y); });
}

Var exp(Var a) {
  return unary(a,
               [](double x) { return std::exp(x > 700.0 ? 700.0 : x); },
               [](double x, double y) { return x > 700.0 ? 0.0 : y; });
}

Var softplus(Var a) {
  return unary(a,
               [](double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); },
               [](double x, double) { return 1.0 / (1.0 + std::exp(-x)); });
}

Var sum(Var a) {
  Tape& t = *a.tape;
  const Tensor& A = t.value(a);
  double s = 0.0;
  for (double v : A.data) s += v;
  return t.custom(Tensor::scalar(s), {a},
                  [a](Tape& tp, const Tensor& og, const Tensor&) {
                    Tensor& ga = tp.grad_buffer(a);
                    for (double& g : ga.data) g += og.data[0];
                  });
}

Var scale(Var a, double c) { return affine(a, c, 0.0); }

Var affine(Var a, double mul, double addend) {
  Tape& t = *a.tape;
  Tensor C = t.value(a);
  for (double& v : C.data) v = mul * v + addend;
  return t.custom(std::move(C), {a},
                  [a, mul](Tape& tp, const Tensor& og, const Tensor&) {
                    Tensor& ga = tp.grad_buffer(a);
                    for (std::size_t i = 0; i < og.data.size(); ++i) {
                      ga.data[i] += mul * og.data[i];
                    }
                  });
}

Var mean_abs_error(Var pred, Var target) {
  Tape& t = *same_tape(pred, target);
  const Tensor& P = t.value(pred);
  const Tensor& Y = t.value(target);
  require_same_shape(P, Y, "mean_abs_error");
  const double inv = 1.0 / static_cast<double>(P.size());
  double s = 0.0;
  for (std::size_t i = 0; i < P.data.size(); ++i) {
    s += std::abs(P.data[i] - Y.data[i]);
  }
  return t.custom(Tensor::scalar(s * inv), {pred, target},
                  [pred, target, inv](Tape& tp, const Tensor& og, const Tensor&) {
                    const Tensor& P = tp.value(pred);
                    const Tensor& Y = tp.value(target);
                    Tensor& gp = tp.grad_buffer(pred);
                    Tensor& gy = tp.grad_buffer(target);
                    for (std::size_t i = 0; i < P.data.size(); ++i) {
                      const double r = P.data[i] - Y.data[i];
                      // subgradient at zero residual defined as 0
                      const double s = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
                      gp.data[i] += og.data[0] * inv * s;
                      gy.data[i] -= og.data[0] * inv * s;
                    }
                  });
}

Var row_scale(Var a, Var s) {
  Tape& t = *same_tape(a, s);
  const Tensor& A = t.value(a);
  const Tensor& S = t.value(s);
  if (S.rows() != A.rows() || S.cols() != 1) {
    throw ShapeMismatch("row_scale: shapes " + A.shape_str() + " vs " +
                        S.shape_str());
  }
  const int m = A.rows(), n = A.cols();
  Tensor C = A;
  for (int i = 0; i < m; ++i) {
    const double f = S.data[i];
    for (int j = 0; j < n; ++j) C.data[static_cast<std::size_t>(i) * n + j] *= f;
  }
  return t.custom(std::move(C), {a, s},
                  [a, s, m, n](Tape& tp, const Tensor& og, const Tensor&) {
                    const Tensor& A = tp.value(a);
                    const Tensor& S = tp.value(s);
                    Tensor& ga = tp.grad_buffer(a);
                    Tensor& gs = tp.grad_buffer(s);
                    for (int i = 0; i < m; ++i) {
                      const double f = S.data[i];
                      double acc = 0.0;
                      for (int j = 0; j < n; ++j) {
                        const std::size_t idx = static_cast<std::size_t>(i) * n + j;
                        ga.data[idx] += og.data[idx] * f;
                        acc += og.data[idx] * A.data[idx];
                      }
                      gs.data[i] += acc;
                    }
                  });
}

Var gaussian_radial(Var tau_raw, const Tensor& rho2) {
  Tape& t = *tau_raw.tape;
  const Tensor& raw = t.value(tau_raw);
  if (raw.size() != 1) {
    throw ShapeMismatch("gaussian_radial: tau_raw must be scalar, got " +
                        raw.shape_str());
  }
  const double x = raw.data[0];
  const double tau = (x > 30.0 ? x : std::log1p(std::exp(x))) + 1e-6;
  const int m = rho2.rows();
  Tensor C = Tensor::zeros({m, 1});
  for (int i = 0; i < m; ++i) C.data[i] = std::exp(-rho2.data[i] / tau);
  Tensor r2 = rho2;
  return t.custom(std::move(C), {tau_raw},
                  [tau_raw, r2 = std::move(r2), x, tau](
                      Tape& tp, const Tensor& og, const Tensor& ov) {
                    // d/dtau_raw exp(-rho2/tau) = exp(-rho2/tau) * rho2/tau^2
                    //                             * sigmoid(tau_raw)
                    const double dsp = 1.0 / (1.0 + std::exp(-x));
                    double acc = 0.0;
                    for (std::size_t i = 0; i < ov.data.size(); ++i) {
                      acc += og.data[i] * ov.data[i] * r2.data[i] / (tau * tau);
                    }
                    tp.grad_buffer(tau_raw).data[0] += acc * dsp;
                  });
}

double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& x,
                  double h) {
  Tape tape;
  Var leaf = tape.leaf(x);
  Var loss = f(tape, leaf);
  tape.backward(loss);
  const Tensor analytic = tape.grad(leaf);

  double max_rel = 0.0;
  for (std::size_t i = 0; i < x.data.size(); ++i) {
    Tensor xp = x, xm = x;
    xp.data[i] += h;
    xm.data[i] -= h;
    Tape tp, tm;
    const double fp = tp.value(f(tp, tp.leaf(xp))).data[0];
    const double fm = tm.value(f(tm, tm.leaf(xm))).data[0];
    const double fd = (fp - fm) / (2.0 * h);
    const double rel = std::abs(analytic.data[i] - fd) / (std::abs(fd) + 1e-8);
    if (rel > max_rel) max_rel = rel;
  }
  return max_rel;
}

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grads.size()) {
    throw ShapeMismatch("adam_step: " + std::to_string(params.size()) +
                        " params vs " + std::to_string(grads.size()) + " grads");
  }
  if (state.m.empty()) {
    for (const Tensor& p : params) {
      state.m.push_back(Tensor::zeros(p.shape));
      state.v.push_back(Tensor::zeros(p.shape));
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (params[p].shape != grads[p].shape) {
      throw ShapeMismatch("adam_step: param " + std::to_string(p) + " shape " +
                          params[p].shape_str() + " vs grad " +
                          grads[p].shape_str());
    }
    for (std::size_t i = 0; i < params[p].data.size(); ++i) {
      const double g = grads[p].data[i];
      double& m = state.m[p].data[i];
      double& v = state.v[p].data[i];
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
      const double mhat = m / bc1;
      const double vhat = v / bc2;
      params[p].data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

double clip_by_global_norm(std::vector<Tensor>& grads, double max_norm) {
  double sq = 0.0;
  for (const Tensor& g : grads) {
    for (double v : g.data) sq += v * v;
  }
  const double n = std::sqrt(sq);
  if (n > max_norm && n > 0.0) {
    const double f = max_norm / n;
    for (Tensor& g : grads) {
      for (double& v : g.data) v *= f;
    }
  }
  return n;
}

}  // namespace clcrn::ad
