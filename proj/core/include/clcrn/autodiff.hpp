// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_AUTODIFF_HPP
#define CLCRN_AUTODIFF_HPP

#include <functional>
#include <string>
#include <vector>

#include "clcrn/errors.hpp"

namespace clcrn::ad {

/// Dense row-major tensor of 64-bit floats. Rank is 1 or 2 everywhere in
/// this codebase; time is handled by lists of matrices.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::vector<int> s, std::vector<double> d)
      : shape(std::move(s)), data(std::move(d)) {}

  static Tensor zeros(std::vector<int> shape);
  static Tensor scalar(double v) { return Tensor({1}, {v}); }

  std::size_t size() const { return data.size(); }
  int rows() const { return shape.empty() ? 0 : shape[0]; }
  int cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols() + c]; }

  std::string shape_str() const;
};

class Tape;

/// Handle to a node on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
};

/// Reverse-mode tape. Nodes are appended in topological order during the
/// forward pass; backward() walks them once in reverse. A tape is
/// single-owner while tracing; run separate tapes in parallel instead of
/// sharing one.
class Tape {
 public:
  using BackwardFn =
      std::function<void(Tape&, const Tensor& out_grad, const Tensor& out_value)>;

  Var leaf(Tensor value);
  Var constant(Tensor value) { return leaf(std::move(value)); }

  const Tensor& value(Var v) const;
  /// Gradient of the last backward() loss w.r.t. node v (zeros if v did not
  /// participate).
  const Tensor& grad(Var v) const;

  void backward(Var loss);

  /// Appends a node with a caller-supplied backward rule. Exposed so that
  /// structured operations (e.g. neighborhood aggregation) can register
  /// custom gradients.
  Var custom(Tensor value, std::vector<Var> parents, BackwardFn fn);

  void accumulate_grad(Var v, const Tensor& g);
  Tensor& grad_buffer(Var v);

  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<int> parents;
    BackwardFn back;
  };
  void check(Var v) const;
  std::vector<Node> nodes_;
};

// Forward operations. All record to the tape of their inputs.
Var matmul(Var a, Var b);
Var add(Var a, Var b);         // same shape, or matrix + bias row vector
Var sub(Var a, Var b);
Var hadamard(Var a, Var b);
Var concat_cols(Var a, Var b);
Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);                // input clamped at 700 to keep outputs finite
Var softplus(Var a);
Var sum(Var a);                // scalar
Var scale(Var a, double c);
Var affine(Var a, double mul, double addend);  // mul*a + addend elementwise
Var mean_abs_error(Var pred, Var target);      // scalar; subgradient 0 at 0
/// Scales every row of a by the matching entry of column vector s (R x 1).
Var row_scale(Var a, Var s);
/// exp(-rho2 / tau) with tau = softplus(tau_raw) + 1e-6; rho2 is a constant
/// column of squared radii, tau_raw a scalar leaf.
Var gaussian_radial(Var tau_raw, const Tensor& rho2);

/// Max relative error between analytic gradient and central differences of
/// f at x. f receives a fresh tape and a leaf for x and returns a scalar.
double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& x,
                  double h = 1e-5);

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long step = 0;
};

/// One bias-corrected Adam update over a parameter list (in place).
void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads,
               AdamState& state, const AdamConfig& cfg);

/// Rescales gradients so their global L2 norm is at most max_norm.
/// Returns the pre-clip norm.
double clip_by_global_norm(std::vector<Tensor>& grads, double max_norm);

}  // namespace clcrn::ad

#endif
