// SPDX-License-Identifier: Apache-2.0
#ifndef CLCRN_KERNEL_HPP
#define CLCRN_KERNEL_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clcrn/autodiff.hpp"
#include "clcrn/graph.hpp"

namespace clcrn {

/// Which factors of the kernel product are active. Disabling a component is
/// exactly equivalent to replacing its factor with 1.
struct KernelComponents {
  bool mlp = true;
  bool angle = true;
  bool distance = true;
};

KernelComponents components_from_string(const std::string& csv);
std::string to_string(const KernelComponents& c);

/// Learnable conditional local kernel: an MLP over [relative position (2),
/// center position (3)] with tanh activations, a Gaussian distance scale
/// with learnable bandwidth, and the fixed angular partition.
struct CondLocalKernel {
  std::vector<ad::Tensor> weights;  // per layer, (fan_in x fan_out)
  std::vector<ad::Tensor> biases;   // per layer, (1 x fan_out)
  ad::Tensor tau_raw = ad::Tensor::scalar(0.0);
  KernelComponents components;

  int heads() const { return weights.empty() ? 0 : weights.back().cols(); }

  /// Uniform +-sqrt(6/(fan_in+fan_out)) init; hidden widths default to
  /// {10, 8}. tau_init is the initial Gaussian bandwidth (e.g. the mean
  /// squared neighbor distance of the graph).
  static CondLocalKernel init(int heads, KernelComponents comps,
                              std::uint64_t seed, double tau_init,
                              const std::vector<int>& hidden = {10, 8});

  /// Plain (non-tape) MLP factor for one input [phi_rel, z_rel, x, y, z].
  std::vector<double> mlp_eval(const std::array<double, 5>& input) const;
};

/// Flattened edge view of a neighborhood list, plus the constant kernel
/// inputs. Built once per graph and reused by every forward pass.
struct EdgeSet {
  int num_nodes = 0;
  std::vector<int> offsets;   // size num_nodes + 1
  std::vector<int> neighbor;  // flat neighbor indices, self-loop first
  ad::Tensor mlp_inputs;      // (num_edges x 5)
  ad::Tensor rho2;            // (num_edges x 1)
  ad::Tensor angle;           // (num_edges x 1)

  int num_edges() const { return static_cast<int>(neighbor.size()); }
};

EdgeSet build_edge_set(const std::vector<NeighborhoodGeometry>& geoms);

/// Kernel parameters registered as leaves on a tape.
struct KernelLeaves {
  std::vector<ad::Var> weights;
  std::vector<ad::Var> biases;
  ad::Var tau_raw;
};

KernelLeaves kernel_leaves(ad::Tape& tape, const CondLocalKernel& kernel);

/// Per-edge kernel weights (num_edges x heads) under Eq-style factorization:
/// angle scale * distance scale * MLP factor, ablated factors replaced by 1.
ad::Var kernel_weights_var(ad::Tape& tape, const KernelLeaves& leaves,
                           const KernelComponents& components, int heads,
                           const EdgeSet& edges);

/// Convenience: per-center weight matrices (|N(i)| x heads) without a
/// caller-managed tape.
std::vector<ad::Tensor> kernel_weights(
    const std::vector<NeighborhoodGeometry>& geoms,
    const CondLocalKernel& kernel);

enum class Activation { kNone, kTanh, kSigmoid };

/// Head-wise neighborhood aggregation: output row i is the concatenation
/// over heads e of sum_j weight[edge(i,j), e] * signals[j, :].
/// Shape (N x D_in) -> (N x D_in*heads). Differentiable in both inputs.
ad::Var clc_aggregate(ad::Var signals, ad::Var weights, const EdgeSet& edges);

/// Full conditional local convolution layer: aggregate, then linear map and
/// activation.
ad::Var clc_conv(ad::Var signals, ad::Var weights, const EdgeSet& edges,
                 ad::Var layer_w, ad::Var layer_b, Activation act);

/// Max head-wise difference of the MLP factor between two centers over a
/// shared probe set of relative coordinates.
double smoothness_probe(const CondLocalKernel& kernel, const SpherePoint& a,
                        const SpherePoint& b,
                        const std::vector<LocalCoord>& probes);

/// Upper bound on the kernel's Lipschitz constant: product of layer weight
/// Frobenius norms (tanh is 1-Lipschitz).
double lipschitz_bound(const CondLocalKernel& kernel);

struct KernelGridRow {
  double phi_rel = 0.0;
  double z_rel = 0.0;
  int head = 0;
  double weight = 0.0;
};

/// Evaluates MLP * distance factors on a regular grid of relative positions
/// (angle scale excluded; it depends on the neighbor set).
std::vector<KernelGridRow> kernel_grid_dump(const CondLocalKernel& kernel,
                                            const SpherePoint& center,
                                            int resolution, double radius);

/// CSV with header phi_rel,z_rel,head,weight; floats at 9 significant digits.
void write_kernel_grid_csv(std::ostream& os,
                           const std::vector<KernelGridRow>& rows);

}  // namespace clcrn

#endif
