// SPDX-License-Identifier: Apache-2.0
#include "clcrn/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "clcrn/errors.hpp"
#include "clcrn/rng.hpp"

namespace clcrn {

KernelComponents components_from_string(const std::string& csv) {
  KernelComponents c{false, false, false};
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "mlp") {
      c.mlp = true;
    } else if (item == "angle") {
      c.angle = true;
    } else if (item == "distance") {
      c.distance = true;
    } else if (!item.empty()) {
      throw ConfigError("unknown kernel component '" + item +
                        "' (mlp|angle|distance)");
    }
  }
  if (!c.mlp && !c.angle && !c.distance) {
    throw ConfigError("kernel components: at least one of mlp,angle,distance");
  }
  return c;
}

std::string to_string(const KernelComponents& c) {
  std::string s;
  if (c.mlp) s += "mlp";
  if (c.angle) s += s.empty() ? "angle" : ",angle";
  if (c.distance) s += s.empty() ? "distance" : ",distance";
  return s;
}

CondLocalKernel CondLocalKernel::init(int heads, KernelComponents comps,
                                      std::uint64_t seed, double tau_init,
                                      const std::vector<int>& hidden) {
  if (heads < 1) throw ConfigError("kernel heads must be >= 1");
  CondLocalKernel k;
  k.components = comps;
  Rng rng(seed);
  std::vector<int> widths;
  widths.push_back(5);  // [phi_rel, z_rel] ++ center xyz
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(heads);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l], fan_out = widths[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    ad::Tensor w = ad::Tensor::zeros({fan_in, fan_out});
    for (double& v : w.data) v = rng.uniform(-bound, bound);
    k.weights.push_back(std::move(w));
    k.biases.push_back(ad::Tensor::zeros({1, fan_out}));
  }
  k.tau_raw = ad::Tensor::scalar(raw_from_tau(tau_init));
  return k;
}

std::vector<double> CondLocalKernel::mlp_eval(
    const std::array<double, 5>& input) const {
  std::vector<double> cur(input.begin(), input.end());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const ad::Tensor& w = weights[l];
    const ad::Tensor& b = biases[l];
    std::vector<double> next(w.cols(), 0.0);
    for (int j = 0; j < w.cols(); ++j) {
      double acc = b.data[j];
      for (int i = 0; i < w.rows(); ++i) acc += cur[i] * w.at(i, j);
      next[j] = std::tanh(acc);
    }
    cur = std::move(next);
  }
  return cur;
}

EdgeSet build_edge_set(const std::vector<NeighborhoodGeometry>& geoms) {
  EdgeSet e;
  e.num_nodes = static_cast<int>(geoms.size());
  e.offsets.reserve(geoms.size() + 1);
  e.offsets.push_back(0);
  int total = 0;
  for (const auto& g : geoms) total += static_cast<int>(g.records.size());
  e.neighbor.reserve(total);
  e.mlp_inputs = ad::Tensor::zeros({total, 5});
  e.rho2 = ad::Tensor::zeros({total, 1});
  e.angle = ad::Tensor::zeros({total, 1});
  int row = 0;
  for (const auto& g : geoms) {
    for (const auto& rec : g.records) {
      e.neighbor.push_back(rec.neighbor_index);
      e.mlp_inputs.at(row, 0) = rec.local.phi_rel;
      e.mlp_inputs.at(row, 1) = rec.local.z_rel;
      e.mlp_inputs.at(row, 2) = g.center_position[0];
      e.mlp_inputs.at(row, 3) = g.center_position[1];
      e.mlp_inputs.at(row, 4) = g.center_position[2];
      e.rho2.data[row] = rec.polar.rho * rec.polar.rho;
      e.angle.data[row] = rec.angle_scale;
      ++row;
    }
    e.offsets.push_back(row);
  }
  return e;
}

KernelLeaves kernel_leaves(ad::Tape& tape, const CondLocalKernel& kernel) {
  KernelLeaves l;
  for (const auto& w : kernel.weights) l.weights.push_back(tape.leaf(w));
  for (const auto& b : kernel.biases) l.biases.push_back(tape.leaf(b));
  l.tau_raw = tape.leaf(kernel.tau_raw);
  return l;
}

ad::Var kernel_weights_var(ad::Tape& tape, const KernelLeaves& leaves,
                           const KernelComponents& components, int heads,
                           const EdgeSet& edges) {
  if (!leaves.weights.empty() &&
      tape.value(leaves.weights.front()).rows() != 5) {
    throw GeometryMismatch("kernel MLP input width must be 5, got " +
                           std::to_string(tape.value(leaves.weights.front()).rows()));
  }
  const int m = edges.num_edges();
  ad::Var base{};
  if (components.mlp) {
    ad::Var h = tape.constant(edges.mlp_inputs);
    for (std::size_t l = 0; l < leaves.weights.size(); ++l) {
      h = ad::tanh(ad::add(ad::matmul(h, leaves.weights[l]), leaves.biases[l]));
    }
    if (tape.value(h).cols() != heads) {
      throw GeometryMismatch("kernel MLP output width " +
                             std::to_string(tape.value(h).cols()) +
                             " does not match heads " + std::to_string(heads));
    }
    base = h;
  } else {
    ad::Tensor ones = ad::Tensor::zeros({m, heads});
    for (double& v : ones.data) v = 1.0;
    base = tape.constant(std::move(ones));
  }

  bool has_scale = false;
  ad::Var scale_col{};
  if (components.distance) {
    scale_col = ad::gaussian_radial(leaves.tau_raw, edges.rho2);
    has_scale = true;
  }
  if (components.angle) {
    ad::Var angle_col = tape.constant(edges.angle);
    scale_col = has_scale ? ad::hadamard(scale_col, angle_col) : angle_col;
    has_scale = true;
  }
  return has_scale ? ad::row_scale(base, scale_col) : base;
}

std::vector<ad::Tensor> kernel_weights(
    const std::vector<NeighborhoodGeometry>& geoms,
    const CondLocalKernel& kernel) {
  const EdgeSet edges = build_edge_set(geoms);
  ad::Tape tape;
  const KernelLeaves leaves = kernel_leaves(tape, kernel);
  const ad::Var w = kernel_weights_var(tape, leaves, kernel.components,
                                       kernel.heads(), edges);
  const ad::Tensor& flat = tape.value(w);
  std::vector<ad::Tensor> out;
  out.reserve(geoms.size());
  for (int i = 0; i < edges.num_nodes; ++i) {
    const int lo = edges.offsets[i], hi = edges.offsets[i + 1];
    ad::Tensor block = ad::Tensor::zeros({hi - lo, kernel.heads()});
    std::copy(flat.data.begin() + static_cast<std::size_t>(lo) * kernel.heads(),
              flat.data.begin() + static_cast<std::size_t>(hi) * kernel.heads(),
              block.data.begin());
    out.push_back(std::move(block));
  }
  return out;
}

ad::Var clc_aggregate(ad::Var signals, ad::Var weights, const EdgeSet& edges) {
  ad::Tape& t = *signals.tape;
  const ad::Tensor& X = t.value(signals);
  const ad::Tensor& W = t.value(weights);
  const int n = edges.num_nodes;
  const int din = X.cols();
  const int heads = W.cols();
  if (X.rows() != n) {
    throw ShapeMismatch("clc_aggregate: signals rows " +
                        std::to_string(X.rows()) + " vs " + std::to_string(n) +
                        " graph nodes");
  }
  if (W.rows() != edges.num_edges()) {
    throw ShapeMismatch("clc_aggregate: weights rows " +
                        std::to_string(W.rows()) + " vs " +
                        std::to_string(edges.num_edges()) + " edges");
  }
  ad::Tensor Y = ad::Tensor::zeros({n, din * heads});
  for (int i = 0; i < n; ++i) {
    double* yrow = &Y.data[static_cast<std::size_t>(i) * din * heads];
    for (int e = edges.offsets[i]; e < edges.offsets[i + 1]; ++e) {
      const double* xrow =
          &X.data[static_cast<std::size_t>(edges.neighbor[e]) * din];
      const double* wrow = &W.data[static_cast<std::size_t>(e) * heads];
      for (int h = 0; h < heads; ++h) {
        const double wv = wrow[h];
        double* yblk = yrow + h * din;
        for (int d = 0; d < din; ++d) yblk[d] += wv * xrow[d];
      }
    }
  }
  const EdgeSet* ep = &edges;  // edge sets outlive tapes by construction
  return t.custom(
      std::move(Y), {signals, weights},
      [signals, weights, ep, n, din, heads](ad::Tape& tp, const ad::Tensor& og,
                                            const ad::Tensor&) {
        const ad::Tensor& X = tp.value(signals);
        const ad::Tensor& W = tp.value(weights);
        ad::Tensor& gx = tp.grad_buffer(signals);
        ad::Tensor& gw = tp.grad_buffer(weights);
        for (int i = 0; i < n; ++i) {
          const double* grow = &og.data[static_cast<std::size_t>(i) * din * heads];
          for (int e = ep->offsets[i]; e < ep->offsets[i + 1]; ++e) {
            const int j = ep->neighbor[e];
            const double* xrow = &X.data[static_cast<std::size_t>(j) * din];
            double* gxrow = &gx.data[static_cast<std::size_t>(j) * din];
            const double* wrow = &W.data[static_cast<std::size_t>(e) * heads];
            double* gwrow = &gw.data[static_cast<std::size_t>(e) * heads];
            for (int h = 0; h < heads; ++h) {
              const double* gblk = grow + h * din;
              const double wv = wrow[h];
              double acc = 0.0;
              for (int d = 0; d < din; ++d) {
                gxrow[d] += wv * gblk[d];
                acc += gblk[d] * xrow[d];
              }
              gwrow[h] += acc;
            }
          }
        }
      });
}

ad::Var clc_conv(ad::Var signals, ad::Var weights, const EdgeSet& edges,
                 ad::Var layer_w, ad::Var layer_b, Activation act) {
  ad::Var y = clc_aggregate(signals, weights, edges);
  y = ad::add(ad::matmul(y, layer_w), layer_b);
  switch (act) {
    case Activation::kNone: return y;
    case Activation::kTanh: return ad::tanh(y);
    case Activation::kSigmoid: return ad::sigmoid(y);
  }
  return y;
}

double smoothness_probe(const CondLocalKernel& kernel, const SpherePoint& a,
                        const SpherePoint& b,
                        const std::vector<LocalCoord>& probes) {
  double max_diff = 0.0;
  for (const LocalCoord& p : probes) {
    const auto va = kernel.mlp_eval({p.phi_rel, p.z_rel, a.v[0], a.v[1], a.v[2]});
    const auto vb = kernel.mlp_eval({p.phi_rel, p.z_rel, b.v[0], b.v[1], b.v[2]});
    for (std::size_t h = 0; h < va.size(); ++h) {
      max_diff = std::max(max_diff, std::abs(va[h] - vb[h]));
    }
  }
  return max_diff;
}

double lipschitz_bound(const CondLocalKernel& kernel) {
  double prod = 1.0;
  for (const auto& w : kernel.weights) {
    double sq = 0.0;
    for (double v : w.data) sq += v * v;
    prod *= std::sqrt(sq);
  }
  return prod;
}

std::vector<KernelGridRow> kernel_grid_dump(const CondLocalKernel& kernel,
                                            const SpherePoint& center,
                                            int resolution, double radius) {
  if (radius > 1.5707963267948966) {
    throw ConfigError("kernel_grid_dump: radius must be <= pi/2");
  }
  std::vector<KernelGridRow> rows;
  const int heads = kernel.heads();
  rows.reserve(static_cast<std::size_t>(resolution) * resolution * heads);
  const double tau = tau_from_raw(kernel.tau_raw.data[0]);
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      const double phi_rel =
          resolution == 1 ? 0.0 : -radius + 2.0 * radius * ix / (resolution - 1);
      const double z_rel =
          resolution == 1 ? 0.0 : -radius + 2.0 * radius * iy / (resolution - 1);
      double dist_factor = 1.0;
      if (kernel.components.distance) {
        dist_factor = std::exp(-(phi_rel * phi_rel + z_rel * z_rel) / tau);
      }
      std::vector<double> mlp(heads, 1.0);
      if (kernel.components.mlp) {
        mlp = kernel.mlp_eval(
            {phi_rel, z_rel, center.v[0], center.v[1], center.v[2]});
      }
      for (int h = 0; h < heads; ++h) {
        rows.push_back({phi_rel, z_rel, h, dist_factor * mlp[h]});
      }
    }
  }
  return rows;
}

void write_kernel_grid_csv(std::ostream& os,
                           const std::vector<KernelGridRow>& rows) {
  os << "phi_rel,z_rel,head,weight\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%d,%.9g\n", r.phi_rel, r.z_rel,
                  r.head, r.weight);
    os << buf;
  }
}

}  // namespace clcrn
