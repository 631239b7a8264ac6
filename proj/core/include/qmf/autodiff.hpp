// Reverse-mode differentiation over vector-valued nodes. Complex quantities
// are carried as paired real vectors (real/imag planes), so every complex
// operation decomposes into real tape ops and both planes receive gradients.
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmf::ad {

/// Trainable tensor with its gradient and optimizer state.
struct Parameter {
  std::string name;
  int rows = 0, cols = 1;
  std::vector<double> value;
  std::vector<double> grad;
  std::vector<double> rms_acc;  // RMSprop accumulator, lazily sized

  enum class Constraint { free, unit_norm_moduli, frozen };
  Constraint constraint = Constraint::free;
  std::vector<int> frozen_rows;  // e.g. the PAD embedding row

  Parameter() = default;
  Parameter(std::string n, int r, int c,
            Constraint tag = Constraint::free)
      : name(std::move(n)), rows(r), cols(c),
        value(static_cast<size_t>(r) * c, 0.0),
        grad(static_cast<size_t>(r) * c, 0.0), constraint(tag) {}

  size_t size() const { return value.size(); }
  double* row(int r) { return value.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const {
    return value.data() + static_cast<size_t>(r) * cols;
  }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

using NodeId = int32_t;

/// Single-use computation tape. Nodes are created in topological order;
/// backward() walks them in reverse.
class Tape {
 public:
  struct Node {
    std::vector<double> val;
    std::vector<double> grad;
    std::function<void(Tape&)> back;  // empty for leaves/constants
  };

  // --- leaves ---
  NodeId constant(std::vector<double> v);
  NodeId constant(double v) { return constant(std::vector<double>{v}); }
  /// Row of a parameter table; backward accumulates into p.grad unless frozen.
  NodeId param_row(Parameter& p, int row);
  /// Whole parameter, flattened row-major.
  NodeId param_all(Parameter& p);

  // --- elementwise / structural ops ---
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);        // elementwise
  NodeId div(NodeId a, NodeId b);        // elementwise
  NodeId scale(NodeId a, double c);
  NodeId neg(NodeId a) { return scale(a, -1.0); }
  NodeId slice(NodeId a, int offset, int len);
  NodeId stack(const std::vector<NodeId>& scalars);

  NodeId relu(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId tanh_(NodeId a);
  NodeId exp_(NodeId a);
  NodeId sqrt_(NodeId a);
  NodeId cos_(NodeId a);
  NodeId sin_(NodeId a);
  NodeId abs_(NodeId a);  // subgradient 0 at 0

  // --- reductions / contractions ---
  NodeId sum(NodeId a);
  NodeId dot(NodeId a, NodeId b);
  /// W is rows*cols flattened row-major; returns W x (length rows).
  NodeId matvec(NodeId w, int rows, int cols, NodeId x);
  NodeId affine(NodeId w, NodeId b, int rows, int cols, NodeId x);
  /// Kronecker product of real vectors: out[i*nb+j] = a_i * b_j.
  NodeId kron(NodeId a, NodeId b);
  /// x / (s + eps) with scalar node s, broadcast over x.
  NodeId div_by_scalar(NodeId x, NodeId s, double eps = 0.0);
  /// Max over scalar nodes; ties route the gradient to the smallest index.
  NodeId max_of(const std::vector<NodeId>& scalars);
  NodeId mean_of(const std::vector<NodeId>& scalars);
  /// Numerically stable softmax over a vector node.
  NodeId softmax(NodeId a);

  void backward(NodeId root);

  /// Distance of the closest relu/abs input to its kink, over all nodes
  /// created so far. The gradient check uses it to exclude samples where a
  /// finite-difference step could cross a non-differentiable point.
  double kink_gap() const { return kink_gap_; }

  /// Hash of the piecewise-linear branch decisions taken so far (relu/abs
  /// sign patterns, max-pool winners). Two forward passes over the same
  /// graph landed on the same smooth piece iff the hashes agree; the
  /// gradient check uses this to exclude finite-difference probes that
  /// cross a kink or flip a pooling tie.
  uint64_t branch_hash() const { return branch_hash_; }

  const std::vector<double>& val(NodeId id) const { return nodes_[id].val; }
  double val1(NodeId id) const { return nodes_[id].val.at(0); }
  const std::vector<double>& grad(NodeId id) const { return nodes_[id].grad; }
  size_t node_count() const { return nodes_.size(); }

 private:
  NodeId push(std::vector<double> v, std::function<void(Tape&)> back = {});
  std::vector<Node> nodes_;
  double kink_gap_ = std::numeric_limits<double>::infinity();
  uint64_t branch_hash_ = 14695981039346656037ull;  // FNV-1a
  void note_branch(uint64_t decision) {
    branch_hash_ = (branch_hash_ ^ decision) * 1099511628211ull;
  }
  friend struct TapeOps;
};

/// Global L2 norm of all gradients across parameters.
double grad_norm(const std::vector<Parameter*>& params);

/// Scales all gradients so the global norm is at most max_norm.
void clip_global_norm(std::vector<Parameter*>& params, double max_norm);

/// RMSprop: acc = decay*acc + (1-decay)*g^2; p -= lr * g / sqrt(acc + eps).
/// Frozen parameters and frozen rows are left untouched.
void rmsprop_step(std::vector<Parameter*>& params, double lr,
                  double decay = 0.9, double eps = 1e-8);

}  // namespace qmf::ad
