#include "qmf/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace qmf::ad {

NodeId Tape::push(std::vector<double> v, std::function<void(Tape&)> back) {
  nodes_.push_back(Node{std::move(v), {}, std::move(back)});
  Node& n = nodes_.back();
  n.grad.assign(n.val.size(), 0.0);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::constant(std::vector<double> v) { return push(std::move(v)); }

NodeId Tape::param_row(Parameter& p, int row) {
  std::vector<double> v(p.row(row), p.row(row) + p.cols);
  const bool frozen =
      p.constraint == Parameter::Constraint::frozen ||
      std::find(p.frozen_rows.begin(), p.frozen_rows.end(), row) !=
          p.frozen_rows.end();
  NodeId id = push(std::move(v));
  if (!frozen) {
    Parameter* pp = &p;
    const size_t off = static_cast<size_t>(row) * p.cols;
    nodes_[id].back = [id, pp, off](Tape& t) {
      const auto& g = t.nodes_[id].grad;
      for (size_t j = 0; j < g.size(); ++j) pp->grad[off + j] += g[j];
    };
  }
  return id;
}

NodeId Tape::param_all(Parameter& p) {
  NodeId id = push(p.value);
  if (p.constraint != Parameter::Constraint::frozen) {
    Parameter* pp = &p;
    nodes_[id].back = [id, pp](Tape& t) {
      const auto& g = t.nodes_[id].grad;
      for (size_t j = 0; j < g.size(); ++j) pp->grad[j] += g[j];
      for (int r : pp->frozen_rows)
        std::fill_n(pp->grad.begin() + static_cast<size_t>(r) * pp->cols,
                    pp->cols, 0.0);
    };
  }
  return id;
}

namespace {
void check_same_size(const std::vector<double>& a,
                     const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("tape op: size mismatch");
}
}  // namespace

NodeId Tape::add(NodeId a, NodeId b) {
  check_same_size(nodes_[a].val, nodes_[b].val);
  std::vector<double> v = nodes_[a].val;
  for (size_t j = 0; j < v.size(); ++j) v[j] += nodes_[b].val[j];
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, a, b](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    for (size_t j = 0; j < g.size(); ++j) {
      t.nodes_[a].grad[j] += g[j];
      t.nodes_[b].grad[j] += g[j];
    }
  };
  return id;
}

NodeId Tape::sub(NodeId a, NodeId b) {
  check_same_size(nodes_[a].val, nodes_[b].val);
  std::vector<double> v = nodes_[a].val;
  for (size_t j = 0; j < v.size(); ++j) v[j] -= nodes_[b].val[j];
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, a, b](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    for (size_t j = 0; j < g.size(); ++j) {
      t.nodes_[a].grad[j] += g[j];
      t.nodes_[b].grad[j] -= g[j];
    }
  };
  return id;
}

NodeId Tape::mul(NodeId a, NodeId b) {
  check_same_size(nodes_[a].val, nodes_[b].val);
  std::vector<double> v = nodes_[a].val;
  for (size_t j = 0; j < v.size(); ++j) v[j] *= nodes_[b].val[j];
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, a, b](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    for (size_t j = 0; j < g.size(); ++j) {
      t.nodes_[a].grad[j] += g[j] * t.nodes_[b].val[j];
      t.nodes_[b].grad[j] += g[j] * t.nodes_[a].val[j];
    }
  };
  return id;
}

NodeId Tape::div(NodeId a, NodeId b) {
  check_same_size(nodes_[a].val, nodes_[b].val);
  std::vector<double> v = nodes_[a].val;
  for (size_t j = 0; j < v.size(); ++j) v[j] /= nodes_[b].val[j];
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, a, b](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    for (size_t j = 0; j < g.size(); ++j) {
      const double bv = t.nodes_[b].val[j];
      t.nodes_[a].grad[j] += g[j] / bv;
      t.nodes_[b].grad[j] -= g[j] * t.nodes_[a].val[j] / (bv * bv);
    }
  };
  return id;
}

NodeId Tape::scale(NodeId a, double c) {
  std::vector<double> v = nodes_[a].val;
  for (double& x : v) x *= c;
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, a, c](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    for (size_t j = 0; j < g.size(); ++j) t.nodes_[a].grad[j] += c * g[j];
  };
  return id;
}

NodeId Tape::slice(NodeId a, int offset, int len) {
  const auto& src = nodes_[a].val;
  if (offset < 0 || offset + len > static_cast<int>(src.size()))
    throw std::invalid_argument("slice: out of range");
  std::vector<double> v(src.begin() + offset, src.begin() + offset + len);
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, a, offset](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    for (size_t j = 0; j < g.size(); ++j)
      t.nodes_[a].grad[offset + j] += g[j];
  };
  return id;
}

NodeId Tape::stack(const std::vector<NodeId>& scalars) {
  std::vector<double> v(scalars.size());
  for (size_t j = 0; j < scalars.size(); ++j) v[j] = val1(scalars[j]);
  NodeId id = push(std::move(v));
  std::vector<NodeId> src = scalars;
  nodes_[id].back = [id, src](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    for (size_t j = 0; j < src.size(); ++j) t.nodes_[src[j]].grad[0] += g[j];
  };
  return id;
}

namespace {
template <typename F, typename DF>
NodeId unary(Tape& t, std::vector<Tape::Node>& nodes, NodeId a, F f, DF df);
}

#define QMF_UNARY_OP(NAME, FWD, BWD)                                   \
  NodeId Tape::NAME(NodeId a) {                                        \
    std::vector<double> v = nodes_[a].val;                             \
    for (double& x : v) x = (FWD);                                     \
    NodeId id = push(std::move(v));                                    \
    nodes_[id].back = [id, a](Tape& t) {                               \
      const auto& g = t.nodes_[id].grad;                               \
      const auto& xv = t.nodes_[a].val;                                \
      const auto& yv = t.nodes_[id].val;                               \
      (void)xv;                                                        \
      (void)yv;                                                        \
      for (size_t j = 0; j < g.size(); ++j) {                          \
        const double x = xv[j], y = yv[j];                             \
        (void)x;                                                       \
        (void)y;                                                       \
        t.nodes_[a].grad[j] += g[j] * (BWD);                           \
      }                                                                \
    };                                                                 \
    return id;                                                         \
  }

NodeId Tape::relu(NodeId a) {
  for (double x : nodes_[a].val) {
    kink_gap_ = std::min(kink_gap_, std::abs(x));
    note_branch(x > 0.0 ? 1 : 0);
  }
  std::vector<double> v = nodes_[a].val;
  for (double& x : v) x = x > 0.0 ? x : 0.0;
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, a](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    const auto& xv = t.nodes_[a].val;
    for (size_t j = 0; j < g.size(); ++j)
      t.nodes_[a].grad[j] += xv[j] > 0.0 ? g[j] : 0.0;
  };
  return id;
}

QMF_UNARY_OP(sigmoid, 1.0 / (1.0 + std::exp(-x)), y*(1.0 - y))
QMF_UNARY_OP(tanh_, std::tanh(x), 1.0 - y * y)
QMF_UNARY_OP(exp_, std::exp(x), y)
QMF_UNARY_OP(sqrt_, std::sqrt(x), 0.5 / y)
QMF_UNARY_OP(cos_, std::cos(x), -std::sin(x))
QMF_UNARY_OP(sin_, std::sin(x), std::cos(x))
NodeId Tape::abs_(NodeId a) {
  for (double x : nodes_[a].val) {
    kink_gap_ = std::min(kink_gap_, std::abs(x));
    note_branch(x > 0.0 ? 1 : 0);
  }
  std::vector<double> v = nodes_[a].val;
  for (double& x : v) x = std::abs(x);
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, a](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    const auto& xv = t.nodes_[a].val;
    for (size_t j = 0; j < g.size(); ++j) {
      const double x = xv[j];
      t.nodes_[a].grad[j] += g[j] * (x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0));
    }
  };
  return id;
}

#undef QMF_UNARY_OP

NodeId Tape::sum(NodeId a) {
  double s = 0.0;
  for (double x : nodes_[a].val) s += x;
  NodeId id = push({s});
  nodes_[id].back = [id, a](Tape& t) {
    const double g = t.nodes_[id].grad[0];
    for (double& ga : t.nodes_[a].grad) ga += g;
  };
  return id;
}

NodeId Tape::dot(NodeId a, NodeId b) {
  check_same_size(nodes_[a].val, nodes_[b].val);
  double s = 0.0;
  for (size_t j = 0; j < nodes_[a].val.size(); ++j)
    s += nodes_[a].val[j] * nodes_[b].val[j];
  NodeId id = push({s});
  nodes_[id].back = [id, a, b](Tape& t) {
    const double g = t.nodes_[id].grad[0];
    const auto& av = t.nodes_[a].val;
    const auto& bv = t.nodes_[b].val;
    for (size_t j = 0; j < av.size(); ++j) {
      t.nodes_[a].grad[j] += g * bv[j];
      t.nodes_[b].grad[j] += g * av[j];
    }
  };
  return id;
}

NodeId Tape::matvec(NodeId w, int rows, int cols, NodeId x) {
  if (static_cast<int>(nodes_[w].val.size()) != rows * cols ||
      static_cast<int>(nodes_[x].val.size()) != cols)
    throw std::invalid_argument("matvec: shape mismatch");
  std::vector<double> v(rows, 0.0);
  const auto& wv = nodes_[w].val;
  const auto& xv = nodes_[x].val;
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int c = 0; c < cols; ++c) s += wv[r * cols + c] * xv[c];
    v[r] = s;
  }
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, w, x, rows, cols](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    const auto& wv = t.nodes_[w].val;
    const auto& xv = t.nodes_[x].val;
    for (int r = 0; r < rows; ++r) {
      const double gr = g[r];
      if (gr == 0.0) continue;
      for (int c = 0; c < cols; ++c) {
        t.nodes_[w].grad[r * cols + c] += gr * xv[c];
        t.nodes_[x].grad[c] += gr * wv[r * cols + c];
      }
    }
  };
  return id;
}

NodeId Tape::affine(NodeId w, NodeId b, int rows, int cols, NodeId x) {
  return add(matvec(w, rows, cols, x), b);
}

NodeId Tape::kron(NodeId a, NodeId b) {
  const auto& av = nodes_[a].val;
  const auto& bv = nodes_[b].val;
  const int na = static_cast<int>(av.size());
  const int nb = static_cast<int>(bv.size());
  std::vector<double> v(static_cast<size_t>(na) * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) v[i * nb + j] = av[i] * bv[j];
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, a, b, na, nb](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    const auto& av = t.nodes_[a].val;
    const auto& bv = t.nodes_[b].val;
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) {
        const double gij = g[i * nb + j];
        t.nodes_[a].grad[i] += gij * bv[j];
        t.nodes_[b].grad[j] += gij * av[i];
      }
  };
  return id;
}

NodeId Tape::div_by_scalar(NodeId x, NodeId s, double eps) {
  const double d = val1(s) + eps;
  std::vector<double> v = nodes_[x].val;
  for (double& e : v) e /= d;
  NodeId id = push(std::move(v));
  nodes_[id].back = [id, x, s, d](Tape& t) {
    const auto& g = t.nodes_[id].grad;
    const auto& xv = t.nodes_[x].val;
    double gs = 0.0;
    for (size_t j = 0; j < g.size(); ++j) {
      t.nodes_[x].grad[j] += g[j] / d;
      gs -= g[j] * xv[j] / (d * d);
    }
    t.nodes_[s].grad[0] += gs;
  };
  return id;
}

NodeId Tape::max_of(const std::vector<NodeId>& scalars) {
  if (scalars.empty()) throw std::invalid_argument("max_of: empty");
  size_t arg = 0;
  double best = val1(scalars[0]);
  for (size_t j = 1; j < scalars.size(); ++j)
    if (val1(scalars[j]) > best) {  // strict: ties keep the smallest index
      best = val1(scalars[j]);
      arg = j;
    }
  note_branch(arg);
  NodeId id = push({best});
  const NodeId winner = scalars[arg];
  nodes_[id].back = [id, winner](Tape& t) {
    t.nodes_[winner].grad[0] += t.nodes_[id].grad[0];
  };
  return id;
}

NodeId Tape::mean_of(const std::vector<NodeId>& scalars) {
  if (scalars.empty()) throw std::invalid_argument("mean_of: empty");
  return scale(sum(stack(scalars)), 1.0 / static_cast<double>(scalars.size()));
}

NodeId Tape::softmax(NodeId a) {
  // Shift by the max for stability; the shift contributes no gradient
  // because softmax is invariant to it.
  const size_t n = nodes_[a].val.size();
  size_t arg = 0;
  for (size_t j = 1; j < n; ++j)
    if (nodes_[a].val[j] > nodes_[a].val[arg]) arg = j;
  NodeId m = slice(a, static_cast<int>(arg), 1);
  NodeId ones = constant(std::vector<double>(n, 1.0));
  NodeId shifted = sub(a, kron(m, ones));
  NodeId e = exp_(shifted);
  return div_by_scalar(e, sum(e));
}

void Tape::backward(NodeId root) {
  if (nodes_[root].val.size() != 1)
    throw std::invalid_argument("backward: root must be scalar");
  for (auto& n : nodes_) std::fill(n.grad.begin(), n.grad.end(), 0.0);
  nodes_[root].grad[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
    if (it->back) it->back(*this);
}

double grad_norm(const std::vector<Parameter*>& params) {
  double s = 0.0;
  for (const Parameter* p : params)
    for (double g : p->grad) s += g * g;
  return std::sqrt(s);
}

void clip_global_norm(std::vector<Parameter*>& params, double max_norm) {
  const double n = grad_norm(params);
  if (n <= max_norm || n == 0.0) return;
  const double f = max_norm / n;
  for (Parameter* p : params)
    for (double& g : p->grad) g *= f;
}

void rmsprop_step(std::vector<Parameter*>& params, double lr, double decay,
                  double eps) {
  for (Parameter* p : params) {
    if (p->constraint == Parameter::Constraint::frozen) continue;
    if (p->rms_acc.size() != p->value.size())
      p->rms_acc.assign(p->value.size(), 0.0);
    for (int r : p->frozen_rows)
      std::fill_n(p->grad.begin() + static_cast<size_t>(r) * p->cols, p->cols,
                  0.0);
    for (size_t j = 0; j < p->value.size(); ++j) {
      const double g = p->grad[j];
      p->rms_acc[j] = decay * p->rms_acc[j] + (1.0 - decay) * g * g;
      p->value[j] -= lr * g / std::sqrt(p->rms_acc[j] + eps);
    }
  }
}

}  // namespace qmf::ad
