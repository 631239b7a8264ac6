#include "qmf/qcore.hpp"

#include <cmath>
#include <complex>
#include <numeric>

namespace qmf {

Eigen::VectorXcd Ket::amplitudes() const {
  Eigen::VectorXcd amp(moduli.size());
  for (int j = 0; j < moduli.size(); ++j)
    amp[j] = std::polar(moduli[j], args[j]);
  return amp;
}

void Ket::assert_valid(double tol) const {
  if (moduli.size() != args.size())
    throw std::invalid_argument("Ket: moduli/arguments length mismatch");
  if (moduli.size() == 0) throw std::invalid_argument("Ket: empty");
  if ((moduli.array() < 0).any())
    throw std::invalid_argument("Ket: negative modulus");
  if (std::abs(moduli.norm() - 1.0) > tol)
    throw std::invalid_argument("Ket: moduli not unit-norm");
}

Ket ket_from_polar(const Eigen::VectorXd& moduli, const Eigen::VectorXd& args) {
  if (moduli.size() != args.size())
    throw std::invalid_argument("ket_from_polar: length mismatch");
  if (moduli.size() == 0) throw std::invalid_argument("ket_from_polar: empty");
  if ((moduli.array() < 0).any())
    throw std::invalid_argument("ket_from_polar: negative modulus");
  const double n = moduli.norm();
  if (n == 0.0) throw std::invalid_argument("ket_from_polar: all-zero moduli");
  return Ket{moduli / n, args};
}

Ket basis_ket(int dim, int index) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
  m[index] = 1.0;
  return Ket{m, Eigen::VectorXd::Zero(dim)};
}

bool DensityMatrix::is_valid(const Tolerances& tol) const {
  const auto& m = entries;
  if (m.rows() != m.cols()) return false;
  long prod = 1;
  for (int d : subsystem_dims) prod *= d;
  if (prod != m.rows()) return false;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol.hermitian) return false;
  if (std::abs(m.trace() - std::complex<double>(1.0, 0.0)) > tol.trace)
    return false;
  double diag_sum = 0.0;
  for (int j = 0; j < m.rows(); ++j) {
    const auto d = m(j, j);
    if (std::abs(d.imag()) > tol.hermitian) return false;
    if (d.real() < tol.psd_floor) return false;
    diag_sum += d.real();
  }
  if (std::abs(diag_sum - 1.0) > tol.trace) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m,
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= tol.psd_floor;
}

void DensityMatrix::assert_valid(const Tolerances& tol) const {
  if (!is_valid(tol))
    throw std::runtime_error("DensityMatrix: invariant violation");
}

std::vector<int> SubsystemCut::trace_out(int num_subsystems) const {
  std::vector<int> out;
  for (int s = 0; s < num_subsystems; ++s) {
    bool kept = false;
    for (int k : keep) kept = kept || (k == s);
    if (!kept) out.push_back(s);
  }
  return out;
}

DensityMatrix pure_density(const Ket& k) {
  const Eigen::VectorXcd a = k.amplitudes();
  return DensityMatrix{a * a.adjoint(), {k.dim()}};
}

Ket tensor_ket(const Ket& a, const Ket& b) {
  const int na = a.dim(), nb = b.dim();
  Eigen::VectorXd m(na * nb), th(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      m[i * nb + j] = a.moduli[i] * b.moduli[j];
      th[i * nb + j] = a.args[i] + b.args[j];
    }
  return Ket{m, th};
}

namespace {

void check_weights(const Eigen::VectorXd& w) {
  if (w.size() == 0) throw std::invalid_argument("mix: empty weight vector");
  if ((w.array() < 0).any())
    throw std::invalid_argument("mix: negative weight");
  if (std::abs(w.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("mix: weights do not sum to 1");
}

}  // namespace

DensityMatrix mix(const std::vector<Ket>& states, const Eigen::VectorXd& weights,
                  std::vector<int> subsystem_dims) {
  check_weights(weights);
  if (static_cast<int>(states.size()) != weights.size())
    throw std::invalid_argument("mix: states/weights size mismatch");
  const int d = states.front().dim();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != d)
      throw std::invalid_argument("mix: dimension mismatch");
    const Eigen::VectorXcd a = states[i].amplitudes();
    rho.noalias() += weights[static_cast<int>(i)] * (a * a.adjoint());
  }
  if (subsystem_dims.empty()) subsystem_dims = {d};
  return DensityMatrix{std::move(rho), std::move(subsystem_dims)};
}

DensityMatrix mix(const std::vector<DensityMatrix>& states,
                  const Eigen::VectorXd& weights) {
  check_weights(weights);
  if (static_cast<int>(states.size()) != weights.size())
    throw std::invalid_argument("mix: states/weights size mismatch");
  const int d = states.front().dim();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != d)
      throw std::invalid_argument("mix: dimension mismatch");
    rho.noalias() += weights[static_cast<int>(i)] * states[i].entries;
  }
  return DensityMatrix{std::move(rho), states.front().subsystem_dims};
}

double born_probability(const DensityMatrix& rho, const Ket& eigenstate) {
  if (eigenstate.dim() != rho.dim())
    throw std::invalid_argument("born_probability: dimension mismatch");
  const Eigen::VectorXcd v = eigenstate.amplitudes();
  const std::complex<double> p = v.adjoint() * rho.entries * v;
  return std::clamp(p.real(), 0.0, 1.0);
}

Eigen::VectorXd measure_all(const DensityMatrix& rho,
                            const std::vector<Ket>& eigenstates) {
  Eigen::VectorXd p(eigenstates.size());
  for (size_t k = 0; k < eigenstates.size(); ++k)
    p[static_cast<int>(k)] = born_probability(rho, eigenstates[k]);
  return p;
}

DensityMatrix post_measurement_ensemble(const Eigen::VectorXd& probs,
                                        const std::vector<Ket>& eigenstates) {
  if (eigenstates.empty() || probs.size() == 0)
    throw std::invalid_argument("post_measurement_ensemble: empty input");
  const double s = probs.sum();
  if (s <= 0.0)
    throw std::invalid_argument("post_measurement_ensemble: zero total probability");
  return mix(eigenstates, probs / s);
}

DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemCut& cut) {
  const int n = static_cast<int>(rho.subsystem_dims.size());
  if (n < 2)
    throw std::invalid_argument("partial_trace: single-subsystem input");
  if (cut.keep.empty())
    throw std::invalid_argument("partial_trace: empty keep set");
  for (int k : cut.keep)
    if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: bad cut");
  for (size_t i = 1; i < cut.keep.size(); ++i)
    if (cut.keep[i] <= cut.keep[i - 1])
      throw std::invalid_argument("partial_trace: keep not strictly sorted");

  const auto& dims = rho.subsystem_dims;
  const std::vector<int> traced = cut.trace_out(n);

  // Strides of each subsystem in the flattened index (row-major).
  std::vector<long> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

  std::vector<int> keep_dims;
  long dk = 1, dt = 1;
  for (int s : cut.keep) {
    keep_dims.push_back(dims[s]);
    dk *= dims[s];
  }
  for (int s : traced) dt *= dims[s];

  // Flattened full index for a (kept multi-index, traced multi-index) pair.
  auto full_index = [&](long ik, long it) {
    long idx = 0;
    long rk = ik;
    for (int p = static_cast<int>(cut.keep.size()) - 1; p >= 0; --p) {
      const int s = cut.keep[p];
      idx += (rk % dims[s]) * stride[s];
      rk /= dims[s];
    }
    long rt = it;
    for (int p = static_cast<int>(traced.size()) - 1; p >= 0; --p) {
      const int s = traced[p];
      idx += (rt % dims[s]) * stride[s];
      rt /= dims[s];
    }
    return idx;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (long r = 0; r < dk; ++r)
    for (long c = 0; c < dk; ++c) {
      std::complex<double> acc = 0.0;
      for (long t = 0; t < dt; ++t)
        acc += rho.entries(full_index(r, t), full_index(c, t));
      out(r, c) = acc;
    }
  return DensityMatrix{std::move(out), std::move(keep_dims)};
}

double purity(const DensityMatrix& rho) {
  return (rho.entries * rho.entries).trace().real();
}

bool is_separable_pure(const Ket& k, const std::vector<int>& subsystem_dims,
                       const SubsystemCut& cut, double tol) {
  DensityMatrix rho = pure_density(k);
  rho.subsystem_dims = subsystem_dims;
  return purity(partial_trace(rho, cut)) >= 1.0 - tol;
}

}  // namespace qmf
