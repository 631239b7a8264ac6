// Complex linear algebra and quantum-state operations: kets in polar form,
// density matrices with subsystem structure, tensor composition, mixture,
// Born-rule measurement, partial trace and the pure-state separability test.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace qmf {

/// Default tolerances for state validation. Overridable per call.
struct Tolerances {
  double hermitian = 1e-9;
  double trace = 1e-9;
  double psd_floor = -1e-8;
  double unit_norm = 1e-9;
};

/// Complex unit vector in modulus-argument parametrization.
/// moduli are non-negative with unit L2 norm; arguments are free radians
/// (no wrapping to [-pi, pi] is applied).
struct Ket {
  Eigen::VectorXd moduli;
  Eigen::VectorXd args;

  int dim() const { return static_cast<int>(moduli.size()); }

  /// Rectangular form r_j * exp(i * theta_j).
  Eigen::VectorXcd amplitudes() const;

  void assert_valid(double tol = 1e-9) const;
};

/// Builds a Ket from raw moduli/arguments. Moduli are rescaled to unit
/// L2 norm; arguments are copied verbatim.
Ket ket_from_polar(const Eigen::VectorXd& moduli, const Eigen::VectorXd& args);

/// Basis state |i> of the given dimension.
Ket basis_ket(int dim, int index);

/// Hermitian PSD unit-trace complex matrix with subsystem dimensions.
struct DensityMatrix {
  Eigen::MatrixXcd entries;
  std::vector<int> subsystem_dims;

  int dim() const { return static_cast<int>(entries.rows()); }

  bool is_valid(const Tolerances& tol = {}) const;
  void assert_valid(const Tolerances& tol = {}) const;
};

/// Partition of subsystem indices into kept and traced-out sets.
struct SubsystemCut {
  std::vector<int> keep;  // sorted, non-empty

  /// Complement of `keep` within {0..num_subsystems-1}.
  std::vector<int> trace_out(int num_subsystems) const;
};

/// rho = |k><k|, rank 1, subsystem_dims = [dim].
DensityMatrix pure_density(const Ket& k);

/// Tensor product; moduli multiply, arguments add. Entry (i*dim_b + j) = a_i b_j.
Ket tensor_ket(const Ket& a, const Ket& b);

/// Convex mixture of pure states: rho = sum_i p_i |phi_i><phi_i|.
/// subsystem_dims defaults to the single full dimension when empty.
DensityMatrix mix(const std::vector<Ket>& states, const Eigen::VectorXd& weights,
                  std::vector<int> subsystem_dims = {});

/// Convex mixture of density matrices.
DensityMatrix mix(const std::vector<DensityMatrix>& states,
                  const Eigen::VectorXd& weights);

/// Born rule: p = <lambda| rho |lambda>, imaginary residue discarded,
/// clamped to [0, 1].
double born_probability(const DensityMatrix& rho, const Ket& eigenstate);

/// Born probabilities against each eigenstate. Not normalized across k:
/// the eigenstates may be non-orthogonal.
Eigen::VectorXd measure_all(const DensityMatrix& rho,
                            const std::vector<Ket>& eigenstates);

/// Statistical ensemble of post-measurement states. Probabilities are
/// renormalized to sum 1 (the textbook form assumes an orthogonal basis,
/// where they already do; renormalization extends it to the non-orthogonal
/// eigenstate sets used here and keeps the result a valid DensityMatrix).
DensityMatrix post_measurement_ensemble(const Eigen::VectorXd& probs,
                                        const std::vector<Ket>& eigenstates);

/// Partial trace over the complement of cut.keep. Result carries the kept
/// subsystem dims in their original order.
DensityMatrix partial_trace(const DensityMatrix& rho, const SubsystemCut& cut);

/// tr(rho^2), in [1/dim, 1].
double purity(const DensityMatrix& rho);

/// Pure-state separability across the given bipartition: true iff the
/// reduced state of the kept side is pure (purity >= 1 - tol).
bool is_separable_pure(const Ket& k, const std::vector<int>& subsystem_dims,
                       const SubsystemCut& cut, double tol);

}  // namespace qmf
