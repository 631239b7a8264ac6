#include "qmf/measurement.hpp"

#include <cmath>
#include <numbers>

namespace qmf {

Eigen::MatrixXd measure_contexts(const ContextSet& contexts,
                                 const Observable& obs) {
  if (contexts.empty())
    throw std::invalid_argument("measure_contexts: empty context set");
  Eigen::MatrixXd p(obs.aspects(), contexts.size());
  for (size_t c = 0; c < contexts.size(); ++c)
    for (int k = 0; k < obs.aspects(); ++k)
      p(k, static_cast<int>(c)) =
          born_probability(contexts[c].rho, obs.eigenstates[k]);
  return p;
}

Eigen::VectorXd pool_max(const Eigen::MatrixXd& probmatrix) {
  Eigen::VectorXd out(probmatrix.rows());
  for (int k = 0; k < probmatrix.rows(); ++k) {
    double best = probmatrix(k, 0);
    for (int c = 1; c < probmatrix.cols(); ++c)
      if (probmatrix(k, c) > best) best = probmatrix(k, c);
    out[k] = best;
  }
  return out;
}

Eigen::VectorXd pool_avg(const Eigen::MatrixXd& probmatrix) {
  return probmatrix.rowwise().mean();
}

double OutputNet::predict(const Eigen::VectorXd& pooled) const {
  Eigen::VectorXd h(fc1.out);
  for (int r = 0; r < fc1.out; ++r) {
    double s = fc1.b.value[r];
    for (int c = 0; c < fc1.in; ++c) s += fc1.w.value[r * fc1.in + c] * pooled[c];
    h[r] = s > 0.0 ? s : 0.0;
  }
  double y = fc2.b.value[0];
  for (int c = 0; c < fc2.in; ++c) y += fc2.w.value[c] * h[c];
  return y;
}

void project_eigenstates(ad::Parameter& obs_moduli) {
  for (int k = 0; k < obs_moduli.rows; ++k) {
    double* r = obs_moduli.row(k);
    double n = 0.0;
    for (int j = 0; j < obs_moduli.cols; ++j) n += r[j] * r[j];
    n = std::sqrt(n);
    if (n == 0.0) continue;
    for (int j = 0; j < obs_moduli.cols; ++j) r[j] /= n;
  }
}

Observable observable_from_params(const ad::Parameter& obs_moduli,
                                  const ad::Parameter& obs_args) {
  Observable obs;
  const int d = obs_moduli.cols;
  for (int k = 0; k < obs_moduli.rows; ++k) {
    Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(obs_moduli.row(k), d);
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(obs_args.row(k), d);
    // A transiently negative modulus is folded into the argument
    // (-r e^{i a} = r e^{i (a+pi)}), keeping the amplitudes identical.
    for (int j = 0; j < d; ++j)
      if (m[j] < 0.0) {
        m[j] = -m[j];
        a[j] += std::numbers::pi;
      }
    obs.eigenstates.push_back(Ket{m, a});
  }
  return obs;
}

}  // namespace qmf
