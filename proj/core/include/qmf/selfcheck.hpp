// Built-in verification: randomized quantum-algebra properties with
// independent oracles, separability checks and the finite-difference
// gradient check over tiny full models.
#pragma once

#include <string>
#include <vector>

namespace qmf {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Density-matrix invariants, Born completeness, partial trace against a
/// brute-force index-summation oracle, statistical equivalence
/// tr(M rho_A) = tr((M (x) I) rho). Dims up to [4,4,4].
std::vector<CheckResult> check_quantum_algebra(int trials = 1000,
                                               unsigned seed = 20240801);

/// Sentence states as mixtures of product kets: reduced states equal the
/// unimodal mixtures; product kets pass the pure-state separability test.
std::vector<CheckResult> check_separability(int trials = 200,
                                            unsigned seed = 20240802);

/// Full-model analytic gradients vs central finite differences (step 1e-5)
/// on random tiny instances (L=3, dims 2/2/2, K=2, h=4), excluding samples
/// near the L1 kink or a max-pool tie.
std::vector<CheckResult> check_gradients(int instances = 20,
                                         unsigned seed = 20240803);

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace qmf
