#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entevolve/quantum.hpp"
#include "entevolve/report.hpp"

namespace entevolve {

enum class MeasureKind { GConcurrence, Concurrence2 };
enum class Exactness { Exact, UpperBound };

struct MeasureId {
  MeasureKind kind = MeasureKind::GConcurrence;
  std::size_t d = 2;
  friend bool operator==(const MeasureId&, const MeasureId&) = default;
};

struct MeasureValue {
  double value = 0.0;
  MeasureId measure;
  Exactness exactness = Exactness::Exact;
  // Sampling budget behind an UpperBound value.
  std::optional<std::size_t> budget;
};

/// G-concurrence d * det([psi]^dagger [psi])^(1/d) of a d x d state.
///
/// Exactly 0 when the smallest singular value of [psi] is at most 1e-8
/// times the largest (Schmidt rank below d).
///
/// Applied to raw (unnormalized) amplitudes it is homogeneous of degree 2 in
/// the amplitudes, i.e. degree 1 in |psi><psi|.
MeasureValue g_concurrence_pure(const PureState& psi);
// Same value through the Schmidt coefficients: d * prod w_k^(1/d).
double g_concurrence_schmidt(const PureState& psi);

MeasureValue concurrence2_pure(const PureState& psi);
// Exact two-qubit concurrence max(0, l1 - l2 - l3 - l4); degree 1 in rho,
// so unnormalized operators are accepted.
MeasureValue wootters_concurrence(const DensityOperator& rho);
double wootters_concurrence(const Matrix& rho);

// |det m|^(2/n) for an n x n matrix.
double det_factor(const Matrix& m);

VerificationReport check_factorisation_lemma(const Matrix& m, const PureState& psi,
                                             double tol = 1e-8);

// C[(gA (x) gB) X (gA (x) gB)^dagger] against C[X] for `trials` draws of
// gA, gB in SL(d).  Pure input uses the G-concurrence, two-qubit density
// input the Wootters concurrence.
VerificationReport check_sl_invariance(const PureState& psi, std::uint64_t seed,
                                       std::size_t trials = 1, double tol = 1e-8);
VerificationReport check_sl_invariance(const DensityOperator& rho, std::uint64_t seed,
                                       std::size_t trials = 1, double tol = 1e-8);
// C[r X] against r C[X].  For pure input the amplitudes are scaled by sqrt(r).
VerificationReport check_homogeneity(const PureState& psi, double r, double tol = 1e-8);
VerificationReport check_homogeneity(const DensityOperator& rho, double r,
                                     double tol = 1e-8);

enum class FactorizationMode { TwoQubitExact, SingleKrausPure, SampledUpperBound };
std::string_view to_string(FactorizationMode mode);
std::optional<FactorizationMode> parse_factorization_mode(std::string_view s);

struct SamplingOptions {
  std::size_t budget = 200;
  std::uint64_t seed = 0;
  // Decompositions use between rank and rank + extra_terms pure states.
  std::size_t extra_terms = 2;
};

/// C[($ (x) 1)|psi><psi|] against C[($ (x) 1)|Phi+><Phi+|] * C[|psi><psi|].
VerificationReport check_evolution_factorization(const KrausChannel& c,
                                                 const PureState& psi,
                                                 FactorizationMode mode,
                                                 double tol = 1e-8,
                                                 SamplingOptions sampling = {});

struct DecompositionSample {
  std::vector<double> probabilities;
  std::vector<PureState> states;
  double residual = 0.0;
  double average = 0.0;
};

/// Decomposition rho = sum_j |t_j><t_j| with t_j = sum_i u_ji sqrt(l_i) e_i,
/// u an m x r isometry and (l_i, e_i) the nonzero spectrum of rho.
DecompositionSample decomposition_from_isometry(const DensityOperator& rho,
                                                const Matrix& isometry);

/// Minimum of sum_i p_i C[psi_i] over sampled decompositions.  Candidate 0
/// is the spectral decomposition; candidate j > 0 mixes the square-root
/// factor with a random isometry drawn from (seed, j), so the value is
/// non-increasing in the budget for a fixed seed.
MeasureValue convex_roof_upper_bound(const DensityOperator& rho, SamplingOptions sampling);

// Best decomposition found by convex_roof_upper_bound.
DecompositionSample convex_roof_best_decomposition(const DensityOperator& rho,
                                                   SamplingOptions sampling);

/// C[($ (x) 1) rho] <= C[($ (x) 1)|Phi+><Phi+|] * C[rho] for two qubits,
/// both sides exact.  The record residual is the violation max(0, lhs - rhs).
VerificationReport check_mixed_upper_bound(const KrausChannel& c, const DensityOperator& rho,
                                           double tol = 1e-10);

struct WeightedMap {
  double weight = 0.0;
  Matrix op;
};

/// The wire-bent dual of a mixed state: X -> sum_k p_k (A_k (x) 1) X (A_k (x) 1)^dagger
/// with A_k = sqrt(d) [psi_k] over the spectral decomposition of rho.
class Superoperator {
 public:
  explicit Superoperator(std::vector<WeightedMap> terms, std::size_t other_dim);

  const std::vector<WeightedMap>& terms() const { return terms_; }
  Matrix apply(const Matrix& x) const;
  DensityOperator apply(const DensityOperator& x) const;
  // sum_k p_k A_k A_k^dagger and sum_k p_k A_k^dagger A_k.
  Matrix output_identity_image() const;
  Matrix trace_image() const;

 private:
  std::vector<WeightedMap> terms_;
  std::size_t other_dim_;
};

Superoperator mixed_state_dual(const DensityOperator& rho, double tol = 1e-12);

}  // namespace entevolve
