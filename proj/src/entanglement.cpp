#include "entevolve/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "entevolve/random.hpp"

namespace entevolve {

namespace {

void require_square_state(const PureState& psi, const char* where) {
  if (!psi.dims().square()) {
    std::ostringstream os;
    os << where << " needs a d x d bipartition, got " << psi.dims().a << " x "
       << psi.dims().b;
    throw Error(ErrorCode::NonSquare, os.str());
  }
}

void require_two_qubit(BipartiteDims dims, const char* where) {
  if (dims.a != 2 || dims.b != 2) {
    throw Error(ErrorCode::DimensionMismatch, std::string(where) + " needs two qubits");
  }
}

// (M (x) 1)|psi> and friends act on the coefficient matrix directly:
// (X (x) Y)|psi>  <->  X [psi] Y^T.
PureState act_local(const Matrix& x, const PureState& psi, const Matrix& y) {
  return state_from_map(x * map_from_state(psi) * y.transpose());
}

Matrix identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return Matrix::Identity(n, n);
}

Matrix spin_flip() {
  // sigma_y (x) sigma_y is real.
  Matrix y = Matrix::Zero(4, 4);
  y(0, 3) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  y(3, 0) = -1.0;
  return y;
}

TrialRecord compare(std::size_t trial, double lhs, double rhs, double tol) {
  TrialRecord r;
  r.trial = trial;
  r.lhs = lhs;
  r.rhs = rhs;
  r.residual = std::abs(lhs - rhs);
  r.pass = r.residual <= tol;
  return r;
}

constexpr double kRankThreshold = 1e-8;

double raw_g_concurrence(const Vector& amplitudes, std::size_t d) {
  return g_concurrence_pure(PureState::raw({d, d}, amplitudes)).value;
}

}  // namespace

MeasureValue g_concurrence_pure(const PureState& psi) {
  require_square_state(psi, "G-concurrence");
  const std::size_t d = psi.dims().a;
  const Matrix a = map_from_state(psi);
  MeasureValue out;
  out.measure = {MeasureKind::GConcurrence, d};
  // The d-th root inflates round-off in det of a rank-deficient [psi]
  // (1e-32 -> 1e-6 at d = 6), so Schmidt rank < d, judged relative to the
  // largest singular value, is exactly 0.
  const Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(sv.size() - 1) <= kRankThreshold * sv(0)) return out;
  // det(A^dagger A) is real and >= 0; only round-off can push it below.
  const double det = std::max(0.0, (a.adjoint() * a).determinant().real());
  out.value = static_cast<double>(d) * std::pow(det, 1.0 / static_cast<double>(d));
  return out;
}

double g_concurrence_schmidt(const PureState& psi) {
  require_square_state(psi, "G-concurrence");
  const auto dec = schmidt(psi);
  const double d = static_cast<double>(psi.dims().a);
  double prod = 1.0;
  for (double w : dec.coefficients) prod *= std::pow(w, 1.0 / d);
  return d * prod;
}

MeasureValue concurrence2_pure(const PureState& psi) {
  require_two_qubit(psi.dims(), "concurrence");
  MeasureValue out;
  out.measure = {MeasureKind::Concurrence2, 2};
  out.value = 2.0 * std::abs(map_from_state(psi).determinant());
  return out;
}

double wootters_concurrence(const Matrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw Error(ErrorCode::DimensionMismatch, "Wootters concurrence needs a 4x4 matrix");
  }
  const Matrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_rho = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
  // The lambdas are the singular values of sqrt(rho) Y sqrt(rho)^T, which
  // equal the square roots of the eigenvalues of rho Y rho^* Y.
  const Matrix b = sqrt_rho * spin_flip() * sqrt_rho.transpose();
  Eigen::JacobiSVD<Matrix> svd(b);
  const auto& s = svd.singularValues();
  return std::max(0.0, s(0) - s(1) - s(2) - s(3));
}

MeasureValue wootters_concurrence(const DensityOperator& rho) {
  require_two_qubit(rho.dims(), "Wootters concurrence");
  MeasureValue out;
  out.measure = {MeasureKind::Concurrence2, 2};
  out.value = wootters_concurrence(rho.matrix());
  return out;
}

double det_factor(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NonSquare, "det_factor needs a square matrix");
  }
  return std::pow(std::abs(m.determinant()), 2.0 / static_cast<double>(m.rows()));
}

VerificationReport check_factorisation_lemma(const Matrix& m, const PureState& psi,
                                             double tol) {
  require_square_state(psi, "factorisation lemma");
  const std::size_t d = psi.dims().a;
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "factorisation lemma needs a d x d matrix matching the state");
  }
  VerificationReport report;
  report.check = "lemma";
  report.mode = "g-concurrence";
  report.tolerance = tol;
  const double lhs = g_concurrence_pure(act_local(m, psi, identity(d))).value;
  const double rhs = det_factor(m) * g_concurrence_pure(psi).value;
  TrialRecord rec = compare(0, lhs, rhs, tol);
  if (std::abs(m.determinant()) < 1e-12) rec.detail = "singular";
  report.records.push_back(rec);
  return report;
}

VerificationReport check_sl_invariance(const PureState& psi, std::uint64_t seed,
                                       std::size_t trials, double tol) {
  require_square_state(psi, "SL invariance");
  const std::size_t d = psi.dims().a;
  VerificationReport report;
  report.check = "sl-invariance";
  report.mode = "pure";
  report.seed = seed;
  report.tolerance = tol;
  const double base = g_concurrence_pure(psi).value;
  for (std::size_t t = 0; t < trials; ++t) {
    const Matrix ga = random_special_linear(d, derive_seed(seed, 2 * t));
    const Matrix gb = random_special_linear(d, derive_seed(seed, 2 * t + 1));
    const double moved = g_concurrence_pure(act_local(ga, psi, gb)).value;
    report.records.push_back(compare(t, moved, base, tol));
  }
  return report;
}

VerificationReport check_sl_invariance(const DensityOperator& rho, std::uint64_t seed,
                                       std::size_t trials, double tol) {
  require_two_qubit(rho.dims(), "SL invariance");
  VerificationReport report;
  report.check = "sl-invariance";
  report.mode = "two-qubit";
  report.seed = seed;
  report.tolerance = tol;
  const double base = wootters_concurrence(rho.matrix());
  for (std::size_t t = 0; t < trials; ++t) {
    const Matrix g = kron(random_special_linear(2, derive_seed(seed, 2 * t)),
                          random_special_linear(2, derive_seed(seed, 2 * t + 1)));
    const double moved = wootters_concurrence(Matrix(g * rho.matrix() * g.adjoint()));
    report.records.push_back(compare(t, moved, base, tol));
  }
  return report;
}

VerificationReport check_homogeneity(const PureState& psi, double r, double tol) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "homogeneity needs r > 0");
  VerificationReport report;
  report.check = "homogeneity";
  report.mode = "pure";
  report.tolerance = tol;
  const PureState scaled = PureState::raw(psi.dims(), std::sqrt(r) * psi.amplitudes());
  report.records.push_back(compare(0, g_concurrence_pure(scaled).value,
                                   r * g_concurrence_pure(psi).value, tol));
  return report;
}

VerificationReport check_homogeneity(const DensityOperator& rho, double r, double tol) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "homogeneity needs r > 0");
  require_two_qubit(rho.dims(), "homogeneity");
  VerificationReport report;
  report.check = "homogeneity";
  report.mode = "two-qubit";
  report.tolerance = tol;
  report.records.push_back(compare(0, wootters_concurrence(Matrix(r * rho.matrix())),
                                   r * wootters_concurrence(rho.matrix()), tol));
  return report;
}

std::string_view to_string(FactorizationMode mode) {
  switch (mode) {
    case FactorizationMode::TwoQubitExact: return "two-qubit-exact";
    case FactorizationMode::SingleKrausPure: return "single-kraus-pure";
    case FactorizationMode::SampledUpperBound: return "sampled-upper-bound";
  }
  return "two-qubit-exact";
}

std::optional<FactorizationMode> parse_factorization_mode(std::string_view s) {
  for (auto m : {FactorizationMode::TwoQubitExact, FactorizationMode::SingleKrausPure,
                 FactorizationMode::SampledUpperBound}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Convex roof sampling

namespace {

struct Spectrum {
  Matrix root_factor;  // columns sqrt(l_i) e_i over the nonzero spectrum
  std::size_t d = 0;
};

Spectrum square_root_factor(const DensityOperator& rho) {
  if (!rho.dims().square()) {
    throw Error(ErrorCode::NonSquare, "convex roof needs a d x d bipartition");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  const auto& vals = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(1e-300, vals.cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> keep;
  // Descending so the spectral candidate lists the dominant term first.
  for (Eigen::Index i = vals.size(); i-- > 0;) {
    if (vals(i) > cutoff) keep.push_back(i);
  }
  Spectrum s;
  s.d = rho.dims().a;
  s.root_factor.resize(rho.matrix().rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    s.root_factor.col(static_cast<Eigen::Index>(k)) =
        std::sqrt(vals(keep[k])) * es.eigenvectors().col(keep[k]);
  }
  return s;
}

double roof_average(const Matrix& root, const Matrix& isometry, std::size_t d) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < isometry.rows(); ++j) {
    const Vector t = root * isometry.row(j).transpose();
    total += raw_g_concurrence(t, d);
  }
  return total;
}

Matrix random_isometry(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  const Matrix g = random_complex_matrix(rows, cols, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(rows),
                                               static_cast<Eigen::Index>(cols));
}

// Isometry for candidate j: identity for j = 0, random otherwise.
Matrix candidate_isometry(std::size_t rank, std::size_t j, const SamplingOptions& opts) {
  const auto r = static_cast<Eigen::Index>(rank);
  if (j == 0) return Matrix::Identity(r, r);
  const std::uint64_t s = derive_seed(opts.seed, j);
  Rng rng(s);
  const std::size_t rows = rank + rng.below(opts.extra_terms + 1);
  return random_isometry(rows, rank, derive_seed(s, 1));
}

struct RoofSearch {
  double best = std::numeric_limits<double>::infinity();
  Matrix best_isometry;
  Matrix root;
  std::size_t d = 0;
};

RoofSearch search_roof(const DensityOperator& rho, const SamplingOptions& opts) {
  if (opts.budget == 0) {
    throw Error(ErrorCode::InvalidArgument, "convex roof needs a budget >= 1");
  }
  const Spectrum spec = square_root_factor(rho);
  RoofSearch out;
  out.root = spec.root_factor;
  out.d = spec.d;
  const auto rank = static_cast<std::size_t>(spec.root_factor.cols());
  if (rank == 0) {
    out.best = 0.0;
    out.best_isometry = Matrix::Identity(0, 0);
    return out;
  }
  // A rank-one operator has a single decomposition up to weights.
  const std::size_t budget = rank == 1 ? 1 : opts.budget;
  for (std::size_t j = 0; j < budget; ++j) {
    const Matrix u = candidate_isometry(rank, j, opts);
    const double v = roof_average(spec.root_factor, u, spec.d);
    if (v < out.best) {
      out.best = v;
      out.best_isometry = u;
    }
  }
  return out;
}

}  // namespace

DecompositionSample decomposition_from_isometry(const DensityOperator& rho,
                                                const Matrix& isometry) {
  const Spectrum spec = square_root_factor(rho);
  if (isometry.cols() != spec.root_factor.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "isometry column count must equal the rank of rho");
  }
  DecompositionSample out;
  Matrix rebuilt = Matrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (Eigen::Index j = 0; j < isometry.rows(); ++j) {
    const Vector t = spec.root_factor * isometry.row(j).transpose();
    rebuilt += t * t.adjoint();
    const double p = t.squaredNorm();
    out.average += raw_g_concurrence(t, spec.d);
    if (p <= 0.0) continue;
    out.probabilities.push_back(p);
    out.states.push_back(PureState(rho.dims(), t));
  }
  const double total = std::accumulate(out.probabilities.begin(), out.probabilities.end(), 0.0);
  for (auto& p : out.probabilities) p /= total;
  out.average /= total;
  out.residual = (rebuilt - rho.matrix()).cwiseAbs().maxCoeff();
  return out;
}

MeasureValue convex_roof_upper_bound(const DensityOperator& rho, SamplingOptions sampling) {
  const RoofSearch s = search_roof(rho, sampling);
  MeasureValue out;
  out.value = s.best;
  out.measure = {MeasureKind::GConcurrence, s.d};
  out.exactness = Exactness::UpperBound;
  out.budget = sampling.budget;
  return out;
}

DecompositionSample convex_roof_best_decomposition(const DensityOperator& rho,
                                                   SamplingOptions sampling) {
  const RoofSearch s = search_roof(rho, sampling);
  return decomposition_from_isometry(rho, s.best_isometry);
}

// ---------------------------------------------------------------------------

VerificationReport check_evolution_factorization(const KrausChannel& c,
                                                 const PureState& psi,
                                                 FactorizationMode mode, double tol,
                                                 SamplingOptions sampling) {
  VerificationReport report;
  report.check = "factorization";
  report.mode = std::string(to_string(mode));
  report.tolerance = tol;
  const auto unsupported = [&](const std::string& why) {
    return Error(ErrorCode::UnsupportedMode,
                 std::string(to_string(mode)) + ": " + why);
  };
  if (!c.square() || !psi.dims().square() || psi.dims().a != c.dim_in()) {
    throw unsupported("needs a square channel and a matching d x d state");
  }
  const std::size_t d = c.dim_in();

  switch (mode) {
    case FactorizationMode::TwoQubitExact: {
      if (d != 2) throw unsupported("only defined for d = 2");
      const double lhs = wootters_concurrence(
          apply_one_sided(c, DensityOperator::from_pure(psi), Side::A).matrix());
      const double choi = wootters_concurrence(choi_state(c).matrix());
      TrialRecord rec = compare(0, lhs, choi * concurrence2_pure(psi).value, tol);
      rec.detail = "choi-factor=" + std::to_string(choi);
      report.records.push_back(rec);
      break;
    }
    case FactorizationMode::SingleKrausPure: {
      if (c.size() != 1) throw unsupported("needs exactly one Kraus operator");
      const Matrix& m = c.operators().front();
      const double lhs = g_concurrence_pure(act_local(m, psi, identity(d))).value;
      const double choi =
          g_concurrence_pure(act_local(m, bell_state(d), identity(d))).value;
      TrialRecord rec = compare(0, lhs, choi * g_concurrence_pure(psi).value, tol);
      rec.detail = "choi-factor=" + std::to_string(choi);
      report.records.push_back(rec);
      break;
    }
    case FactorizationMode::SampledUpperBound: {
      // Carry the best sampled decomposition of rho_$ through (1 (x) M^T):
      // it must decompose the evolved state with every term scaled by
      // C[psi], so the two sampled bounds are tied exactly.
      const DensityOperator choi = choi_state(c);
      const RoofSearch roof = search_roof(choi, sampling);
      const double c_psi = g_concurrence_pure(psi).value;
      const Matrix lift = kron(identity(d), std::sqrt(static_cast<double>(d)) *
                                                map_from_state(psi).transpose());
      const Matrix evolved =
          apply_one_sided(c, DensityOperator::from_pure(psi), Side::A).matrix();

      Matrix rebuilt = Matrix::Zero(evolved.rows(), evolved.cols());
      double carried = 0.0;
      for (Eigen::Index j = 0; j < roof.best_isometry.rows(); ++j) {
        const Vector t = lift * (roof.root * roof.best_isometry.row(j).transpose());
        rebuilt += t * t.adjoint();
        carried += raw_g_concurrence(t, d);
      }
      const double rhs = roof.best * c_psi;
      const double scale = std::max(1.0, std::abs(rhs));
      const double value_residual = std::abs(carried - rhs) / scale;
      const double rebuild_residual = (rebuilt - evolved).cwiseAbs().maxCoeff();

      SamplingOptions own = sampling;
      own.seed = derive_seed(sampling.seed, 0x51ed);
      const double lhs = search_roof(
          DensityOperator::unnormalized({d, d}, evolved), own).best;

      TrialRecord rec;
      rec.lhs = lhs;
      rec.rhs = rhs;
      rec.residual = std::max(value_residual, rebuild_residual);
      rec.pass = rec.residual <= tol;
      std::ostringstream os;
      os << "carried=" << carried << " gap=" << (lhs - rhs);
      rec.detail = os.str();
      report.records.push_back(rec);
      break;
    }
  }
  return report;
}

VerificationReport check_mixed_upper_bound(const KrausChannel& c, const DensityOperator& rho,
                                           double tol) {
  require_two_qubit(rho.dims(), "mixed upper bound");
  if (!c.square() || c.dim_in() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "mixed upper bound needs a qubit channel");
  }
  VerificationReport report;
  report.check = "upper-bound";
  report.mode = "two-qubit-exact";
  report.tolerance = tol;
  TrialRecord rec;
  rec.lhs = wootters_concurrence(apply_one_sided(c, rho, Side::A).matrix());
  rec.rhs = wootters_concurrence(choi_state(c).matrix()) * wootters_concurrence(rho.matrix());
  rec.residual = std::max(0.0, rec.lhs - rec.rhs);
  rec.pass = rec.lhs <= rec.rhs + tol;
  rec.detail = "slack=" + std::to_string(rec.rhs - rec.lhs);
  report.records.push_back(rec);
  return report;
}

// ---------------------------------------------------------------------------

Superoperator::Superoperator(std::vector<WeightedMap> terms, std::size_t other_dim)
    : terms_(std::move(terms)), other_dim_(other_dim) {}

Matrix Superoperator::apply(const Matrix& x) const {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  const Matrix id = identity(other_dim_);
  for (const auto& t : terms_) {
    const Matrix lift = kron(t.op, id);
    out += t.weight * lift * x * lift.adjoint();
  }
  return out;
}

DensityOperator Superoperator::apply(const DensityOperator& x) const {
  return DensityOperator::unnormalized(x.dims(), apply(x.matrix()));
}

Matrix Superoperator::output_identity_image() const {
  const auto n = terms_.empty() ? Eigen::Index{0} : terms_.front().op.rows();
  Matrix out = Matrix::Zero(n, n);
  for (const auto& t : terms_) out += t.weight * t.op * t.op.adjoint();
  return out;
}

Matrix Superoperator::trace_image() const {
  const auto n = terms_.empty() ? Eigen::Index{0} : terms_.front().op.cols();
  Matrix out = Matrix::Zero(n, n);
  for (const auto& t : terms_) out += t.weight * t.op.adjoint() * t.op;
  return out;
}

Superoperator mixed_state_dual(const DensityOperator& rho, double tol) {
  if (!rho.dims().square()) {
    throw Error(ErrorCode::NonSquare, "mixed-state dual needs a d x d bipartition");
  }
  const std::size_t d = rho.dims().a;
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, rho.trace())) {
    throw Error(ErrorCode::NotPositive, "mixed-state dual needs a positive operator");
  }
  std::vector<WeightedMap> terms;
  for (Eigen::Index k = es.eigenvalues().size(); k-- > 0;) {
    const double p = es.eigenvalues()(k);
    if (p <= tol) continue;
    const PureState psi = PureState::raw(rho.dims(), es.eigenvectors().col(k));
    terms.push_back({p, std::sqrt(static_cast<double>(d)) * map_from_state(psi)});
  }
  return Superoperator(std::move(terms), d);
}

}  // namespace entevolve
