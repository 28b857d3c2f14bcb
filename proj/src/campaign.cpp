#include "entevolve/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "entevolve/random.hpp"

namespace entevolve {

std::string_view to_string(CheckName check) {
  switch (check) {
    case CheckName::Factorization: return "factorization";
    case CheckName::UpperBound: return "upper-bound";
    case CheckName::Duality: return "duality";
    case CheckName::SlInvariance: return "sl-invariance";
    case CheckName::Lemma: return "lemma";
    case CheckName::Choi: return "choi";
  }
  return "factorization";
}

std::optional<CheckName> parse_check_name(std::string_view s) {
  for (auto c : {CheckName::Factorization, CheckName::UpperBound, CheckName::Duality,
                 CheckName::SlInvariance, CheckName::Lemma, CheckName::Choi}) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

double default_tolerance(CheckName check) {
  switch (check) {
    case CheckName::Factorization: return 1e-8;
    case CheckName::UpperBound: return 1e-10;
    case CheckName::Duality: return 1e-10;
    case CheckName::SlInvariance: return 1e-8;
    case CheckName::Lemma: return 1e-8;
    case CheckName::Choi: return 1e-12;
  }
  return 1e-8;
}

namespace {

FactorizationMode effective_mode(const CampaignConfig& c) {
  if (c.mode) return *c.mode;
  return c.dim == 2 ? FactorizationMode::TwoQubitExact : FactorizationMode::SingleKrausPure;
}

std::size_t kraus_count(std::uint64_t seed) { return 1 + Rng(seed).below(4); }

TrialRecord run_trial(const CampaignConfig& config, std::size_t t, double tol) {
  const std::uint64_t s = derive_seed(config.seed, t);
  const std::size_t d = config.dim;
  VerificationReport r;

  switch (config.check) {
    case CheckName::Factorization: {
      const FactorizationMode mode = effective_mode(config);
      const PureState psi = random_pure_state(d, d, derive_seed(s, 2));
      if (mode == FactorizationMode::SingleKrausPure) {
        const KrausChannel c({random_complex_matrix(d, d, derive_seed(s, 1))});
        r = check_evolution_factorization(c, psi, mode, tol);
      } else {
        const KrausChannel c = random_channel(d, kraus_count(derive_seed(s, 3)),
                                              derive_seed(s, 1));
        SamplingOptions sampling;
        sampling.budget = config.sampling_budget;
        sampling.seed = derive_seed(s, 4);
        r = check_evolution_factorization(c, psi, mode, tol, sampling);
      }
      break;
    }
    case CheckName::UpperBound: {
      const KrausChannel c = random_channel(2, kraus_count(derive_seed(s, 3)),
                                            derive_seed(s, 1));
      const std::size_t rank = 2 + Rng(derive_seed(s, 5)).below(3);
      r = check_mixed_upper_bound(c, random_density({2, 2}, rank, derive_seed(s, 2)), tol);
      break;
    }
    case CheckName::Duality: {
      const KrausChannel c = random_channel(d, kraus_count(derive_seed(s, 3)),
                                            derive_seed(s, 1));
      r = duality_evolution_identity(c, random_pure_state(d, d, derive_seed(s, 2)), tol);
      break;
    }
    case CheckName::SlInvariance: {
      const PureState psi = random_pure_state(d, d, derive_seed(s, 2));
      r = check_sl_invariance(psi, derive_seed(s, 1), 1, tol);
      for (double factor : {0.5, 2.0, 10.0}) {
        const auto h = check_homogeneity(psi, factor, tol);
        TrialRecord& rec = r.records.front();
        if (h.records.front().residual > rec.residual) {
          rec.residual = h.records.front().residual;
          rec.detail = "homogeneity r=" + std::to_string(factor);
        }
        rec.pass = rec.pass && h.records.front().pass;
      }
      break;
    }
    case CheckName::Lemma: {
      r = check_factorisation_lemma(random_complex_matrix(d, d, derive_seed(s, 1)),
                                    random_pure_state(d, d, derive_seed(s, 2)), tol);
      break;
    }
    case CheckName::Choi: {
      const KrausChannel c = random_channel(d, kraus_count(derive_seed(s, 3)),
                                            derive_seed(s, 1));
      const DensityOperator choi = choi_state(c);
      const DensityOperator via_state =
          apply_one_sided(c, DensityOperator::from_pure(bell_state(d)), Side::A);
      TrialRecord rec;
      rec.lhs = choi.trace();
      rec.rhs = 1.0;
      rec.residual = std::max((choi.matrix() - via_state.matrix()).cwiseAbs().maxCoeff(),
                              std::abs(choi.trace() - 1.0));
      rec.pass = rec.residual <= tol;
      r.records.push_back(rec);
      break;
    }
  }
  TrialRecord rec = r.records.front();
  rec.trial = t;
  return rec;
}

}  // namespace

void validate(const CampaignConfig& config) {
  if (config.trials == 0) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (config.dim == 0) throw Error(ErrorCode::InvalidArgument, "dim must be >= 1");
  if (config.tolerance && !(*config.tolerance >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  }
  if (config.mode && config.check != CheckName::Factorization) {
    throw Error(ErrorCode::InvalidArgument, "--mode only applies to factorization");
  }
  if (config.check == CheckName::UpperBound && config.dim != 2) {
    throw Error(ErrorCode::UnsupportedMode, "upper-bound is exact only for dim 2");
  }
  if (config.check == CheckName::Factorization &&
      effective_mode(config) == FactorizationMode::TwoQubitExact && config.dim != 2) {
    throw Error(ErrorCode::UnsupportedMode, "two-qubit-exact needs dim 2");
  }
  if (config.sampling_budget == 0) {
    throw Error(ErrorCode::InvalidArgument, "sampling budget must be >= 1");
  }
}

VerificationReport run_campaign(const CampaignConfig& config) {
  validate(config);
  const double tol = config.tolerance.value_or(default_tolerance(config.check));
  VerificationReport report;
  report.check = std::string(to_string(config.check));
  report.mode = config.check == CheckName::Factorization
                    ? std::string(to_string(effective_mode(config)))
                    : "dim=" + std::to_string(config.dim);
  if (config.check == CheckName::Factorization) {
    report.mode += " dim=" + std::to_string(config.dim);
  }
  report.seed = config.seed;
  report.tolerance = tol;
  report.records.resize(config.trials);

  const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, config.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < config.trials;) {
      try {
        report.records[t] = run_trial(config, t, tol);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

std::size_t thread_budget() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("ENT_EVOLVE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(cap, &end, 10);
    if (end != cap && v >= 1) n = std::min<std::size_t>(n, v);
  }
  return n;
}

}  // namespace entevolve
