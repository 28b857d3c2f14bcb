#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "entevolve/entanglement.hpp"
#include "entevolve/report.hpp"

namespace entevolve {

enum class CheckName { Factorization, UpperBound, Duality, SlInvariance, Lemma, Choi };

std::string_view to_string(CheckName check);
std::optional<CheckName> parse_check_name(std::string_view s);
double default_tolerance(CheckName check);

struct CampaignConfig {
  CheckName check = CheckName::Factorization;
  std::size_t dim = 2;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  // Factorization only; defaults to two-qubit-exact at d = 2 and
  // single-kraus-pure otherwise.
  std::optional<FactorizationMode> mode;
  std::size_t sampling_budget = 64;
  std::size_t threads = 1;
};

// Throws Error(InvalidArgument | UnsupportedMode) for unusable configs.
void validate(const CampaignConfig& config);

/// Runs `trials` independent trials.  Trial t draws everything from
/// derive_seed(seed, t), so the report does not depend on the thread count.
VerificationReport run_campaign(const CampaignConfig& config);

// Thread count from ENT_EVOLVE_THREADS (a cap) and the hardware.
std::size_t thread_budget();

}  // namespace entevolve
