#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace entevolve {

struct TrialRecord {
  std::size_t trial = 0;
  double residual = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = true;
  std::string detail;
};

/// Outcome of a property check: one record per trial, merged in trial order.
struct VerificationReport {
  std::string check;
  std::string mode;
  std::optional<std::uint64_t> seed;
  double tolerance = 0.0;
  std::vector<TrialRecord> records;

  std::size_t trials() const { return records.size(); }
  double max_residual() const;
  bool pass() const;
  std::vector<TrialRecord> failures() const;

  // Appends records from another report, renumbering them after ours.
  void merge(const VerificationReport& other);
};

}  // namespace entevolve
