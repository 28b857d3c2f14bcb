#include "entevolve/report.hpp"

#include <algorithm>

namespace entevolve {

double VerificationReport::max_residual() const {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r.residual);
  return m;
}

bool VerificationReport::pass() const {
  return std::all_of(records.begin(), records.end(),
                     [](const TrialRecord& r) { return r.pass; });
}

std::vector<TrialRecord> VerificationReport::failures() const {
  std::vector<TrialRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [](const TrialRecord& r) { return !r.pass; });
  return out;
}

void VerificationReport::merge(const VerificationReport& other) {
  const std::size_t offset = records.size();
  for (auto r : other.records) {
    r.trial += offset;
    records.push_back(std::move(r));
  }
}

}  // namespace entevolve
