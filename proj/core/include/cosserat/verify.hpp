#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cosserat {

// One property check: pass iff `measured relation threshold`.
enum class Relation { le, ge };

struct VerificationRow {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::le;
  bool pass = false;
};

struct VerificationReport {
  std::vector<VerificationRow> rows;
  bool all_pass = true;
};

struct VerificationOptions {
  std::uint64_t seed = 12345;
  // Fault-injection hook: added to the closed-form radial kernel derivative
  // inside the quadrature comparison. Nonzero values must fail exactly that
  // check, demonstrating the battery isolates a broken kernel constant.
  double kernel_perturbation = 0.0;
};

// Runs every built-in property check (closed-form rate maps, compatibility
// residuals, round-trip recovery, kernel quadrature, Stokes field identities,
// mobility algebra, stepper sanity, swimmer geometry) with the given seed.
// Never throws on a failed check; failures are rows with pass = false.
VerificationReport run_verification(const VerificationOptions& options = {});

// Fixed-width console table, one row per check plus a summary line.
std::string format_report(const VerificationReport& report);

// CSV serialization: header `name,measured,threshold,relation,pass`, numbers
// at 17 significant digits.
void write_report_csv(const VerificationReport& report, const std::string& path);

}  // namespace cosserat
