#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtf/types.hpp"

namespace rtf {

enum class SelftestScale { quick, full };

struct SelftestOptions {
  SelftestScale scale = SelftestScale::quick;
  // Name of one check whose oracle gets perturbed; used to confirm that the
  // runner notices a broken oracle. Empty means no fault.
  std::string fault;
  std::uint64_t seed = 0;
};

struct SelftestCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // worst error (or violation count) over all cases
  double tolerance = 0.0;
  Index cases = 0;
};

// Reads RTF_SELFTEST_SCALE (quick | full, default quick) and
// RTF_SELFTEST_FAULT. Throws InvalidParams on an unknown scale.
SelftestOptions selftest_options_from_env();

std::vector<std::string> selftest_check_names();

std::vector<SelftestCheck> run_selftest(const SelftestOptions& options);

}  // namespace rtf
