#pragma once

#include <string>

#include "seqkern/experiments.hpp"

namespace seqkern {

/// Shortest round-trip decimal form of x (to_chars); "nan"/"inf" spelled out.
/// All file output goes through this so emitted bytes are reproducible.
std::string format_double(double x);

/// RFC-4180-style quoting: the field is wrapped and inner quotes doubled
/// only when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

/// Fixed schema, part of the output contract:
/// n,estimator,noise,M,risk,std_error,miss_rate,mean_tau_over_H,seed
std::string to_csv(const RiskTable& table);

/// Same rows as a flat JSON array of objects (no nesting, diff-friendly).
std::string to_json(const RiskTable& table);

}  // namespace seqkern
