#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

#include "pcqp/ipm.hpp"

namespace pcqp {

/// 17 significant digits, enough to round-trip any double.
std::string format_real(double value);

/// Header of write_trace_csv, without a trailing newline.
std::string trace_csv_header();

/// One row per IterationRecord. `prefix` is prepended verbatim to each data
/// row (e.g. "12," for a step column); `prefix_header` likewise to the header.
void write_trace_csv(std::ostream& out, std::span<const IterationRecord> trace, const std::string& prefix = {},
                     const std::string& prefix_header = {}, bool header = true);

}  // namespace pcqp
