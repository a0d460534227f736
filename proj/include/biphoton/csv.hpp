#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "biphoton/coincidence.hpp"
#include "biphoton/correlation.hpp"

namespace biphoton {

// Shortest text that reads back to the same double.
std::string format_double(double x);

// '#'-prefixed metadata lines followed by "tau_s,g2" rows.
void write_correlation_csv(std::ostream& os, const CorrelationResult& result,
                           const std::vector<std::string>& metadata);

// '#'-prefixed metadata lines followed by "channel_index,tau_center_s,counts" rows.
// Underflow/overflow and Poisson totals go into the metadata header.
void write_histogram_csv(std::ostream& os, const Histogram& histogram,
                         const std::vector<std::string>& metadata);

}  // namespace biphoton
