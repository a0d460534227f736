#include "biphoton/csv.hpp"

#include <charconv>
#include <system_error>

namespace biphoton {

namespace {

void write_metadata(std::ostream& os, const std::vector<std::string>& metadata) {
  for (const std::string& line : metadata) os << "# " << line << '\n';
}

const char* normalization_name(Normalization n) {
  return n == Normalization::peak_unity ? "peak_unity" : "raw";
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

void write_correlation_csv(std::ostream& os, const CorrelationResult& result,
                           const std::vector<std::string>& metadata) {
  write_metadata(os, metadata);
  os << "# analyzer.theta1 = " << format_double(result.analyzer.theta1) << '\n'
     << "# analyzer.theta2 = " << format_double(result.analyzer.theta2) << '\n'
     << "# normalization = " << normalization_name(result.normalization) << '\n'
     << "tau_s,g2\n";
  for (std::size_t i = 0; i < result.tau.size(); ++i)
    os << format_double(result.tau[i]) << ',' << format_double(result.g2[i]) << '\n';
}

void write_histogram_csv(std::ostream& os, const Histogram& h,
                         const std::vector<std::string>& metadata) {
  write_metadata(os, metadata);
  os << "# histogram.seed = " << h.seed << '\n'
     << "# histogram.channel_width_s = " << format_double(h.channel_width) << '\n'
     << "# histogram.zero_channel = " << h.zero_channel << '\n'
     << "# histogram.acquisition_time_s = " << format_double(h.acquisition_time) << '\n'
     << "# histogram.pairs = " << h.pairs << '\n'
     << "# histogram.background = " << h.background << '\n'
     << "# histogram.underflow = " << h.underflow << '\n'
     << "# histogram.overflow = " << h.overflow << '\n'
     << "channel_index,tau_center_s,counts\n";
  for (std::size_t i = 0; i < h.n_channels(); ++i)
    os << i << ',' << format_double(h.tau_center(i)) << ',' << h.counts[i] << '\n';
}

}  // namespace biphoton
