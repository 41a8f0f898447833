#pragma once

#include <string>
#include <vector>

namespace dkm::cli {

// Minimal static log-log plot: one marker per point plus the connecting
// polyline, with decade gridlines.
std::string log_log_svg(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& title);

} // namespace dkm::cli
