#pragma once

#include <string>
#include <vector>

namespace ssinv::svg {

// Histogram with fixed-width bins starting at 0 and a dashed marker at the
// sample mean. Output is deterministic for identical inputs.
std::string histogram(const std::vector<double>& values, double bin_width,
                      const std::string& title, const std::string& x_label);

}  // namespace ssinv::svg
