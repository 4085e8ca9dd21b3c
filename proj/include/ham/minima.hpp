#pragma once

#include <functional>
#include <vector>

namespace ham {

// All local minima of f on [a, b] whose refined value is below accept_tol.
// Coarse scan at N samples; every sampled dip below trigger is re-scanned at
// sub-sample resolution so clusters of nearby minima are not merged, then each
// member is refined by golden section.
std::vector<double> scan_minima(const std::function<double(double)>& f, double a, double b,
                                int N, double trigger, double accept_tol,
                                int subsamples = 96);

}  // namespace ham
