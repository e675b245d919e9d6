#pragma once

#include <span>

namespace holdercone::detail {

/// Embedded lowpass taps for 1 <= order <= 10; UnsupportedOrder otherwise.
std::span<const double> daubechies_lowpass(int order);

}  // namespace holdercone::detail
