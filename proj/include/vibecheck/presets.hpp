#pragma once

#include <vector>

#include "vibecheck/core.hpp"

namespace vibecheck {

/// The ten predefined baseline axes, with ids "preset-0" through "preset-9".
std::vector<Vibe> preset_vibes();

}  // namespace vibecheck
