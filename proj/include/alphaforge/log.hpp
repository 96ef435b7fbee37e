#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace alphaforge {

/// Process-wide logger writing to stderr. The level comes from the
/// ALPHAFORGE_LOG environment variable (trace, debug, info, warn, error,
/// off); default is warn.
spdlog::logger& log();

}  // namespace alphaforge
