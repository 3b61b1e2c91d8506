#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace fungrasp {

// Shared library logger. Writes to standard error.
spdlog::logger& logger();

}  // namespace fungrasp
