#include "fungrasp/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace fungrasp {

spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto existing = spdlog::get("fungrasp");
    if (existing) return existing;
    auto created = spdlog::stderr_logger_mt("fungrasp");
    created->set_pattern("[%l] %v");
    return created;
  }();
  return *instance;
}

}  // namespace fungrasp
