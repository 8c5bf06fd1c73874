// scsot/common.h

// Copyright 2026  The scsot authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SCSOT_COMMON_H_
#define SCSOT_COMMON_H_

#include <cstdarg>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace scsot {

std::string StrPrintf(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

// Thrown for contract violations (bad shapes, malformed inputs, ...).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] void ThrowError(const char* file, int line, const std::string& msg);

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };

// Resolved once from SCSOT_LOG_LEVEL (debug|info|warn|error); default info.
LogLevel CurrentLogLevel();

void LogMessage(LogLevel level, const std::string& msg);

}  // namespace scsot

#define SCSOT_CHECK(cond, msg)                                   \
  do {                                                           \
    if (!(cond)) ::scsot::ThrowError(__FILE__, __LINE__, (msg)); \
  } while (0)

#define SCSOT_LOG(level, ...)                                               \
  do {                                                                      \
    if (::scsot::CurrentLogLevel() <= (level))                              \
      ::scsot::LogMessage((level), ::scsot::StrPrintf(__VA_ARGS__));        \
  } while (0)

#define SCSOT_DEBUG(...) SCSOT_LOG(::scsot::LogLevel::kDebug, __VA_ARGS__)
#define SCSOT_INFO(...) SCSOT_LOG(::scsot::LogLevel::kInfo, __VA_ARGS__)
#define SCSOT_WARN(...) SCSOT_LOG(::scsot::LogLevel::kWarn, __VA_ARGS__)

#endif  // SCSOT_COMMON_H_
