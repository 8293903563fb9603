/*
 * Copyright 2026 The tabprompt Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tabprompt {

// Formats `value` rounded to at most `max_decimals` places, then trims
// trailing zeros down to `min_decimals`. 6.0 -> "6.0", 0.430 -> "0.43".
std::string FormatDecimal(double value, int max_decimals, int min_decimals);

// Shortest string that parses back to the same double.
std::string FormatRoundTrip(double value);

std::optional<std::int64_t> ParseInt64(std::string_view s);
std::optional<double> ParseDouble(std::string_view s);

std::string Join(std::span<const std::string> parts, std::string_view sep);
std::string Trim(std::string_view s);
std::string ToLower(std::string_view s);

// Hex-encoded SHA-256 digest.
std::string Sha256Hex(std::string_view data);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace tabprompt
