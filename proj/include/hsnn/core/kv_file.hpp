/*
 * Copyright 2026 The hsnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hsnn {

/// Flat `key = value` document. `#` starts a comment, blank lines are ignored,
/// duplicate keys are rejected. Keys must be consumed explicitly; whatever is
/// left when `reject_unknown()` runs is reported as an unknown key.
class KvDocument {
public:
    static KvDocument parse(std::string_view text, std::string origin);
    static KvDocument load(const std::filesystem::path& path);

    bool has(std::string_view key) const;
    std::optional<std::string> take(std::string_view key);
    std::string require(std::string_view key);
    std::int64_t require_int(std::string_view key);
    double require_double(std::string_view key);
    std::optional<std::int64_t> take_int(std::string_view key);
    std::optional<double> take_double(std::string_view key);

    /// Throws ParseError naming every key that was never taken.
    void reject_unknown() const;

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::map<std::string, std::string, std::less<>> values_;
    std::map<std::string, int, std::less<>> lines_;
    std::set<std::string, std::less<>> taken_;
};

std::int64_t parse_int(std::string_view text, std::string_view what);
double parse_double(std::string_view text, std::string_view what);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace hsnn
