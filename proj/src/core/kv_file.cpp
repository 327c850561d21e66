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

#include "hsnn/core/kv_file.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hsnn/core/error.hpp"
#include "hsnn/core/sim_time.hpp"

namespace hsnn {

std::string to_string(SimTime t) { return std::to_string(t.ps) + " ps"; }

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
    text = trim(text);
    std::int64_t v = 0;
    const char* begin = text.data();
    if (!text.empty() && text.front() == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ParseError(std::string(what) + ": expected an integer, got '" + std::string(text) + "'");
    return v;
}

double parse_double(std::string_view text, std::string_view what) {
    const std::string s(trim(text));
    if (s.empty()) throw ParseError(std::string(what) + ": expected a number, got ''");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE)
        throw ParseError(std::string(what) + ": expected a number, got '" + s + "'");
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

KvDocument KvDocument::parse(std::string_view text, std::string origin) {
    KvDocument doc;
    doc.origin_ = std::move(origin);
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(doc.origin_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError(doc.origin_ + ":" + std::to_string(line_no) + ": empty key");
        if (doc.values_.contains(key))
            throw ParseError(doc.origin_ + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        doc.lines_[key] = line_no;
        doc.values_.emplace(std::move(key), std::move(value));
        if (end == text.size()) break;
    }
    return doc;
}

KvDocument KvDocument::load(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

bool KvDocument::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::optional<std::string> KvDocument::take(std::string_view key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    taken_.emplace(key);
    return it->second;
}

std::string KvDocument::require(std::string_view key) {
    auto v = take(key);
    if (!v) throw ParseError(origin_ + ": missing required key '" + std::string(key) + "'");
    return *v;
}

std::int64_t KvDocument::require_int(std::string_view key) {
    return parse_int(require(key), origin_ + ": " + std::string(key));
}

double KvDocument::require_double(std::string_view key) {
    return parse_double(require(key), origin_ + ": " + std::string(key));
}

std::optional<std::int64_t> KvDocument::take_int(std::string_view key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    return parse_int(*v, origin_ + ": " + std::string(key));
}

std::optional<double> KvDocument::take_double(std::string_view key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    return parse_double(*v, origin_ + ": " + std::string(key));
}

void KvDocument::reject_unknown() const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
        if (taken_.contains(key)) continue;
        if (!unknown.empty()) unknown += ", ";
        unknown += key + " (line " + std::to_string(lines_.at(key)) + ")";
    }
    if (!unknown.empty()) throw ParseError(origin_ + ": unknown key(s): " + unknown);
}

}  // namespace hsnn
