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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsnn/workload/mapping.hpp"
#include "hsnn/workload/snn_model.hpp"

namespace hsnn::hw {

enum class Arbitration : std::uint8_t { RoundRobin, FixedPriority };

const char* to_string(Arbitration a);
Arbitration parse_arbitration(std::string_view text);

/// Full hardware architecture. An empty `mapping` means the canonical fill
/// for whatever model is being run.
struct ArchConfig {
    std::uint32_t rows = 1;
    std::uint32_t cols = 1;
    std::uint32_t neurons_per_pe = 2;
    std::uint32_t fifo_depth_per_port = 8;
    std::uint32_t virtual_channels = 4;
    Arbitration arbitration = Arbitration::RoundRobin;
    std::uint32_t flit_payload_bits = 32;
    std::optional<workload::MappingTable> mapping;

    std::uint32_t nodes() const { return rows * cols; }
    bool operator==(const ArchConfig&) const = default;
};

inline bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }
/// Bits needed to address `n` distinct values (0 for n <= 1).
std::uint32_t address_bits(std::uint64_t n);

/// AER address width: PE coordinate bits plus log2(neurons_per_pe).
std::uint32_t aer_address_bits(const ArchConfig& arch);

/// The mapping the hardware will use: the explicit table or the canonical one.
workload::MappingTable resolved_mapping(const ArchConfig& arch, const workload::SnnModel& model);

/// Structural rules independent of search bounds. Empty when valid.
std::vector<std::string> arch_violations(const ArchConfig& arch, const workload::SnnModel& model);

ArchConfig parse_arch(std::string_view text, const std::string& origin);
ArchConfig load_arch(const std::filesystem::path& path);
std::string format_arch(const ArchConfig& arch);
void save_arch(const ArchConfig& arch, const std::filesystem::path& path);

}  // namespace hsnn::hw
