// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gas.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gasbook
{
/// Flat `key = value` configuration, one entry per line, `#` comments.
class KeyValueConfig
{
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::istream& in)
    {
        KeyValueConfig cfg;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos)
            {
                if (line.find_first_not_of(" \t\r") != std::string::npos)
                    throw std::invalid_argument{
                        "config line " + std::to_string(lineno) + ": expected key = value"};
                continue;
            }
            cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path)
    {
        std::ifstream in{path};
        if (!in)
            throw std::runtime_error{"cannot open config file: " + path};
        return parse(in);
    }

    [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }

    [[nodiscard]] std::string get(const std::string& key, const std::string& fallback = "") const
    {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    [[nodiscard]] std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const
    {
        const auto it = values_.find(key);
        if (it == values_.end())
            return fallback;
        return std::stoull(it->second);
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    [[nodiscard]] const std::map<std::string, std::string>& entries() const { return values_; }

private:
    static std::string trim(std::string s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> values_;
};

inline GasSchedule schedule_from_config(const KeyValueConfig& cfg)
{
    GasSchedule s;
    s.sstore_set = cfg.get_u64("sstore_set", s.sstore_set);
    s.sstore_update = cfg.get_u64("sstore_update", s.sstore_update);
    s.sstore_clear_cost = cfg.get_u64("sstore_clear_cost", s.sstore_clear_cost);
    s.sstore_clear_refund = cfg.get_u64("sstore_clear_refund", s.sstore_clear_refund);
    s.sstore_dirty = cfg.get_u64("sstore_dirty", s.sstore_dirty);
    s.sstore_noop = cfg.get_u64("sstore_noop", s.sstore_noop);
    s.sload = cfg.get_u64("sload", s.sload);
    s.selfdestruct_cost = cfg.get_u64("selfdestruct_cost", s.selfdestruct_cost);
    s.selfdestruct_refund = cfg.get_u64("selfdestruct_refund", s.selfdestruct_refund);
    s.call_cost = cfg.get_u64("call_cost", s.call_cost);
    s.call_value_cost = cfg.get_u64("call_value_cost", s.call_value_cost);
    s.contract_create_base = cfg.get_u64("contract_create_base", s.contract_create_base);
    s.contract_code_deposit_per_byte =
        cfg.get_u64("contract_code_deposit_per_byte", s.contract_code_deposit_per_byte);
    s.tx_base = cfg.get_u64("tx_base", s.tx_base);
    s.calldata_nonzero_byte = cfg.get_u64("calldata_nonzero_byte", s.calldata_nonzero_byte);
    s.calldata_zero_byte = cfg.get_u64("calldata_zero_byte", s.calldata_zero_byte);
    s.refund_cap_num = cfg.get_u64("refund_cap_num", s.refund_cap_num);
    s.refund_cap_den = cfg.get_u64("refund_cap_den", s.refund_cap_den);
    s.block_gas_limit = cfg.get_u64("block_gas_limit", s.block_gas_limit);
    s.gas_price_gwei = cfg.get_u64("gas_price_gwei", s.gas_price_gwei);
    s.validate();
    return s;
}

inline GasSchedule load_schedule(const std::string& path)
{
    return schedule_from_config(KeyValueConfig::load(path));
}

}  // namespace gasbook
