// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gas.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasbook
{
/// The market's externally callable operations.
enum class MarketOp
{
    deposit_token,
    deposit_ether,
    open_market,
    close_market,
    submit_bid,
    submit_ask,
    claim_tokens,
    claim_ether,
};

[[nodiscard]] inline std::string to_string(MarketOp op)
{
    switch (op)
    {
    case MarketOp::deposit_token: return "deposit_token";
    case MarketOp::deposit_ether: return "deposit_ether";
    case MarketOp::open_market: return "open_market";
    case MarketOp::close_market: return "close_market";
    case MarketOp::submit_bid: return "submit_bid";
    case MarketOp::submit_ask: return "submit_ask";
    case MarketOp::claim_tokens: return "claim_tokens";
    case MarketOp::claim_ether: return "claim_ether";
    }
    return "unknown";
}

/// Four-byte dispatch selectors, fixed so encodings are stable across runs.
[[nodiscard]] inline std::array<std::uint8_t, 4> selector(MarketOp op)
{
    switch (op)
    {
    case MarketOp::deposit_token: return {0x33, 0x8b, 0x5d, 0xea};
    case MarketOp::deposit_ether: return {0x98, 0xea, 0x5f, 0xca};
    case MarketOp::open_market: return {0x70, 0x51, 0x1b, 0x4e};
    case MarketOp::close_market: return {0xc2, 0xba, 0x57, 0x44};
    case MarketOp::submit_bid: return {0x45, 0x9f, 0x2e, 0x77};
    case MarketOp::submit_ask: return {0x5e, 0x2c, 0x8b, 0x91};
    case MarketOp::claim_tokens: return {0x69, 0xb1, 0x3d, 0xf5};
    case MarketOp::claim_ether: return {0x8d, 0x7a, 0x46, 0x62};
    }
    throw std::invalid_argument{"unknown market operation"};
}

/// Canonical call encoding: 4-byte selector followed by one 32-byte
/// big-endian word per argument.
[[nodiscard]] inline std::vector<std::uint8_t> encode_call(
    MarketOp op, std::span<const std::uint64_t> args = {})
{
    const auto sel = selector(op);
    std::vector<std::uint8_t> out(sel.begin(), sel.end());
    for (const std::uint64_t arg : args)
    {
        for (int i = 0; i < 24; ++i)
            out.push_back(0);
        for (int i = 7; i >= 0; --i)
            out.push_back(static_cast<std::uint8_t>(arg >> (8 * i)));
    }
    return out;
}

[[nodiscard]] inline std::vector<std::uint8_t> encode_call(
    MarketOp op, std::initializer_list<std::uint64_t> args)
{
    return encode_call(op, std::span<const std::uint64_t>{args.begin(), args.size()});
}

/// Zero/nonzero byte counts used by the intrinsic calldata charge and the
/// inbox cost model.
[[nodiscard]] inline CalldataProfile profile_of(std::span<const std::uint8_t> payload)
{
    CalldataProfile p;
    for (const auto b : payload)
        (b == 0 ? p.zero_bytes : p.nonzero_bytes) += 1;
    return p;
}

}  // namespace gasbook
