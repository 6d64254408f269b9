// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bench.hpp"
#include "encode.hpp"
#include "gas.hpp"
#include "market.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasbook
{
/// Rollup cost-model knobs. The per-message overhead is a calibration
/// constant chosen so that the 103-byte market-close message (4-byte call
/// wrapped in the 99-byte signed-transaction envelope, all nonzero) costs
/// 6,569 L1 gas; the true fee decomposition of the reference deployment is
/// not public.
struct RollupConfig
{
    Gas per_message_overhead = 4'921;
    std::uint64_t transport_envelope_bytes = 99;  // signed-tx wrapper, counted nonzero
    std::uint64_t l2_divisor = 100;               // L2 storage ops at 1/100 of L1
    std::uint64_t challenge_blocks = 240;         // one hour of L1 blocks
    PqVariant l2_backend = PqVariant::heap_dynamic_array;
};

/// A call recorded (not executed) on L1.
struct InboxMessage
{
    std::vector<std::uint8_t> payload;
    std::uint64_t zero_bytes = 0;
    std::uint64_t nonzero_bytes = 0;
    Gas l1_cost = 0;
};

/// L1 recording cost is a pure function of the message bytes.
inline InboxMessage inbox_submit(std::span<const std::uint8_t> payload,
    const GasSchedule& l1 = {}, const RollupConfig& cfg = {})
{
    InboxMessage msg;
    msg.payload.assign(payload.begin(), payload.end());
    const CalldataProfile body = profile_of(payload);
    msg.zero_bytes = body.zero_bytes;
    msg.nonzero_bytes = body.nonzero_bytes + cfg.transport_envelope_bytes;
    msg.l1_cost = cfg.per_message_overhead + msg.nonzero_bytes * l1.calldata_nonzero_byte +
                  msg.zero_bytes * l1.calldata_zero_byte;
    return msg;
}

/// Sequencer batch: messages recorded together, the carrier transaction's
/// base cost amortized across them.
struct Batch
{
    std::vector<InboxMessage> messages;
    Gas batch_overhead = GasSchedule{}.tx_base;

    [[nodiscard]] Gas total_l1_cost() const
    {
        Gas sum = batch_overhead;
        for (const auto& m : messages)
            sum += m.l1_cost;
        return sum;
    }
    [[nodiscard]] Gas amortized_cost_per_message() const
    {
        if (messages.empty())
            return batch_overhead;
        return total_l1_cost() / messages.size();
    }
};

struct L2Receipt
{
    Gas arbgas = 0;    // L2 computation, measured on the scaled schedule
    Gas l1_share = 0;  // the message's calldata recording cost
};

/// Runs the worst-case close on an arena configured with the L2 schedule;
/// the identical market code serves both layers.
inline L2Receipt execute_l2_close(std::uint64_t n_pairs, const RollupConfig& cfg = {},
    const GasSchedule& l1 = {})
{
    const GasSchedule l2 = l1.scaled_l2(cfg.l2_divisor);
    MarketConfig base;
    base.pq.hkv_key_mode = HkvKeyMode::packed_rank;
    const auto probe = bench::worst_case_close(cfg.l2_backend, n_pairs, base, l2);
    L2Receipt r;
    r.arbgas = probe.receipt.gas_used_effective;
    r.l1_share = inbox_submit(encode_call(MarketOp::close_market), l1, cfg).l1_cost;
    return r;
}

/// Asset bridge with an optimistic exit: deposits credit L2 immediately,
/// withdrawals finalize on L1 only after the challenge period.
class Bridge
{
public:
    explicit Bridge(RollupConfig cfg = {}) : cfg_{cfg} {}

    void fund_l1(const std::string& account, Asset asset, std::uint64_t amount)
    {
        l1_[{account, static_cast<int>(asset)}] += amount;
    }

    [[nodiscard]] std::uint64_t l1_balance(const std::string& account, Asset asset) const
    {
        return find(l1_, account, asset);
    }
    [[nodiscard]] std::uint64_t l2_balance(const std::string& account, Asset asset) const
    {
        return find(l2_, account, asset);
    }
    [[nodiscard]] std::uint64_t pending_withdrawals(const std::string& account, Asset asset) const
    {
        std::uint64_t sum = 0;
        for (const auto& w : pending_)
            if (w.account == account && w.asset == asset)
                sum += w.amount;
        return sum;
    }

    void deposit(const std::string& account, Asset asset, std::uint64_t amount)
    {
        auto& bal = l1_[{account, static_cast<int>(asset)}];
        if (bal < amount)
            throw std::logic_error{"insufficient L1 balance to bridge"};
        bal -= amount;
        l2_[{account, static_cast<int>(asset)}] += amount;
    }

    /// Schedules an exit; the funds leave L2 now and reach L1 only after
    /// `challenge_blocks` have elapsed.
    void withdraw(const std::string& account, Asset asset, std::uint64_t amount)
    {
        auto& bal = l2_[{account, static_cast<int>(asset)}];
        if (bal < amount)
            throw std::logic_error{"insufficient L2 balance to withdraw"};
        bal -= amount;
        pending_.push_back(Withdrawal{account, asset, amount, block_ + cfg_.challenge_blocks});
    }

    void advance_blocks(std::uint64_t blocks)
    {
        block_ += blocks;
        std::vector<Withdrawal> still_pending;
        for (auto& w : pending_)
        {
            if (w.final_at <= block_)
                l1_[{w.account, static_cast<int>(w.asset)}] += w.amount;
            else
                still_pending.push_back(w);
        }
        pending_ = std::move(still_pending);
    }

    [[nodiscard]] std::uint64_t block() const { return block_; }

private:
    struct Withdrawal
    {
        std::string account;
        Asset asset = Asset::ether;
        std::uint64_t amount = 0;
        std::uint64_t final_at = 0;
    };

    using Map = std::map<std::pair<std::string, int>, std::uint64_t>;

    static std::uint64_t find(const Map& m, const std::string& account, Asset asset)
    {
        const auto it = m.find({account, static_cast<int>(asset)});
        return it == m.end() ? 0 : it->second;
    }

    RollupConfig cfg_;
    Map l1_;
    Map l2_;
    std::vector<Withdrawal> pending_;
    std::uint64_t block_ = 0;
};

/// One row of the L1/L2 cost-split table.
struct SavingsRow
{
    std::uint64_t n_pairs = 0;
    Gas l1_direct = 0;   // effective gas of the close run directly on L1
    Gas l1_rollup = 0;   // inbox recording cost of the same close
    Gas arbgas = 0;      // L2 execution cost
    double savings = 0;  // 1 - l1_rollup / l1_direct
};

inline SavingsRow savings_report(std::uint64_t n_pairs,
    PqVariant backend = PqVariant::heap_dynamic_array, const RollupConfig& cfg = {},
    const GasSchedule& l1 = {})
{
    SavingsRow row;
    row.n_pairs = n_pairs;
    MarketConfig base;
    base.pq.hkv_key_mode = HkvKeyMode::packed_rank;
    row.l1_direct = bench::worst_case_close(backend, n_pairs, base, l1).receipt.gas_used_effective;
    row.l1_rollup = inbox_submit(encode_call(MarketOp::close_market), l1, cfg).l1_cost;
    RollupConfig l2cfg = cfg;
    l2cfg.l2_backend = backend;
    row.arbgas = execute_l2_close(n_pairs, l2cfg, l1).arbgas;
    row.savings = 1.0 - static_cast<double>(row.l1_rollup) / static_cast<double>(row.l1_direct);
    return row;
}

inline void write_savings_csv(std::ostream& out, const std::vector<SavingsRow>& rows)
{
    out << "Pairs,Layer1 gasUsed (direct),Layer1 gasUsed (rollup),Layer2 ArbGas,Savings\n";
    for (const auto& r : rows)
    {
        out << r.n_pairs << ',' << r.l1_direct << ',' << r.l1_rollup << ',' << r.arbgas << ','
            << r.savings << '\n';
    }
}

}  // namespace gasbook
