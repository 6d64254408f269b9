// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gas.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasbook
{
enum class TxKind
{
    deposit_ether,
    deposit_token,
    submit_bid,
    submit_ask,
    cancel,
    open_market,
    close_market,
    claim_ether,
    claim_token,
};

struct SimTransaction
{
    std::string sender;
    TxKind kind = TxKind::submit_bid;
    std::uint64_t price = 0;
    std::uint64_t volume = 0;
    std::uint64_t cancel_target = 0;   // resting order id, for TxKind::cancel
    std::uint64_t gas_bid = 1;         // gwei per gas
    std::uint64_t nonce = 0;           // per-sender, strictly ordered at inclusion
    std::uint64_t arrival = 0;         // mempool timestamp, orders fifo inclusion
    std::uint64_t available_block = 0;  // earliest block that may include it
};

enum class PolicyKind
{
    fee_priority,
    fifo,
    adversarial,
};

/// How the block producer orders the mempool. The adversarial policy gives
/// the adversary deterministic insertion right before the victim's
/// transactions (the worst case for the defense) and can withhold the
/// victim's transactions for a number of blocks.
struct MinerPolicy
{
    PolicyKind kind = PolicyKind::fifo;
    std::string adversary;
    std::string victim;
    std::uint64_t suppress_blocks = 0;   // victim txs withheld this many blocks
    bool suppress_everyone = false;      // network-wide flooding: nothing gets in
};

struct ExecutedTx
{
    SimTransaction tx;
    GasReceipt receipt;
    bool succeeded = true;
};

struct BlockResult
{
    std::uint64_t height = 0;
    std::vector<ExecutedTx> included;
    Gas pre_refund_total = 0;
};

/// Executes one transaction against a venue under a remaining-gas budget.
/// The executor must revert the transaction and return nullopt when its
/// pre-refund gas would not fit; failed calls revert their effects but are
/// included at their intrinsic cost.
using TxExecutor =
    std::function<std::optional<ExecutedTx>(const SimTransaction&, Gas remaining_gas)>;

namespace detail
{
inline void order_mempool(std::vector<SimTransaction>& txs, const MinerPolicy& policy)
{
    auto by_arrival = [](const SimTransaction& a, const SimTransaction& b) {
        return a.arrival < b.arrival;
    };
    switch (policy.kind)
    {
    case PolicyKind::fifo:
        std::stable_sort(txs.begin(), txs.end(), by_arrival);
        break;
    case PolicyKind::fee_priority:
        std::stable_sort(txs.begin(), txs.end(), by_arrival);
        std::stable_sort(txs.begin(), txs.end(),
            [](const SimTransaction& a, const SimTransaction& b) { return a.gas_bid > b.gas_bid; });
        break;
    case PolicyKind::adversarial:
    {
        std::stable_sort(txs.begin(), txs.end(), by_arrival);
        // Pull the adversary's transactions out and splice them back in
        // immediately before the victim's first transaction.
        std::vector<SimTransaction> adv;
        std::vector<SimTransaction> rest;
        for (auto& tx : txs)
            (tx.sender == policy.adversary ? adv : rest).push_back(tx);
        std::vector<SimTransaction> merged;
        bool inserted = false;
        for (auto& tx : rest)
        {
            if (!inserted && tx.sender == policy.victim)
            {
                merged.insert(merged.end(), adv.begin(), adv.end());
                inserted = true;
            }
            merged.push_back(tx);
        }
        if (!inserted)
            merged.insert(merged.end(), adv.begin(), adv.end());
        txs = std::move(merged);
        break;
    }
    }
    // Nonce order per sender always holds at inclusion.
    std::map<std::string, std::vector<SimTransaction*>> per_sender;
    for (auto& tx : txs)
        per_sender[tx.sender].push_back(&tx);
    for (auto& [sender, ptrs] : per_sender)
    {
        std::vector<SimTransaction> sorted;
        for (auto* p : ptrs)
            sorted.push_back(*p);
        std::sort(sorted.begin(), sorted.end(),
            [](const SimTransaction& a, const SimTransaction& b) { return a.nonce < b.nonce; });
        for (std::size_t i = 0; i < ptrs.size(); ++i)
            *ptrs[i] = sorted[i];
    }
}
}  // namespace detail

/// Orders the mempool per policy and fills a block: each candidate is
/// executed, then admitted iff the cumulative pre-refund gas still fits
/// the block gas limit. Excluded and withheld transactions stay in the
/// mempool.
class BlockBuilder
{
public:
    explicit BlockBuilder(Gas gas_limit) : gas_limit_{gas_limit} {}

    [[nodiscard]] std::uint64_t height() const { return height_; }
    [[nodiscard]] const std::vector<SimTransaction>& mempool() const { return mempool_; }

    void submit(SimTransaction tx) { mempool_.push_back(std::move(tx)); }

    BlockResult build_block(const MinerPolicy& policy, const TxExecutor& execute)
    {
        BlockResult block;
        block.height = height_;

        std::vector<SimTransaction> candidates;
        std::vector<SimTransaction> withheld;
        for (auto& tx : mempool_)
        {
            const bool arrived = tx.available_block <= height_;
            const bool suppressed =
                (policy.suppress_everyone &&
                    height_ < tx.available_block + policy.suppress_blocks) ||
                (policy.kind == PolicyKind::adversarial && tx.sender == policy.victim &&
                    height_ < tx.available_block + policy.suppress_blocks);
            (!arrived || suppressed ? withheld : candidates).push_back(tx);
        }
        detail::order_mempool(candidates, policy);

        std::vector<SimTransaction> deferred = std::move(withheld);
        for (auto& tx : candidates)
        {
            const Gas remaining = gas_limit_ - block.pre_refund_total;
            std::optional<ExecutedTx> done = execute(tx, remaining);
            if (!done || !admit_to_block(done->receipt, remaining))
            {
                deferred.push_back(tx);
                continue;
            }
            block.pre_refund_total += done->receipt.gas_used_pre_refund;
            block.included.push_back(std::move(*done));
        }
        mempool_ = std::move(deferred);
        ++height_;
        return block;
    }

private:
    Gas gas_limit_;
    std::uint64_t height_ = 0;
    std::vector<SimTransaction> mempool_;
};

}  // namespace gasbook
