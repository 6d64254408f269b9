// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace gasbook
{
using Gas = std::uint64_t;
using Address = std::uint64_t;
using SlotId = std::uint64_t;

/// A 256-bit storage word. Only the zero/nonzero distinction matters for
/// metering; values used by the queues and the market fit the low limb.
struct Word
{
    std::array<std::uint64_t, 4> limbs{};

    constexpr Word() = default;
    constexpr Word(std::uint64_t v) : limbs{v, 0, 0, 0} {}  // intentionally implicit

    [[nodiscard]] constexpr bool is_zero() const
    {
        return limbs[0] == 0 && limbs[1] == 0 && limbs[2] == 0 && limbs[3] == 0;
    }
    [[nodiscard]] constexpr std::uint64_t low() const { return limbs[0]; }

    friend constexpr bool operator==(const Word&, const Word&) = default;
};

/// Chargeable and refundable cost constants. Defaults follow the Istanbul
/// fee schedule; every constant can be overridden from a key-value file.
struct GasSchedule
{
    Gas sstore_set = 20'000;         // zero -> nonzero write
    Gas sstore_update = 5'000;       // nonzero -> nonzero write
    Gas sstore_clear_cost = 5'000;   // nonzero -> zero write
    Gas sstore_clear_refund = 15'000;
    Gas sstore_dirty = 800;          // repeat write to a slot already written this tx
    Gas sstore_noop = 800;           // write that leaves the value unchanged
    Gas sload = 800;
    Gas selfdestruct_cost = 5'000;
    Gas selfdestruct_refund = 24'000;
    Gas call_cost = 700;             // external call into another contract
    Gas call_value_cost = 9'000;     // surcharge when the call transfers value
    Gas contract_create_base = 32'000;
    Gas contract_code_deposit_per_byte = 200;
    Gas tx_base = 21'000;
    Gas calldata_nonzero_byte = 16;
    Gas calldata_zero_byte = 4;
    std::uint64_t refund_cap_num = 1;
    std::uint64_t refund_cap_den = 2;
    Gas block_gas_limit = 11'741'495;
    std::uint64_t gas_price_gwei = 56;

    /// Charge constants must be strictly positive; refund credits may be
    /// zero (a schedule with refunds disabled is valid).
    void validate() const
    {
        const Gas vals[] = {sstore_set, sstore_update, sstore_clear_cost, sstore_dirty,
            sstore_noop, sload, selfdestruct_cost, call_cost, call_value_cost,
            contract_create_base, contract_code_deposit_per_byte, tx_base, calldata_nonzero_byte,
            calldata_zero_byte, refund_cap_den, block_gas_limit, gas_price_gwei};
        for (auto v : vals)
            if (v == 0)
                throw std::invalid_argument{"gas schedule constants must be strictly positive"};
        if (refund_cap_num > refund_cap_den)
            throw std::invalid_argument{"refund cap fraction must not exceed 1"};
    }

    [[nodiscard]] Gas refund_cap(Gas pre_refund) const
    {
        return pre_refund / refund_cap_den * refund_cap_num +
               pre_refund % refund_cap_den * refund_cap_num / refund_cap_den;
    }

    /// L2 execution schedule: storage-class operations at 1/100 of the L1
    /// cost, refunds disabled. The transaction base stays as-is.
    [[nodiscard]] GasSchedule scaled_l2(std::uint64_t divisor = 100) const
    {
        auto down = [&](Gas g) { return g / divisor > 0 ? g / divisor : Gas{1}; };
        GasSchedule l2 = *this;
        l2.sstore_set = down(sstore_set);
        l2.sstore_update = down(sstore_update);
        l2.sstore_clear_cost = down(sstore_clear_cost);
        l2.sstore_dirty = down(sstore_dirty);
        l2.sstore_noop = down(sstore_noop);
        l2.sload = down(sload);
        l2.selfdestruct_cost = down(selfdestruct_cost);
        l2.call_cost = down(call_cost);
        l2.call_value_cost = down(call_value_cost);
        l2.contract_create_base = down(contract_create_base);
        l2.contract_code_deposit_per_byte = down(contract_code_deposit_per_byte);
        l2.sstore_clear_refund = 0;  // refunds disabled on L2
        l2.selfdestruct_refund = 0;
        return l2;
    }
};

/// Per-transaction gas accounting with the refund cap applied.
struct GasReceipt
{
    Gas gas_used_pre_refund = 0;
    Gas refund_earned = 0;
    Gas refund_applied = 0;
    Gas gas_used_effective = 0;
    std::uint64_t fee_gwei = 0;
};

/// The block gas limit applies to the pre-refunded amount.
[[nodiscard]] inline bool admit_to_block(const GasReceipt& receipt, Gas remaining_block_gas)
{
    return receipt.gas_used_pre_refund <= remaining_block_gas;
}

/// Transaction payload profile used for the intrinsic calldata charge.
struct CalldataProfile
{
    std::uint64_t zero_bytes = 0;
    std::uint64_t nonzero_bytes = 0;
};

/// A metered storage arena mimicking EVM storage-slot and contract
/// lifecycle costs inside explicit transactions.
///
/// Writes follow Istanbul-style net metering: the first write to a slot in
/// a transaction is charged by the zero-ness transition against the value
/// at transaction start, repeat writes are charged at the dirty rate, and
/// value-preserving writes at the no-op rate. Clearing refunds accrue when
/// a slot that was nonzero at transaction start reaches zero.
class StorageArena
{
public:
    explicit StorageArena(GasSchedule schedule = {}) : schedule_{schedule}
    {
        schedule_.validate();
    }

    [[nodiscard]] const GasSchedule& schedule() const { return schedule_; }
    [[nodiscard]] bool tx_open() const { return tx_open_; }
    [[nodiscard]] Gas gas_used() const { return gas_used_; }
    [[nodiscard]] Gas refund_counter() const { return refund_counter_; }

    void begin_tx(const CalldataProfile& calldata = {})
    {
        if (tx_open_)
            throw std::logic_error{"begin_tx: transaction already open"};
        tx_open_ = true;
        gas_used_ = schedule_.tx_base + calldata.nonzero_bytes * schedule_.calldata_nonzero_byte +
                    calldata.zero_bytes * schedule_.calldata_zero_byte;
        refund_counter_ = 0;
        journal_.clear();
        created_.clear();
        pending_destroy_.clear();
    }

    Address create_contract(std::uint64_t code_size)
    {
        require_open();
        charge(schedule_.contract_create_base +
               code_size * schedule_.contract_code_deposit_per_byte);
        const Address addr = next_address_++;
        contracts_[addr] = Contract{code_size, true};
        created_.push_back(addr);
        return addr;
    }

    void self_destruct(Address addr)
    {
        require_open();
        live_contract(addr);
        if (pending_destroy_.contains(addr))
            throw std::logic_error{"self_destruct: contract already destroyed"};
        charge(schedule_.selfdestruct_cost);
        refund_counter_ += schedule_.selfdestruct_refund;
        pending_destroy_.insert(addr);
    }

    /// Surcharge for going through another contract's external interface
    /// (reads or writes on the target still cost their usual amounts).
    void call_contract(Address addr)
    {
        require_open();
        live_contract(addr);
        charge(schedule_.call_cost);
    }

    /// A value-bearing call, e.g. paying out to the coinbase address.
    void transfer_value(Address addr)
    {
        require_open();
        live_contract(addr);
        charge(schedule_.call_cost + schedule_.call_value_cost);
    }

    void sstore(Address addr, SlotId slot, Word value)
    {
        require_open();
        live_contract(addr);
        const SlotKey key{addr, slot};
        Word& cur = slots_[key];
        const auto it = journal_.find(key);
        const Word original = it == journal_.end() ? cur : it->second;

        if (value == cur)
        {
            charge(schedule_.sstore_noop);
            return;
        }
        if (it == journal_.end())
        {
            journal_.emplace(key, cur);
            if (cur.is_zero())
                charge(schedule_.sstore_set);
            else if (value.is_zero())
            {
                charge(schedule_.sstore_clear_cost);
                refund_counter_ += schedule_.sstore_clear_refund;
            }
            else
                charge(schedule_.sstore_update);
        }
        else
        {
            charge(schedule_.sstore_dirty);
            if (value.is_zero() && !original.is_zero())
                refund_counter_ += schedule_.sstore_clear_refund;
        }
        cur = value;
    }

    Word sload(Address addr, SlotId slot)
    {
        require_open();
        live_contract(addr);
        charge(schedule_.sload);
        const auto it = slots_.find(SlotKey{addr, slot});
        return it == slots_.end() ? Word{} : it->second;
    }

    GasReceipt end_tx()
    {
        require_open();
        GasReceipt r;
        r.gas_used_pre_refund = gas_used_;
        r.refund_earned = refund_counter_;
        r.refund_applied = std::min(refund_counter_, schedule_.refund_cap(gas_used_));
        r.gas_used_effective = r.gas_used_pre_refund - r.refund_applied;
        r.fee_gwei = r.gas_used_effective * schedule_.gas_price_gwei;
        for (Address addr : pending_destroy_)
        {
            contracts_.at(addr).alive = false;
            // Destroyed storage is dropped without per-slot refunds.
            std::erase_if(slots_, [&](const auto& kv) { return kv.first.first == addr; });
        }
        close_tx();
        return r;
    }

    /// Undo every state change of the open transaction (no receipt; used
    /// when a transaction does not make it into a block).
    void revert_tx()
    {
        require_open();
        for (const auto& [key, original] : journal_)
        {
            if (original.is_zero())
                slots_.erase(key);
            else
                slots_[key] = original;
        }
        for (Address addr : created_)
            contracts_.erase(addr);
        close_tx();
    }

    // Unmetered inspection, for audits and tests only.
    [[nodiscard]] Word peek(Address addr, SlotId slot) const
    {
        const auto it = slots_.find(SlotKey{addr, slot});
        return it == slots_.end() ? Word{} : it->second;
    }
    [[nodiscard]] bool contract_alive(Address addr) const
    {
        const auto it = contracts_.find(addr);
        return it != contracts_.end() && it->second.alive;
    }
    [[nodiscard]] std::size_t contract_count() const { return contracts_.size(); }

private:
    using SlotKey = std::pair<Address, SlotId>;

    struct SlotKeyHash
    {
        std::size_t operator()(const SlotKey& k) const
        {
            return std::hash<std::uint64_t>{}(k.first * 0x9e3779b97f4a7c15ULL ^ k.second);
        }
    };

    struct Contract
    {
        std::uint64_t code_size = 0;
        bool alive = true;
    };

    void require_open() const
    {
        if (!tx_open_)
            throw std::logic_error{"no open transaction on this arena"};
    }

    Contract& live_contract(Address addr)
    {
        const auto it = contracts_.find(addr);
        if (it == contracts_.end())
            throw std::out_of_range{"unknown contract address"};
        if (!it->second.alive)
            throw std::logic_error{"contract has been destroyed"};
        return it->second;
    }

    void charge(Gas amount) { gas_used_ += amount; }

    void close_tx()
    {
        tx_open_ = false;
        journal_.clear();
        created_.clear();
        pending_destroy_.clear();
    }

    GasSchedule schedule_;
    std::unordered_map<Address, Contract> contracts_;
    std::unordered_map<SlotKey, Word, SlotKeyHash> slots_;
    std::unordered_map<SlotKey, Word, SlotKeyHash> journal_;
    std::vector<Address> created_;
    std::unordered_set<Address> pending_destroy_;
    Address next_address_ = 1;
    bool tx_open_ = false;
    Gas gas_used_ = 0;
    Gas refund_counter_ = 0;
};

}  // namespace gasbook
