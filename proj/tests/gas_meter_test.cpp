// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#include <gasbook/config.hpp>
#include <gasbook/gas.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <thread>

using namespace gasbook;

TEST(schedule, default_constants)
{
    const GasSchedule s;
    EXPECT_EQ(s.sstore_clear_refund, 15'000u);
    EXPECT_EQ(s.selfdestruct_refund, 24'000u);
    EXPECT_EQ(s.refund_cap_num, 1u);
    EXPECT_EQ(s.refund_cap_den, 2u);
    EXPECT_EQ(s.block_gas_limit, 11'741'495u);
    EXPECT_EQ(s.gas_price_gwei, 56u);
    EXPECT_NO_THROW(s.validate());
}

TEST(schedule, rejects_zero_constants)
{
    GasSchedule s;
    s.sload = 0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(schedule, loads_from_key_value_file)
{
    const char* path = "schedule_test.cfg";
    {
        std::ofstream out{path};
        out << "# test schedule\n"
            << "sload = 123\n"
            << "block_gas_limit = 1000000\n";
    }
    const GasSchedule s = load_schedule(path);
    EXPECT_EQ(s.sload, 123u);
    EXPECT_EQ(s.block_gas_limit, 1'000'000u);
    EXPECT_EQ(s.tx_base, 21'000u);  // untouched keys keep defaults
    std::remove(path);
}

TEST(arena, begin_tx_charges_base)
{
    StorageArena arena;
    arena.begin_tx();
    EXPECT_EQ(arena.gas_used(), 21'000u);
    EXPECT_EQ(arena.refund_counter(), 0u);
}

TEST(arena, nested_begin_tx_is_an_error)
{
    StorageArena arena;
    arena.begin_tx();
    EXPECT_THROW(arena.begin_tx(), std::logic_error);
}

TEST(arena, empty_tx_costs_base)
{
    StorageArena arena;
    arena.begin_tx();
    const GasReceipt r = arena.end_tx();
    EXPECT_EQ(r.gas_used_effective, 21'000u);
    EXPECT_EQ(r.refund_applied, 0u);
}

TEST(arena, sstore_transition_charges)
{
    StorageArena arena;
    arena.begin_tx();
    const Address a = arena.create_contract(0);
    const Gas before_set = arena.gas_used();
    arena.sstore(a, 1, 7);
    EXPECT_EQ(arena.gas_used() - before_set, arena.schedule().sstore_set);
    EXPECT_EQ(arena.refund_counter(), 0u);
    arena.end_tx();

    arena.begin_tx();
    const Gas before_update = arena.gas_used();
    arena.sstore(a, 1, 9);
    EXPECT_EQ(arena.gas_used() - before_update, arena.schedule().sstore_update);
    EXPECT_EQ(arena.refund_counter(), 0u);
    arena.end_tx();

    arena.begin_tx();
    const Gas before_clear = arena.gas_used();
    arena.sstore(a, 1, 0);
    EXPECT_EQ(arena.gas_used() - before_clear, arena.schedule().sstore_clear_cost);
    EXPECT_EQ(arena.refund_counter(), 15'000u);
    arena.end_tx();
}

TEST(arena, repeat_writes_charge_dirty_rate)
{
    StorageArena arena;
    arena.begin_tx();
    const Address a = arena.create_contract(0);
    arena.sstore(a, 1, 7);
    const Gas before = arena.gas_used();
    arena.sstore(a, 1, 9);
    EXPECT_EQ(arena.gas_used() - before, arena.schedule().sstore_dirty);
    const Gas before_noop = arena.gas_used();
    arena.sstore(a, 1, 9);
    EXPECT_EQ(arena.gas_used() - before_noop, arena.schedule().sstore_noop);
}

TEST(arena, dirty_clear_still_earns_refund_once_per_clear)
{
    StorageArena arena;
    arena.begin_tx();
    const Address a = arena.create_contract(0);
    arena.sstore(a, 1, 7);
    arena.end_tx();

    arena.begin_tx();
    arena.sstore(a, 1, 9);   // dirty the slot
    arena.sstore(a, 1, 0);   // dirty clear of an originally nonzero slot
    EXPECT_EQ(arena.refund_counter(), 15'000u);
    arena.end_tx();
}

TEST(arena, sload_defaults_and_additivity)
{
    StorageArena arena;
    arena.begin_tx();
    const Address a = arena.create_contract(0);
    EXPECT_TRUE(arena.sload(a, 5).is_zero());
    arena.sstore(a, 5, 7);
    EXPECT_EQ(arena.sload(a, 5).low(), 7u);
    const Gas before = arena.gas_used();
    arena.sload(a, 5);
    arena.sload(a, 5);
    EXPECT_EQ(arena.gas_used() - before, 2 * arena.schedule().sload);
}

TEST(arena, create_contract_costs_and_addresses)
{
    StorageArena arena;
    arena.begin_tx();
    const Gas before = arena.gas_used();
    const Address a = arena.create_contract(0);
    EXPECT_EQ(arena.gas_used() - before, 32'000u);
    const Gas before2 = arena.gas_used();
    const Address b = arena.create_contract(100);
    EXPECT_EQ(arena.gas_used() - before2, 52'000u);
    EXPECT_NE(a, b);
}

TEST(arena, selfdestruct_refund_is_flat)
{
    StorageArena arena;
    arena.begin_tx();
    const Address small = arena.create_contract(0);
    arena.sstore(small, 0, 1);
    const Address big = arena.create_contract(0);
    for (SlotId s = 0; s < 100; ++s)
        arena.sstore(big, s, s + 1);

    arena.self_destruct(small);
    EXPECT_EQ(arena.refund_counter(), 24'000u);
    arena.self_destruct(big);
    EXPECT_EQ(arena.refund_counter(), 48'000u);
    EXPECT_THROW(arena.self_destruct(big), std::logic_error);
    arena.end_tx();

    // Dead after commit: unreadable, unwritable, indestructible.
    arena.begin_tx();
    EXPECT_THROW(arena.sload(big, 0), std::logic_error);
    EXPECT_THROW(arena.sstore(big, 0, 1), std::logic_error);
    EXPECT_THROW(arena.self_destruct(big), std::logic_error);
    EXPECT_THROW(arena.sload(12345, 0), std::out_of_range);
}

namespace
{
/// Runs a transaction whose pre-refund gas and earned refund land exactly
/// on the requested values: the base cost is tuned so that one clearing
/// write totals `pre_refund`, and the clear refund is set to `refund`.
GasReceipt receipt_with(Gas pre_refund, Gas refund)
{
    GasSchedule s;
    s.tx_base = pre_refund - s.sstore_clear_cost;
    s.sstore_clear_refund = refund;
    StorageArena arena{s};
    arena.begin_tx();
    const Address a = arena.create_contract(0);
    arena.sstore(a, 0, 1);
    arena.end_tx();

    arena.begin_tx();
    arena.sstore(a, 0, 0);
    const GasReceipt r = arena.end_tx();
    EXPECT_EQ(r.gas_used_pre_refund, pre_refund);
    EXPECT_EQ(r.refund_earned, refund);
    return r;
}
}  // namespace

TEST(receipt, refund_cap_arithmetic)
{
    const GasReceipt capped = receipt_with(100'000, 80'000);
    EXPECT_EQ(capped.gas_used_pre_refund, 100'000u);
    EXPECT_EQ(capped.refund_applied, 50'000u);
    EXPECT_EQ(capped.gas_used_effective, 50'000u);

    const GasReceipt uncapped = receipt_with(100'000, 30'000);
    EXPECT_EQ(uncapped.refund_applied, 30'000u);
    EXPECT_EQ(uncapped.gas_used_effective, 70'000u);

    const GasReceipt full = receipt_with(11'000'000, 6'000'000);
    EXPECT_EQ(full.gas_used_effective, 5'500'000u);
}

TEST(receipt, fee_uses_effective_gas)
{
    const GasReceipt r = receipt_with(100'000, 80'000);
    EXPECT_EQ(r.fee_gwei, 50'000u * 56u);
}

TEST(block_admission, pre_refund_governs)
{
    GasReceipt fits;
    fits.gas_used_pre_refund = 11'741'495;
    EXPECT_TRUE(admit_to_block(fits, GasSchedule{}.block_gas_limit));

    GasReceipt over;
    over.gas_used_pre_refund = 11'741'496;
    EXPECT_FALSE(admit_to_block(over, GasSchedule{}.block_gas_limit));

    const GasReceipt half = receipt_with(11'000'000, 6'000'000);
    EXPECT_EQ(half.gas_used_effective, 5'500'000u);
    EXPECT_FALSE(admit_to_block(half, 10'000'000));
}

TEST(arena, revert_restores_prior_state)
{
    StorageArena arena;
    arena.begin_tx();
    const Address a = arena.create_contract(0);
    arena.sstore(a, 1, 7);
    arena.end_tx();

    arena.begin_tx();
    arena.sstore(a, 1, 42);
    const Address b = arena.create_contract(0);
    arena.revert_tx();
    EXPECT_EQ(arena.peek(a, 1).low(), 7u);
    EXPECT_FALSE(arena.contract_alive(b));

    arena.begin_tx();
    arena.sstore(a, 1, 42);
    arena.end_tx();
    EXPECT_EQ(arena.peek(a, 1).low(), 42u);
}

TEST(arena, refund_monotonicity)
{
    // Adding one extra nonzero->zero write never decreases the refund.
    std::mt19937_64 rng{7};
    for (int trial = 0; trial < 50; ++trial)
    {
        StorageArena arena;
        arena.begin_tx();
        const Address a = arena.create_contract(0);
        for (SlotId s = 0; s < 20; ++s)
            arena.sstore(a, s, s + 1);
        arena.end_tx();

        arena.begin_tx();
        std::uniform_int_distribution<SlotId> slot{0, 19};
        std::uniform_int_distribution<int> val{0, 3};
        for (int i = 0; i < 30; ++i)
            arena.sstore(a, slot(rng), static_cast<std::uint64_t>(val(rng)));
        const Gas before = arena.refund_counter();
        // find a nonzero slot and clear it
        for (SlotId s = 0; s < 20; ++s)
        {
            if (!arena.peek(a, s).is_zero())
            {
                arena.sstore(a, s, 0);
                break;
            }
        }
        EXPECT_GE(arena.refund_counter(), before);
        arena.end_tx();
    }
}

TEST(arena, randomized_receipt_identity)
{
    // effective = pre_refund - min(refund_earned, floor(pre_refund / 2))
    // on random operation sequences, and the meter is additive.
    std::mt19937_64 rng{2026};
    for (int trial = 0; trial < 200; ++trial)
    {
        StorageArena arena;
        arena.begin_tx();
        std::vector<Address> contracts{arena.create_contract(0)};
        Gas sum_of_charges = arena.gas_used();
        std::uniform_int_distribution<int> op{0, 4};
        std::uniform_int_distribution<SlotId> slot{0, 7};
        std::uniform_int_distribution<std::uint64_t> val{0, 2};
        for (int i = 0; i < 40; ++i)
        {
            const Gas before = arena.gas_used();
            switch (op(rng))
            {
            case 0:
            case 1:
                arena.sstore(contracts[0], slot(rng), val(rng));
                break;
            case 2:
                arena.sload(contracts[0], slot(rng));
                break;
            case 3:
                contracts.push_back(arena.create_contract(i % 3 == 0 ? 100 : 0));
                break;
            default:
                if (contracts.size() > 1 && arena.contract_alive(contracts.back()))
                {
                    arena.self_destruct(contracts.back());
                    contracts.pop_back();
                }
                break;
            }
            sum_of_charges += arena.gas_used() - before;
        }
        EXPECT_EQ(arena.gas_used(), sum_of_charges);

        const GasReceipt r = arena.end_tx();
        const Gas cap = r.gas_used_pre_refund / 2;
        EXPECT_EQ(r.refund_applied, std::min(r.refund_earned, cap));
        EXPECT_EQ(r.gas_used_effective, r.gas_used_pre_refund - r.refund_applied);
    }
}

TEST(arena, calldata_charged_in_intrinsic_cost)
{
    StorageArena arena;
    arena.begin_tx(CalldataProfile{10, 4});
    EXPECT_EQ(arena.gas_used(), 21'000u + 4u * 16u + 10u * 4u);
}

TEST(arena, independent_arenas_run_concurrently)
{
    // One arena per thread; results match a serial run exactly.
    auto workload = [](std::uint64_t salt) {
        StorageArena arena;
        arena.begin_tx();
        const Address a = arena.create_contract(100);
        for (SlotId s = 0; s < 64; ++s)
            arena.sstore(a, s, s * salt + 1);
        for (SlotId s = 0; s < 64; s += 2)
            arena.sstore(a, s, 0);
        arena.self_destruct(a);
        return arena.end_tx();
    };

    std::vector<GasReceipt> serial;
    for (std::uint64_t t = 1; t <= 4; ++t)
        serial.push_back(workload(t));

    std::vector<GasReceipt> parallel(4);
    std::vector<std::thread> threads;
    for (std::uint64_t t = 1; t <= 4; ++t)
        threads.emplace_back([&, t] { parallel[t - 1] = workload(t); });
    for (auto& th : threads)
        th.join();

    for (std::size_t i = 0; i < 4; ++i)
    {
        EXPECT_EQ(parallel[i].gas_used_pre_refund, serial[i].gas_used_pre_refund);
        EXPECT_EQ(parallel[i].gas_used_effective, serial[i].gas_used_effective);
    }
}
