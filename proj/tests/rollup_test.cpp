// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#include <gasbook/rollup.hpp>

#include <gtest/gtest.h>

using namespace gasbook;

TEST(encode, shapes_and_determinism)
{
    EXPECT_EQ(encode_call(MarketOp::close_market).size(), 4u);
    EXPECT_EQ(encode_call(MarketOp::submit_bid, {1018, 4}).size(), 4u + 64u);
    EXPECT_EQ(encode_call(MarketOp::submit_bid, {1018, 4}),
        encode_call(MarketOp::submit_bid, {1018, 4}));
    EXPECT_NE(encode_call(MarketOp::submit_bid, {1018, 4}),
        encode_call(MarketOp::submit_ask, {1018, 4}));
    // argument words are big-endian, mostly zero for small values
    const auto payload = encode_call(MarketOp::submit_bid, {1018, 4});
    const auto profile = profile_of(payload);
    EXPECT_EQ(profile.nonzero_bytes + profile.zero_bytes, 68u);
    EXPECT_EQ(profile.nonzero_bytes, 4u + 2u + 1u);  // selector + 0x03fa + 0x04
}

TEST(inbox, close_message_costs_exactly_6569)
{
    // 4-byte call + 99-byte envelope = 103 bytes, all nonzero.
    const auto msg = inbox_submit(encode_call(MarketOp::close_market));
    EXPECT_EQ(msg.nonzero_bytes + msg.zero_bytes, 103u);
    EXPECT_EQ(msg.zero_bytes, 0u);
    EXPECT_EQ(msg.l1_cost, 6'569u);
}

TEST(inbox, order_submission_message_costs_about_6917)
{
    const auto msg = inbox_submit(encode_call(MarketOp::submit_bid, {1018, 4}));
    EXPECT_NEAR(static_cast<double>(msg.l1_cost), 6'917.0, 0.05 * 6'917.0);
}

TEST(inbox, empty_payload_is_overhead_plus_envelope)
{
    const auto msg = inbox_submit({});
    EXPECT_EQ(msg.l1_cost, 4'921u + 99u * 16u);
}

TEST(inbox, cost_is_a_pure_function_of_bytes)
{
    const auto a = inbox_submit(encode_call(MarketOp::close_market));
    const auto b = inbox_submit(encode_call(MarketOp::close_market));
    EXPECT_EQ(a.l1_cost, b.l1_cost);
}

TEST(batch, amortizes_the_carrier_transaction)
{
    Batch batch;
    for (int i = 0; i < 10; ++i)
        batch.messages.push_back(inbox_submit(encode_call(MarketOp::submit_bid, {1000, 1})));
    EXPECT_EQ(batch.total_l1_cost(),
        21'000u + 10u * batch.messages.front().l1_cost);
    EXPECT_LT(batch.amortized_cost_per_message(),
        batch.messages.front().l1_cost + 21'000u / 10 + 1);
}

TEST(l2, fills_match_l1_fills_for_the_same_book)
{
    MarketConfig base;
    const auto book = bench::worst_case_book(12);
    const auto l1 = bench::play_book(PqVariant::heap_dynamic_array, book, base, GasSchedule{});
    const auto l2 = bench::play_book(
        PqVariant::heap_dynamic_array, book, base, GasSchedule{}.scaled_l2());
    ASSERT_EQ(l1.fills, l2.fills);
    EXPECT_LT(l2.receipt.gas_used_effective, l1.receipt.gas_used_effective);
}

TEST(l2, arbgas_grows_with_trades_while_l1_share_stays_flat)
{
    std::optional<Gas> l1_share;
    Gas previous_arbgas = 0;
    for (std::uint64_t pairs : {1u, 4u, 16u, 38u, 64u})
    {
        const auto r = execute_l2_close(pairs);
        if (l1_share)
        {
            EXPECT_EQ(r.l1_share, *l1_share);
        }
        l1_share = r.l1_share;
        EXPECT_GT(r.arbgas, previous_arbgas);
        previous_arbgas = r.arbgas;
    }
    EXPECT_EQ(*l1_share, 6'569u);
}

TEST(l2, close_with_38_pairs_lands_in_the_reported_ish_band)
{
    const auto r = execute_l2_close(38);
    // hundreds of thousands of L2 gas, not an exact reproduction
    EXPECT_GE(r.arbgas, 100'000u);
    EXPECT_LT(r.arbgas, 1'000'000u);
}

TEST(l2, empty_close_costs_about_the_transaction_base)
{
    const auto r = execute_l2_close(0);
    EXPECT_GE(r.arbgas, GasSchedule{}.tx_base);
    EXPECT_LT(r.arbgas, GasSchedule{}.tx_base + 5'000u);
}

TEST(bridge, round_trip_restores_l1_after_the_challenge_period)
{
    Bridge bridge;
    bridge.fund_l1("alice", Asset::ether, 5);
    bridge.deposit("alice", Asset::ether, 5);
    EXPECT_EQ(bridge.l1_balance("alice", Asset::ether), 0u);
    EXPECT_EQ(bridge.l2_balance("alice", Asset::ether), 5u);

    bridge.withdraw("alice", Asset::ether, 5);
    EXPECT_EQ(bridge.l2_balance("alice", Asset::ether), 0u);
    EXPECT_EQ(bridge.pending_withdrawals("alice", Asset::ether), 5u);

    bridge.advance_blocks(100);  // before the period elapses
    EXPECT_EQ(bridge.l1_balance("alice", Asset::ether), 0u);
    EXPECT_EQ(bridge.pending_withdrawals("alice", Asset::ether), 5u);

    bridge.advance_blocks(140);  // 240 blocks total
    EXPECT_EQ(bridge.l1_balance("alice", Asset::ether), 5u);
    EXPECT_EQ(bridge.pending_withdrawals("alice", Asset::ether), 0u);
}

TEST(bridge, overdrafts_are_errors)
{
    Bridge bridge;
    bridge.fund_l1("bob", Asset::token, 3);
    EXPECT_THROW(bridge.deposit("bob", Asset::token, 4), std::logic_error);
    bridge.deposit("bob", Asset::token, 3);
    EXPECT_THROW(bridge.withdraw("bob", Asset::token, 4), std::logic_error);
}

TEST(savings, meets_the_headline_ratio_at_38_pairs)
{
    const auto row = savings_report(38);
    EXPECT_EQ(row.l1_rollup, 6'569u);
    EXPECT_GE(row.savings, 0.998);
}

TEST(savings, monotone_nondecreasing_in_pairs)
{
    double previous = 0.0;
    for (std::uint64_t pairs : {1u, 2u, 8u, 38u, 100u})
    {
        const auto row = savings_report(pairs);
        EXPECT_GE(row.savings + 1e-12, previous);
        previous = row.savings;
    }
}

TEST(savings, zero_pairs_uses_base_costs_only)
{
    const auto row = savings_report(0);
    EXPECT_EQ(row.l1_rollup, 6'569u);
    EXPECT_GT(row.l1_direct, 0u);
    EXPECT_LT(row.savings, 0.998);  // nothing trades, only base costs differ
}
