// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The acceptance suite: every criterion prints one pass/fail line. The
// two queue-economics criteria are evaluated on the layout documented for
// them: the drain ranking under the order-keyed heap_key_value layout
// (the default), the capacity ranking under the packed-rank layout (see
// README, "heap_key_value layouts").
#include "matching_oracle.hpp"

#include <gasbook/bench.hpp>
#include <gasbook/market.hpp>
#include <gasbook/rollup.hpp>
#include <gasbook/scenario.hpp>

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>

using namespace gasbook;

namespace
{
struct Outcome
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            detail << "  failed: " << what << '\n';
        }
    }
};

void report(int number, const std::string& label, const Outcome& outcome)
{
    std::printf("[ACCEPTANCE] criterion %d (%s): %s\n", number, label.c_str(),
        outcome.pass ? "PASS" : "FAIL");
    std::fflush(stdout);
    EXPECT_TRUE(outcome.pass) << outcome.detail.str();
}

std::vector<Order> walkthrough_book()
{
    return {
        {"Mehdi", Side::ask, 1018, 4},
        {"Avni", Side::bid, 1200, 3},
        {"Kritee", Side::bid, 1300, 3},
        {"Bob", Side::bid, 1215, 1},
        {"Navjot", Side::ask, 1015, 4},
        {"Alice", Side::ask, 1000, 1},
    };
}

struct PlayedBook
{
    std::vector<Fill> fills;
    std::uint64_t miner_revenue = 0;
    std::unique_ptr<CallMarket> market;
    std::unique_ptr<StorageArena> arena;
};

PlayedBook play(const std::vector<Order>& book, MarketConfig cfg = {})
{
    if (cfg.order_cap < book.size())
        cfg.order_cap = book.size();
    if (cfg.pq.static_capacity < book.size())
        cfg.pq.static_capacity = book.size();
    PlayedBook out;
    out.arena = std::make_unique<StorageArena>();
    auto& arena = *out.arena;
    arena.begin_tx();
    out.market = std::make_unique<CallMarket>(arena, cfg);
    arena.end_tx();
    for (const auto& o : book)
    {
        arena.begin_tx();
        if (o.side == Side::bid)
            out.market->deposit(arena, o.trader, Asset::ether, o.price * o.volume);
        else
            out.market->deposit(arena, o.trader, Asset::token, o.volume);
        arena.end_tx();
    }
    arena.begin_tx();
    out.market->open_market(arena);
    arena.end_tx();
    for (const auto& o : book)
    {
        arena.begin_tx();
        if (o.side == Side::bid)
            out.market->submit_bid(arena, o.trader, o.price, o.volume);
        else
            out.market->submit_ask(arena, o.trader, o.price, o.volume);
        arena.end_tx();
    }
    arena.begin_tx();
    out.fills = out.market->close_market(arena, "miner");
    arena.end_tx();
    out.miner_revenue = out.market->miner_revenue();
    return out;
}

std::vector<Order> random_book(std::mt19937_64& rng, int max_orders, bool distinct_prices)
{
    std::uniform_int_distribution<int> count{2, max_orders};
    std::uniform_int_distribution<std::uint64_t> price{1, 4000};
    std::uniform_int_distribution<std::uint64_t> volume{1, 9};
    std::uniform_int_distribution<int> side{0, 1};
    const int n = count(rng);
    std::vector<Order> book;
    std::unordered_set<std::uint64_t> seen;
    for (int i = 0; i < n; ++i)
    {
        std::uint64_t p = price(rng);
        if (distinct_prices)
        {
            while (seen.contains(p))
                p = price(rng);
            seen.insert(p);
        }
        book.push_back(Order{"t" + std::to_string(i),
            side(rng) == 0 ? Side::bid : Side::ask, p, volume(rng)});
    }
    return book;
}
}  // namespace

TEST(acceptance, c1_matching_walkthrough)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;

    MarketConfig cfg;
    cfg.matching = MatchPolicy::nearest_bid_first;  // walkthrough pairing rule
    const auto book = walkthrough_book();
    auto played = play(book, cfg);

    const std::vector<Fill> expected = {
        {"Avni", "Alice", 1, 1200, 1000},
        {"Avni", "Navjot", 2, 1200, 1015},
        {"Bob", "Navjot", 1, 1215, 1015},
        {"Kritee", "Navjot", 1, 1300, 1015},
        {"Kritee", "Mehdi", 2, 1300, 1018},
    };
    o.require(played.fills == expected, "fill sequence deviates from the walkthrough");
    const std::uint64_t per_unit[] = {200, 185, 200, 285, 282};
    for (std::size_t i = 0; i < played.fills.size() && i < 5; ++i)
        o.require(played.fills[i].improvement_per_unit() == per_unit[i],
            "per-unit improvement " + std::to_string(i));
    o.require(played.miner_revenue == 1619, "total miner revenue is 16.19");
    o.require(played.market->ledger().withdrawable("Mehdi", Asset::token) == 2,
        "Mehdi keeps 2 unfilled tokens");

    // Independent confirmation: the brute-force matcher agrees on every
    // traded quantity and on the revenue total.
    const auto oracle = oracle::match_book(book);
    o.require(oracle.miner_revenue == played.miner_revenue, "oracle revenue agrees");
    auto volume_by_seller = [](const std::vector<Fill>& fills) {
        std::map<std::string, std::uint64_t> sums;
        for (const auto& f : fills)
            sums[f.seller] += f.volume;
        return sums;
    };
    o.require(volume_by_seller(oracle.fills) == volume_by_seller(played.fills),
        "oracle quantities agree");

    const auto elapsed = std::chrono::steady_clock::now() - start;
    o.require(elapsed < std::chrono::seconds{1}, "runtime under one second");
    report(1, "matching walkthrough", o);
}

TEST(acceptance, c2_property_suite)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    std::mt19937_64 rng{20'26};

    for (int trial = 0; trial < 1000 && o.pass; ++trial)
    {
        const bool distinct = trial % 2 == 1;
        auto book = random_book(rng, 200, distinct);
        auto played = play(book);

        const auto expected = oracle::match_book(book);
        o.require(played.fills == expected.fills,
            "oracle equivalence, trial " + std::to_string(trial));
        o.require(played.miner_revenue == expected.miner_revenue,
            "oracle revenue, trial " + std::to_string(trial));

        std::uint64_t debits = 0, credits = 0;
        for (const auto& f : played.fills)
        {
            o.require(f.bid_price >= f.ask_price, "non-negative improvement");
            debits += f.buyer_pays();
            credits += f.seller_receives();
        }
        o.require(debits == credits + played.miner_revenue, "currency conservation");

        std::uint64_t tokens_total = 0, tokens_after = 0;
        for (const auto& ord : book)
            if (ord.side == Side::ask)
                tokens_total += ord.volume;
        for (const auto& [key, amount] : played.market->ledger().totals())
            if (key.second == static_cast<int>(Asset::token))
                tokens_after += amount;
        o.require(tokens_total == tokens_after, "token conservation");

        if (distinct)
        {
            std::shuffle(book.begin(), book.end(), rng);
            auto permuted = play(book);
            o.require(permuted.fills == played.fills, "permutation invariance (fills)");
            o.require(permuted.miner_revenue == played.miner_revenue,
                "permutation invariance (revenue)");
        }
    }

    const auto elapsed = std::chrono::steady_clock::now() - start;
    o.require(elapsed < std::chrono::seconds{30}, "runtime under thirty seconds");
    report(2, "property suite over 1000 random books", o);
}

TEST(acceptance, c3_queue_behavioral_equivalence)
{
    Outcome o;
    std::mt19937_64 rng{77};
    std::uniform_int_distribution<int> len{1, 50};
    std::uniform_int_distribution<std::uint64_t> price{1, 25};  // dense ties

    for (int trial = 0; trial < 1000 && o.pass; ++trial)
    {
        const auto dir = trial % 2 == 0 ? QueueDirection::max_first : QueueDirection::min_first;
        const int n = len(rng);
        std::vector<QueueEntry> entries;
        for (int i = 0; i < n; ++i)
            entries.push_back(
                {price(rng), static_cast<std::uint64_t>(i + 1), static_cast<std::uint64_t>(i)});

        std::vector<QueueEntry> reference;
        for (auto variant : kAllPqVariants)
        {
            StorageArena arena;
            arena.begin_tx();
            auto q = make_queue(variant, dir, CleanupPolicy::clean, arena);
            arena.end_tx();
            for (const auto& e : entries)
            {
                arena.begin_tx();
                q->enqueue(arena, e);
                arena.end_tx();
                o.require(q->audit(arena), "structure audit after enqueue");
            }
            std::vector<QueueEntry> drained;
            while (q->size_unmetered(arena) != 0)
            {
                arena.begin_tx();
                drained.push_back(q->dequeue(arena));
                arena.end_tx();
                o.require(q->audit(arena), "structure audit after dequeue");
            }
            if (variant == PqVariant::heap_dynamic_array)
                reference = drained;
            else
                o.require(drained == reference,
                    "sequence equivalence for " + to_string(variant) + ", trial " +
                        std::to_string(trial));
        }
    }
    report(3, "queue behavioral equivalence over 1000 multisets", o);
}

TEST(acceptance, c4_drain_gas_rankings)
{
    Outcome o;
    struct Target
    {
        PqVariant variant;
        Gas reported;
    };
    // Reference drain-50 figures, in the expected cost order.
    const Target targets[] = {
        {PqVariant::linked_list_contracts, 557'085},
        {PqVariant::linked_list_key_value, 731'514},
        {PqVariant::heap_static_array, 1'385'307},
        {PqVariant::heap_dynamic_array, 2'518'131},
        {PqVariant::heap_key_value, 2'781'684},
    };
    Gas previous = 0;
    for (const auto& t : targets)
    {
        const auto rep = bench::drain_cost_report(t.variant, CleanupPolicy::clean, 50, 7);
        const Gas eff = rep.drain.gas_used_effective;
        o.require(eff > previous,
            "ranking: " + to_string(t.variant) + " above its predecessor");
        o.require(eff >= t.reported / 2 && eff <= t.reported * 2,
            to_string(t.variant) + " within a factor of two of " + std::to_string(t.reported) +
                " (got " + std::to_string(eff) + ")");
        previous = eff;
    }

    // Cleanup directions: destruction pays for the node-contract list,
    // deletion does not pay for the key-value list.
    const auto llc_clean =
        bench::drain_cost_report(PqVariant::linked_list_contracts, CleanupPolicy::clean, 50, 7);
    const auto llc_leave =
        bench::drain_cost_report(PqVariant::linked_list_contracts, CleanupPolicy::leave, 50, 7);
    o.require(llc_clean.drain.gas_used_effective < llc_leave.drain.gas_used_effective,
        "node-contract list: clean beats leave");
    const auto llkv_clean =
        bench::drain_cost_report(PqVariant::linked_list_key_value, CleanupPolicy::clean, 50, 7);
    const auto llkv_leave =
        bench::drain_cost_report(PqVariant::linked_list_key_value, CleanupPolicy::leave, 50, 7);
    o.require(llkv_leave.drain.gas_used_effective < llkv_clean.drain.gas_used_effective,
        "key-value list: leave beats clean");
    report(4, "drain-50 gas rankings and cleanup directions", o);
}

TEST(acceptance, c5_worst_case_capacity)
{
    Outcome o;
    MarketConfig base;
    base.pq.hkv_key_mode = HkvKeyMode::packed_rank;  // price-keyed layout

    struct Target
    {
        PqVariant variant;
        std::uint64_t reported;
    };
    const Target targets[] = {
        {PqVariant::linked_list_contracts, 152},
        {PqVariant::linked_list_key_value, 86},
        {PqVariant::heap_key_value, 46},
        {PqVariant::heap_static_array, 42},
        {PqVariant::heap_dynamic_array, 38},
    };
    const GasSchedule schedule;
    std::uint64_t previous = ~0ull;
    for (const auto& t : targets)
    {
        const std::uint64_t n =
            bench::max_trades_under_limit(t.variant, schedule.block_gas_limit, base);
        o.require(n < previous, "capacity ordering at " + to_string(t.variant));
        o.require(n >= t.reported / 2 && n <= t.reported + t.reported / 2,
            to_string(t.variant) + " within 50% of " + std::to_string(t.reported) + " (got " +
                std::to_string(n) + ")");
        previous = n;

        const auto probe = bench::worst_case_close(t.variant, n, base);
        o.require(probe.fills.size() == n,
            to_string(t.variant) + " close executes every submitted pair");
        o.require(probe.receipt.refund_applied ==
                      schedule.refund_cap(probe.receipt.gas_used_pre_refund),
            to_string(t.variant) + " close receipt hits the refund cap exactly");
        o.require(probe.receipt.gas_used_pre_refund <= schedule.block_gas_limit,
            to_string(t.variant) + " close fits the block");
    }
    report(5, "worst-case capacity rankings", o);
}

TEST(acceptance, c6_refund_arithmetic)
{
    Outcome o;
    std::mt19937_64 rng{6};
    for (int trial = 0; trial < 500; ++trial)
    {
        StorageArena arena;
        arena.begin_tx();
        const Address a = arena.create_contract(0);
        std::uniform_int_distribution<SlotId> slot{0, 15};
        std::uniform_int_distribution<std::uint64_t> val{0, 3};
        std::uniform_int_distribution<int> op{0, 5};
        for (int i = 0; i < 60; ++i)
        {
            if (op(rng) == 0)
                arena.sload(a, slot(rng));
            else
                arena.sstore(a, slot(rng), val(rng));
        }
        const GasReceipt r = arena.end_tx();
        const Gas cap = r.gas_used_pre_refund / 2;
        o.require(r.refund_applied == std::min(r.refund_earned, cap),
            "refund cap identity, trial " + std::to_string(trial));
        o.require(r.gas_used_effective == r.gas_used_pre_refund - r.refund_applied,
            "effective gas identity, trial " + std::to_string(trial));
    }

    // Admission is judged on pre-refund gas: a full-refund 11M transaction
    // does not fit a 10M budget even though it nets 5.5M.
    GasSchedule s;
    s.tx_base = 11'000'000 - s.sstore_clear_cost;
    s.sstore_clear_refund = 6'000'000;
    StorageArena arena{s};
    arena.begin_tx();
    const Address a = arena.create_contract(0);
    arena.sstore(a, 0, 1);
    arena.end_tx();
    arena.begin_tx();
    arena.sstore(a, 0, 0);
    const GasReceipt r = arena.end_tx();
    o.require(r.gas_used_effective == 5'500'000, "half-capped effective gas");
    o.require(!admit_to_block(r, 10'000'000), "pre-refund admission rejects");
    report(6, "refund arithmetic and pre-refund admission", o);
}

TEST(acceptance, c7_front_running_verdicts)
{
    Outcome o;
    MinerPolicy policy;
    policy.kind = PolicyKind::adversarial;

    for (std::uint64_t seed : {1u, 5u, 12u, 77u, 1001u, 31337u})
    {
        for (const std::string name : {"insertion", "displacement"})
        {
            const auto cm = run_scenario(name, Venue::call_market, policy, seed);
            o.require(cm.attacker_profit == 0,
                name + " profit is exactly zero on the call market, seed " +
                    std::to_string(seed));
            const auto cda = run_scenario(name, Venue::continuous_book, policy, seed);
            o.require(cda.attacker_profit > 0,
                name + " profits on the continuous baseline, seed " + std::to_string(seed));
        }
        const auto hybrid = run_scenario("hybrid", Venue::call_market, policy, seed);
        o.require(hybrid.attacker_profit == 0, "hybrid extraction nets zero");
        const auto p = sim::detail::params_of(seed);
        o.require(hybrid.miner_revenue == 200 * p.volume,
            "the improvement lands in miner revenue");
    }

    const auto missed = suppression_scenario(3, Venue::call_market, 9);
    o.require(missed.verdict == "partial", "suppression is a partial mitigation");
    o.require(missed.suppression_cost_gwei == 3ull * 11'741'495ull * 56ull,
        "suppression cost is k * block gas limit * gas price");
    report(7, "front-running verdicts", o);
}

TEST(acceptance, c8_rollup_split)
{
    Outcome o;

    const auto close_msg = inbox_submit(encode_call(MarketOp::close_market));
    o.require(close_msg.nonzero_bytes + close_msg.zero_bytes == 103,
        "close message is 103 bytes");
    o.require(close_msg.l1_cost == 6'569, "close message costs exactly 6,569 L1 gas");

    const auto row = savings_report(38);
    o.require(row.savings >= 0.998, "savings ratio at 38 pairs is at least 99.8% (got " +
                                        std::to_string(row.savings) + ")");

    std::optional<Gas> l1_cost;
    Gas previous_arbgas = 0;
    for (std::uint64_t pairs : {1u, 2u, 5u, 10u, 20u, 38u, 50u, 100u, 200u, 400u, 700u, 1000u})
    {
        const auto r = execute_l2_close(pairs);
        if (l1_cost)
            o.require(r.l1_share == *l1_cost,
                "L1 inbox cost flat at " + std::to_string(pairs) + " pairs");
        l1_cost = r.l1_share;
        o.require(r.arbgas > previous_arbgas,
            "ArbGas strictly increasing at " + std::to_string(pairs) + " pairs");
        previous_arbgas = r.arbgas;
    }
    report(8, "rollup cost split", o);
}
