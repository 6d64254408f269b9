// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "encode.hpp"
#include "gas.hpp"
#include "market.hpp"
#include "pq.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gasbook::bench
{
/// Random integer entries in the spirit of the queue unit benchmarks: the
/// integer doubles as priority and payload.
inline std::vector<QueueEntry> random_entries(std::uint64_t n, std::uint64_t seed)
{
    std::mt19937_64 rng{seed};
    std::uniform_int_distribution<std::uint64_t> value{1, 1000};
    std::vector<QueueEntry> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
    {
        const std::uint64_t v = value(rng);
        out.push_back(QueueEntry{v, v, i});
    }
    return out;
}

/// Per-insert receipts for enqueuing `n` random integers, one transaction
/// per insert (the submitting trader pays each one).
inline std::vector<GasReceipt> enqueue_series(PqVariant variant, std::uint64_t n,
    std::uint64_t seed, QueueDirection dir = QueueDirection::max_first,
    CleanupPolicy policy = CleanupPolicy::clean, const PqConfig& cfg = {})
{
    StorageArena arena;
    arena.begin_tx();
    auto queue = make_queue(variant, dir, policy, arena, cfg);
    arena.end_tx();

    std::vector<GasReceipt> receipts;
    receipts.reserve(n);
    for (const auto& e : random_entries(n, seed))
    {
        arena.begin_tx();
        queue->enqueue(arena, e);
        receipts.push_back(arena.end_tx());
    }
    return receipts;
}

struct DrainReport
{
    PqVariant variant = PqVariant::heap_dynamic_array;
    CleanupPolicy policy = CleanupPolicy::clean;
    std::uint64_t n = 0;
    Gas fill_total = 0;       // effective gas summed over the fill transactions
    GasReceipt drain;         // the single drain-everything transaction
};

/// Fills a fresh queue with `n` random entries (one transaction each) and
/// drains it in a single transaction.
inline DrainReport drain_cost_report(PqVariant variant, CleanupPolicy policy, std::uint64_t n,
    std::uint64_t seed, const PqConfig& cfg = {})
{
    DrainReport report;
    report.variant = variant;
    report.policy = policy;
    report.n = n;

    StorageArena arena;
    arena.begin_tx();
    auto queue = make_queue(variant, QueueDirection::max_first, policy, arena, cfg);
    arena.end_tx();

    for (const auto& e : random_entries(n, seed))
    {
        arena.begin_tx();
        queue->enqueue(arena, e);
        report.fill_total += arena.end_tx().gas_used_effective;
    }

    // Dequeue's own size read serves as the emptiness check.
    arena.begin_tx();
    while (queue->size_unmetered(arena) != 0)
        queue->dequeue(arena);
    report.drain = arena.end_tx();
    return report;
}

/// A fully marketable book: every bid crosses every ask, unit volumes,
/// distinct traders and prices.
inline std::vector<Order> worst_case_book(std::uint64_t n_pairs)
{
    std::vector<Order> book;
    book.reserve(2 * n_pairs);
    for (std::uint64_t i = 0; i < n_pairs; ++i)
        book.push_back(Order{"s" + std::to_string(i), Side::ask, 100'000 + i, 1});
    for (std::uint64_t j = 0; j < n_pairs; ++j)
        book.push_back(Order{"b" + std::to_string(j), Side::bid, 500'000 + j, 1});
    return book;
}

struct CloseProbe
{
    GasReceipt receipt;
    std::vector<Fill> fills;
    Gas avg_submission = 0;
};

/// Deploys a market on the given backend, plays a book into it (deposits
/// and submissions in their own transactions) and closes it in one
/// transaction.
inline CloseProbe play_book(PqVariant variant, const std::vector<Order>& book,
    MarketConfig base = {}, const GasSchedule& schedule = {})
{
    MarketConfig cfg = base;
    cfg.backend = variant;
    if (cfg.order_cap < book.size())
        cfg.order_cap = book.size();
    if (cfg.pq.static_capacity < book.size())
        cfg.pq.static_capacity = book.size();

    StorageArena arena{schedule};
    arena.begin_tx();
    CallMarket market{arena, cfg};
    arena.end_tx();

    for (const auto& o : book)
    {
        arena.begin_tx();
        if (o.side == Side::bid)
            market.deposit(arena, o.trader, Asset::ether, o.price * o.volume);
        else
            market.deposit(arena, o.trader, Asset::token, o.volume);
        arena.end_tx();
    }

    arena.begin_tx();
    market.open_market(arena);
    arena.end_tx();

    CloseProbe probe;
    Gas submission_total = 0;
    for (const auto& o : book)
    {
        const auto payload = encode_call(
            o.side == Side::bid ? MarketOp::submit_bid : MarketOp::submit_ask,
            {o.price, o.volume});
        arena.begin_tx(profile_of(payload));
        if (o.side == Side::bid)
            market.submit_bid(arena, o.trader, o.price, o.volume);
        else
            market.submit_ask(arena, o.trader, o.price, o.volume);
        submission_total += arena.end_tx().gas_used_effective;
    }
    if (!book.empty())
        probe.avg_submission = submission_total / book.size();

    const auto close_payload = encode_call(MarketOp::close_market);
    arena.begin_tx(profile_of(close_payload));
    probe.fills = market.close_market(arena, "miner");
    probe.receipt = arena.end_tx();
    return probe;
}

inline CloseProbe worst_case_close(PqVariant variant, std::uint64_t n_pairs,
    MarketConfig base = {}, const GasSchedule& schedule = {})
{
    return play_book(variant, worst_case_book(n_pairs), base, schedule);
}

struct MarketBenchRow
{
    PqVariant variant = PqVariant::heap_dynamic_array;
    std::uint64_t max_trades = 0;      // worst-case pairs fitting the block limit
    GasReceipt close_at_max;           // close receipt at max_trades
    Gas gas_1000_trades = 0;           // effective close gas for 1000 pairs
    Gas avg_submission = 0;            // average over 200 order submissions
};

/// Largest worst-case pair count whose close fits the block gas limit in
/// pre-refund terms.
inline std::uint64_t max_trades_under_limit(PqVariant variant, Gas block_gas_limit,
    MarketConfig base = {})
{
    auto fits = [&](std::uint64_t n) {
        return worst_case_close(variant, n, base).receipt.gas_used_pre_refund <= block_gas_limit;
    };
    std::uint64_t lo = 1, hi = 2;
    while (fits(hi))
    {
        lo = hi;
        hi *= 2;
        if (hi > 4096)
            break;
    }
    while (lo + 1 < hi)
    {
        const std::uint64_t mid = (lo + hi) / 2;
        (fits(mid) ? lo : hi) = mid;
    }
    return lo;
}

inline MarketBenchRow bench_market(PqVariant variant, std::uint64_t seed = 1,
    MarketConfig base = {})
{
    MarketBenchRow row;
    row.variant = variant;
    row.max_trades = max_trades_under_limit(variant, GasSchedule{}.block_gas_limit, base);
    row.close_at_max = worst_case_close(variant, row.max_trades, base).receipt;
    row.gas_1000_trades = worst_case_close(variant, 1000, base).receipt.gas_used_effective;

    // Average submission cost over 200 random orders.
    std::mt19937_64 rng{seed};
    std::uniform_int_distribution<std::uint64_t> price{50'000, 150'000};
    std::vector<Order> orders;
    for (int i = 0; i < 200; ++i)
    {
        const bool is_bid = i % 2 == 0;
        orders.push_back(Order{(is_bid ? "b" : "s") + std::to_string(i),
            is_bid ? Side::bid : Side::ask, price(rng), static_cast<std::uint64_t>(1 + i % 4)});
    }
    row.avg_submission = play_book(variant, orders, base).avg_submission;
    return row;
}

}  // namespace gasbook::bench
