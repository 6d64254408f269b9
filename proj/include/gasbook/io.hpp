// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bench.hpp"
#include "gas.hpp"
#include "market.hpp"
#include "scenario.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace gasbook
{
using json = nlohmann::ordered_json;

inline json to_json(const GasReceipt& r)
{
    return json{{"gas_used_pre_refund", r.gas_used_pre_refund},
        {"refund_earned", r.refund_earned}, {"refund_applied", r.refund_applied},
        {"gas_used_effective", r.gas_used_effective}, {"fee_gwei", r.fee_gwei}};
}

inline json to_json(const Fill& f)
{
    return json{{"buyer", f.buyer}, {"seller", f.seller}, {"volume", f.volume},
        {"bid_price", f.bid_price}, {"ask_price", f.ask_price},
        {"buyer_pays", f.buyer_pays()}, {"seller_receives", f.seller_receives()},
        {"improvement", f.improvement_total()}};
}

inline json to_json(const ScenarioReport& r)
{
    json fills = json::array();
    for (const auto& f : r.fills)
        fills.push_back(to_json(f));
    return json{{"scenario", r.name}, {"venue", r.venue}, {"policy", r.policy},
        {"seed", r.seed}, {"verdict", r.verdict}, {"attacker_profit", r.attacker_profit},
        {"miner_revenue", r.miner_revenue},
        {"suppression_cost_gwei", r.suppression_cost_gwei}, {"note", r.note},
        {"fills", std::move(fills)}};
}

/// Per-insert enqueue cost rows, one line per (variant, index).
inline void write_enqueue_series_csv(std::ostream& out,
    const std::vector<std::pair<PqVariant, std::vector<GasReceipt>>>& series)
{
    out << "Variant,Index,Gas Used\n";
    for (const auto& [variant, receipts] : series)
        for (std::size_t i = 0; i < receipts.size(); ++i)
            out << to_string(variant) << ',' << i + 1 << ',' << receipts[i].gas_used_effective
                << '\n';
}

/// Drain benchmark rows ("Gas Used / Refund / Full Refund?"); the cleanup
/// table titles the earned column "Potential Refund".
inline void write_drain_csv(std::ostream& out, const std::vector<bench::DrainReport>& reports,
    bool potential_refund_header = false)
{
    out << "Variant,Cleanup,N,Gas Used,"
        << (potential_refund_header ? "Potential Refund" : "Refund")
        << ",Full Refund?,Pre-Refund Gas,Refund Applied\n";
    for (const auto& r : reports)
    {
        const GasSchedule schedule;
        const bool full =
            r.drain.refund_applied == schedule.refund_cap(r.drain.gas_used_pre_refund);
        out << to_string(r.variant) << ',' << (r.policy == CleanupPolicy::clean ? "clean" : "leave")
            << ',' << r.n << ',' << r.drain.gas_used_effective << ',' << r.drain.refund_earned
            << ',' << (full ? "yes" : "no") << ',' << r.drain.gas_used_pre_refund << ','
            << r.drain.refund_applied << '\n';
    }
}

/// Worst-case market capacity rows.
inline void write_market_bench_csv(std::ostream& out,
    const std::vector<bench::MarketBenchRow>& rows)
{
    out << "Variant,Max Trades (w.c.),Gas Used for Max Trades,Gas Used for 1000 Trades,"
           "Gas Used for Submission(avg)\n";
    for (const auto& r : rows)
        out << to_string(r.variant) << ',' << r.max_trades << ','
            << r.close_at_max.gas_used_effective << ',' << r.gas_1000_trades << ','
            << r.avg_submission << '\n';
}

/// Attack verdict matrix; venues as columns.
inline void write_verdict_matrix_csv(std::ostream& out, const std::vector<VerdictCell>& cells)
{
    out << "Attack,On-chain Call Market,On-chain Continuous Market\n";
    for (const auto& name : scenario_names())
    {
        std::string call, cont;
        for (const auto& c : cells)
        {
            if (c.scenario != name)
                continue;
            (c.venue == "call_market" ? call : cont) = c.verdict;
        }
        out << name << ',' << call << ',' << cont << '\n';
    }
}

}  // namespace gasbook
