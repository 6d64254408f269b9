// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "chain.hpp"
#include "config.hpp"
#include "continuous.hpp"
#include "encode.hpp"
#include "gas.hpp"
#include "market.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasbook
{
enum class Venue
{
    call_market,
    continuous_book,
};

[[nodiscard]] inline std::string to_string(Venue v)
{
    return v == Venue::call_market ? "call_market" : "continuous_book";
}

/// Outcome of one front-running scenario on one venue. The attacker's
/// profit is the mark-to-market wealth difference between the run under
/// the adversarial ordering policy and the same transaction stream under
/// arrival order; a positive value means the ordering privilege paid.
struct ScenarioReport
{
    std::string name;
    std::string venue;
    std::string policy;
    std::uint64_t seed = 0;
    std::vector<Fill> fills;            // fills observed in the attack run
    std::int64_t attacker_profit = 0;
    std::uint64_t miner_revenue = 0;    // improvements routed to the miner
    std::string verdict;                // mitigated | partial | vulnerable
    std::uint64_t suppression_cost_gwei = 0;
    std::string note;
};

namespace sim
{
struct Endowment
{
    std::string account;
    std::uint64_t cash = 0;
    std::uint64_t tokens = 0;
};

/// One scripted transaction stream plus the accounts backing it.
struct Script
{
    std::vector<Endowment> endowments;
    std::vector<SimTransaction> txs;
    std::uint64_t blocks = 1;                  // how many blocks to build
    std::vector<std::uint64_t> close_blocks;   // call market: close injected at these heights
    std::string miner = "miner";
};

/// Runs a script on the call market: deposits are pre-funded, submissions
/// and the close go through the block builder under the given policy.
class CallMarketRun
{
public:
    explicit CallMarketRun(const Script& script, MarketConfig cfg = {})
    {
        arena_.begin_tx();
        market_ = std::make_unique<CallMarket>(arena_, cfg);
        arena_.end_tx();
        for (const auto& e : script.endowments)
        {
            if (e.cash > 0)
            {
                arena_.begin_tx();
                market_->deposit(arena_, e.account, Asset::ether, e.cash);
                arena_.end_tx();
            }
            if (e.tokens > 0)
            {
                arena_.begin_tx();
                market_->deposit(arena_, e.account, Asset::token, e.tokens);
                arena_.end_tx();
            }
        }
        arena_.begin_tx();
        market_->open_market(arena_);
        arena_.end_tx();
    }

    void run(const Script& script, const MinerPolicy& policy)
    {
        BlockBuilder builder{arena_.schedule().block_gas_limit};
        for (const auto& tx : script.txs)
            builder.submit(tx);
        for (std::uint64_t height : script.close_blocks)
        {
            SimTransaction close;
            close.sender = "closer";
            close.kind = TxKind::close_market;
            close.arrival = 1000 + height;  // after the block's order flow
            close.available_block = height;
            builder.submit(close);
        }
        const std::uint64_t blocks =
            script.blocks + (policy.suppress_everyone ? policy.suppress_blocks : 0);
        for (std::uint64_t b = 0; b < blocks; ++b)
            blocks_.push_back(builder.build_block(policy, executor(script)));
    }

    [[nodiscard]] TxExecutor executor(const Script& script)
    {
        return [this, miner = script.miner](const SimTransaction& tx,
                   Gas remaining) -> std::optional<ExecutedTx> {
            const auto payload = payload_of(tx);
            const auto profile = profile_of(payload);
            arena_.begin_tx(profile);
            bool ok = true;
            try
            {
                apply(tx, miner);
            }
            catch (const std::exception&)
            {
                ok = false;
                arena_.revert_tx();
                arena_.begin_tx(profile);  // included at intrinsic cost
            }
            if (arena_.gas_used() > remaining)
            {
                arena_.revert_tx();
                return std::nullopt;
            }
            return ExecutedTx{tx, arena_.end_tx(), ok};
        };
    }

    /// Mark-to-market wealth in cash units at the reference price.
    [[nodiscard]] std::int64_t wealth(const std::string& account, std::uint64_t ref_price) const
    {
        const auto& l = market_->ledger();
        return static_cast<std::int64_t>(l.total(account, Asset::ether)) +
               static_cast<std::int64_t>(l.total(account, Asset::token) * ref_price);
    }

    [[nodiscard]] const std::vector<Fill>& fills() const { return fills_; }
    [[nodiscard]] std::uint64_t miner_revenue() const { return market_->miner_revenue(); }
    [[nodiscard]] CallMarket& market() { return *market_; }
    [[nodiscard]] StorageArena& arena() { return arena_; }
    [[nodiscard]] const std::vector<BlockResult>& blocks() const { return blocks_; }

private:
    void apply(const SimTransaction& tx, const std::string& miner)
    {
        switch (tx.kind)
        {
        case TxKind::submit_bid:
            market_->submit_bid(arena_, tx.sender, tx.price, tx.volume);
            break;
        case TxKind::submit_ask:
            market_->submit_ask(arena_, tx.sender, tx.price, tx.volume);
            break;
        case TxKind::close_market:
        {
            const auto fills = market_->close_market(arena_, miner);
            fills_.insert(fills_.end(), fills.begin(), fills.end());
            market_->open_market(arena_);  // close reopens as a subroutine
            break;
        }
        case TxKind::open_market:
            market_->open_market(arena_);
            break;
        case TxKind::cancel:
            throw std::logic_error{"the call market does not support cancellations"};
        case TxKind::deposit_ether:
            market_->deposit(arena_, tx.sender, Asset::ether, tx.price);
            break;
        case TxKind::deposit_token:
            market_->deposit(arena_, tx.sender, Asset::token, tx.volume);
            break;
        case TxKind::claim_ether:
            market_->claim(arena_, tx.sender, Asset::ether);
            break;
        case TxKind::claim_token:
            market_->claim(arena_, tx.sender, Asset::token);
            break;
        }
    }

    [[nodiscard]] static std::vector<std::uint8_t> payload_of(const SimTransaction& tx)
    {
        switch (tx.kind)
        {
        case TxKind::submit_bid: return encode_call(MarketOp::submit_bid, {tx.price, tx.volume});
        case TxKind::submit_ask: return encode_call(MarketOp::submit_ask, {tx.price, tx.volume});
        case TxKind::close_market: return encode_call(MarketOp::close_market);
        case TxKind::open_market: return encode_call(MarketOp::open_market);
        case TxKind::deposit_ether: return encode_call(MarketOp::deposit_ether, {tx.price});
        case TxKind::deposit_token: return encode_call(MarketOp::deposit_token, {tx.volume});
        case TxKind::claim_ether: return encode_call(MarketOp::claim_ether);
        case TxKind::claim_token: return encode_call(MarketOp::claim_tokens);
        case TxKind::cancel: return encode_call(MarketOp::close_market);  // no such call
        }
        return {};
    }

    StorageArena arena_;
    std::unique_ptr<CallMarket> market_;
    std::vector<Fill> fills_;
    std::vector<BlockResult> blocks_;
};

/// Runs a script on the continuous baseline.
class ContinuousRun
{
public:
    explicit ContinuousRun(const Script& script)
    {
        arena_.begin_tx();
        book_ = std::make_unique<ContinuousBook>(arena_);
        arena_.end_tx();
        for (const auto& e : script.endowments)
            book_->fund(e.account, e.cash, e.tokens);
    }

    void run(const Script& script, const MinerPolicy& policy)
    {
        BlockBuilder builder{arena_.schedule().block_gas_limit};
        for (const auto& tx : script.txs)
            builder.submit(tx);
        const std::uint64_t blocks =
            script.blocks + (policy.suppress_everyone ? policy.suppress_blocks : 0);
        for (std::uint64_t b = 0; b < blocks; ++b)
            builder.build_block(policy, executor());
    }

    [[nodiscard]] TxExecutor executor()
    {
        return [this](const SimTransaction& tx, Gas remaining) -> std::optional<ExecutedTx> {
            arena_.begin_tx();
            bool ok = true;
            try
            {
                apply(tx);
            }
            catch (const std::exception&)
            {
                ok = false;
                arena_.revert_tx();
                arena_.begin_tx();
            }
            if (arena_.gas_used() > remaining)
            {
                arena_.revert_tx();
                return std::nullopt;
            }
            return ExecutedTx{tx, arena_.end_tx(), ok};
        };
    }

    [[nodiscard]] std::int64_t wealth(const std::string& account, std::uint64_t ref_price) const
    {
        return static_cast<std::int64_t>(book_->cash(account)) +
               static_cast<std::int64_t>(book_->tokens(account) * ref_price);
    }

    [[nodiscard]] const std::vector<Fill>& fills() const { return book_->fills(); }

private:
    void apply(const SimTransaction& tx)
    {
        switch (tx.kind)
        {
        case TxKind::submit_bid:
            book_->submit(arena_, Order{tx.sender, Side::bid, tx.price, tx.volume});
            break;
        case TxKind::submit_ask:
            book_->submit(arena_, Order{tx.sender, Side::ask, tx.price, tx.volume});
            break;
        case TxKind::cancel:
            book_->cancel(arena_, tx.sender, tx.cancel_target);
            break;
        default:
            break;  // phases and claims do not exist on the baseline
        }
    }

    StorageArena arena_;
    std::unique_ptr<ContinuousBook> book_;
};

}  // namespace sim

inline const std::vector<std::string>& scenario_names()
{
    static const std::vector<std::string> names = {"insertion", "displacement", "suppression",
        "hybrid", "suspension", "spoofing", "cancellation_griefing"};
    return names;
}

/// True iff every random permutation of submission order yields the same
/// fill log and miner revenue (precondition: distinct prices).
inline bool permutation_audit(const std::vector<Order>& book, int trials, std::uint64_t seed = 1,
    MarketConfig cfg = {})
{
    auto play = [&](const std::vector<Order>& orders) {
        StorageArena arena;
        arena.begin_tx();
        CallMarket market{arena, cfg};
        arena.end_tx();
        for (const auto& o : orders)
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
        for (const auto& o : orders)
        {
            arena.begin_tx();
            if (o.side == Side::bid)
                market.submit_bid(arena, o.trader, o.price, o.volume);
            else
                market.submit_ask(arena, o.trader, o.price, o.volume);
            arena.end_tx();
        }
        arena.begin_tx();
        auto fills = market.close_market(arena, "miner");
        arena.end_tx();
        return std::pair{fills, market.miner_revenue()};
    };

    const auto baseline = play(book);
    std::mt19937_64 rng{seed};
    std::vector<Order> shuffled = book;
    for (int t = 0; t < trials; ++t)
    {
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        if (play(shuffled) != baseline)
            return false;
    }
    return true;
}

namespace sim::detail
{
struct Params
{
    std::uint64_t fair = 0;    // reference token price
    std::uint64_t volume = 0;  // traded volume
};

inline Params params_of(std::uint64_t seed)
{
    std::mt19937_64 rng{seed};
    Params p;
    p.fair = 1000 + 10 * (rng() % 21);
    p.volume = 10 + rng() % 40;
    return p;
}

inline ScenarioReport make_report(const std::string& name, Venue venue, const MinerPolicy& policy,
    std::uint64_t seed)
{
    ScenarioReport r;
    r.name = name;
    r.venue = to_string(venue);
    r.policy = policy.kind == PolicyKind::adversarial ? "adversarial"
               : policy.kind == PolicyKind::fifo      ? "fifo"
                                                      : "fee_priority";
    r.seed = seed;
    return r;
}

/// Runs the same script twice (arrival order vs the adversarial policy)
/// and reports the attacker's ordering profit.
template <typename Run>
ScenarioReport score_delta(const std::string& name, Venue venue, const Script& script,
    const MinerPolicy& attack, std::uint64_t seed, std::uint64_t fair,
    const std::string& attacker, const char* vulnerable_verdict = "vulnerable")
{
    ScenarioReport report = make_report(name, venue, attack, seed);

    Run reference{script};
    MinerPolicy fifo;
    fifo.kind = PolicyKind::fifo;
    reference.run(script, fifo);

    Run attacked{script};
    attacked.run(script, attack);

    const std::int64_t ref_wealth = reference.wealth(attacker, fair);
    const std::int64_t att_wealth = attacked.wealth(attacker, fair);
    report.attacker_profit = att_wealth - ref_wealth;
    report.fills = attacked.fills();
    if constexpr (std::is_same_v<Run, CallMarketRun>)
        report.miner_revenue = attacked.miner_revenue();
    report.verdict = report.attacker_profit > 0 ? vulnerable_verdict : "mitigated";
    return report;
}

inline MinerPolicy attack_policy(const MinerPolicy& base, const std::string& adversary,
    const std::string& victim, std::uint64_t suppress = 0)
{
    MinerPolicy p = base;
    if (p.adversary.empty())
        p.adversary = adversary;
    if (p.victim.empty())
        p.victim = victim;
    if (p.suppress_blocks == 0)
        p.suppress_blocks = suppress;
    return p;
}

// Mallory (maker) squeezes her orders in before Alice's (taker): she takes
// the honest resting ask herself and re-quotes just under Alice's limit.
inline Script insertion_cda(const Params& p)
{
    Script s;
    s.endowments = {{"carol", 0, p.volume}, {"alice", (p.fair + 200) * p.volume, 0},
        {"mallory", p.fair * p.volume, 0}};
    s.txs = {
        {.sender = "carol", .kind = TxKind::submit_ask, .price = p.fair, .volume = p.volume,
            .arrival = 0},
        {.sender = "alice", .kind = TxKind::submit_bid, .price = p.fair + 200,
            .volume = p.volume, .arrival = 1},
        {.sender = "mallory", .kind = TxKind::submit_bid, .price = p.fair, .volume = p.volume,
            .nonce = 0, .arrival = 2},
        {.sender = "mallory", .kind = TxKind::submit_ask, .price = p.fair + 199,
            .volume = p.volume, .nonce = 1, .arrival = 3},
    };
    s.blocks = 1;
    return s;
}

inline Script insertion_cm(const Params& p)
{
    Script s;
    s.endowments = {{"carol", 0, p.volume}, {"alice", (p.fair + 200) * p.volume, 0},
        {"mallory", (p.fair + 1) * p.volume, 0}};
    s.txs = {
        {.sender = "carol", .kind = TxKind::submit_ask, .price = p.fair, .volume = p.volume,
            .arrival = 0},
        {.sender = "alice", .kind = TxKind::submit_bid, .price = p.fair + 200,
            .volume = p.volume, .arrival = 0},
        {.sender = "mallory", .kind = TxKind::submit_bid, .price = p.fair + 1,
            .volume = p.volume, .nonce = 0, .arrival = 0},
        // the re-quote is rejected: no tokens are preloaded to back it
        {.sender = "mallory", .kind = TxKind::submit_ask, .price = p.fair + 199,
            .volume = p.volume, .nonce = 1, .arrival = 0},
    };
    s.close_blocks = {1};
    s.blocks = 2;
    return s;
}

// Mallory (taker) races ahead of Bob (taker) for the one resting bargain,
// then flips the inventory to later demand.
inline Script displacement_cda(const Params& p)
{
    Script s;
    s.endowments = {{"carol", 0, p.volume}, {"bob", (p.fair + 1) * p.volume, 0},
        {"mallory", (p.fair + 2) * p.volume, 0}, {"dave", (p.fair + 90) * p.volume, 0}};
    s.txs = {
        {.sender = "carol", .kind = TxKind::submit_ask, .price = p.fair, .volume = p.volume,
            .arrival = 0},
        {.sender = "bob", .kind = TxKind::submit_bid, .price = p.fair + 1, .volume = p.volume,
            .arrival = 1},
        {.sender = "mallory", .kind = TxKind::submit_bid, .price = p.fair + 2,
            .volume = p.volume, .nonce = 0, .arrival = 2},
        {.sender = "dave", .kind = TxKind::submit_bid, .price = p.fair + 90, .volume = p.volume,
            .arrival = 3},
        {.sender = "mallory", .kind = TxKind::submit_ask, .price = p.fair + 90,
            .volume = p.volume, .nonce = 1, .arrival = 4},
    };
    s.blocks = 1;
    return s;
}

inline Script displacement_cm(const Params& p)
{
    Script s;
    s.endowments = {{"carol", 0, p.volume}, {"bob", (p.fair + 1) * p.volume, 0},
        {"mallory", (p.fair + 2) * p.volume, 0}, {"dave", (p.fair + 90) * p.volume, 0}};
    s.txs = {
        {.sender = "carol", .kind = TxKind::submit_ask, .price = p.fair, .volume = p.volume,
            .arrival = 0},
        {.sender = "bob", .kind = TxKind::submit_bid, .price = p.fair + 1, .volume = p.volume,
            .arrival = 0},
        {.sender = "mallory", .kind = TxKind::submit_bid, .price = p.fair + 2,
            .volume = p.volume, .nonce = 0, .arrival = 2},
        {.sender = "mallory", .kind = TxKind::submit_ask, .price = p.fair + 50,
            .volume = p.volume, .nonce = 1, .arrival = 10, .available_block = 2},
        {.sender = "dave", .kind = TxKind::submit_bid, .price = p.fair + 90, .volume = p.volume,
            .arrival = 11, .available_block = 2},
    };
    s.close_blocks = {1, 3};
    s.blocks = 4;
    return s;
}

// Mallory (maker) holds a worse ask and wants Bob's taker flow; Alice's
// better ask is the victim order.
inline Script suppression_script(const Params& p)
{
    Script s;
    s.endowments = {{"mallory", 0, p.volume}, {"alice", 0, p.volume},
        {"bob", (p.fair + 100) * p.volume, 0}};
    s.txs = {
        {.sender = "mallory", .kind = TxKind::submit_ask, .price = p.fair + 100,
            .volume = p.volume, .arrival = 0},
        {.sender = "alice", .kind = TxKind::submit_ask, .price = p.fair + 50,
            .volume = p.volume, .arrival = 0},
        {.sender = "bob", .kind = TxKind::submit_bid, .price = p.fair + 100, .volume = p.volume,
            .arrival = 0},
    };
    s.close_blocks = {1};
    return s;
}

// Spoofing: Mallory baits with an under-priced ask and cancels once Alice
// goes for it.
inline Script spoofing_script(const Params& p)
{
    Script s;
    s.endowments = {{"mallory", 0, p.volume}, {"alice", (p.fair - 50) * p.volume, 0}};
    s.txs = {
        {.sender = "mallory", .kind = TxKind::submit_ask, .price = p.fair - 50,
            .volume = p.volume, .nonce = 0, .arrival = 0},
        {.sender = "alice", .kind = TxKind::submit_bid, .price = p.fair - 50,
            .volume = p.volume, .arrival = 1},
        {.sender = "mallory", .kind = TxKind::cancel, .nonce = 1, .arrival = 2},
    };
    s.close_blocks = {1};
    s.blocks = 2;
    return s;
}

// Cancellation griefing: Alice repents a stale quote; Mallory fills it
// before the cancellation lands.
inline Script griefing_script(const Params& p)
{
    Script s;
    s.endowments = {{"alice", 0, p.volume}, {"mallory", (p.fair - 100) * p.volume, 0}};
    s.txs = {
        {.sender = "alice", .kind = TxKind::submit_ask, .price = p.fair - 100,
            .volume = p.volume, .nonce = 0, .arrival = 0},
        {.sender = "alice", .kind = TxKind::cancel, .nonce = 1, .arrival = 1},
        {.sender = "mallory", .kind = TxKind::submit_bid, .price = p.fair - 100,
            .volume = p.volume, .arrival = 2},
    };
    s.close_blocks = {1};
    s.blocks = 2;
    return s;
}

inline Script suspension_script(const Params& p)
{
    Script s;
    s.endowments = {{"alice", 0, p.volume}, {"bob", (p.fair + 10) * p.volume, 0}};
    s.txs = {
        {.sender = "alice", .kind = TxKind::submit_ask, .price = p.fair, .volume = p.volume,
            .arrival = 0},
        {.sender = "bob", .kind = TxKind::submit_bid, .price = p.fair + 10, .volume = p.volume,
            .arrival = 0},
    };
    s.close_blocks = {1};
    s.blocks = 2;
    return s;
}
}  // namespace sim::detail

/// Suppression with an explicit withholding horizon: the victim's maker
/// order is withheld for `k_blocks`. On the call market the order misses
/// the call once the horizon covers the close deadline (partial
/// mitigation: the attack works but costs a block's worth of gas per
/// withheld block). The continuous baseline cannot be selectively
/// suppressed: withholding applies to every transaction or none, so the
/// outcome matches arrival order.
inline ScenarioReport suppression_scenario(std::uint64_t k_blocks, Venue venue,
    std::uint64_t seed)
{
    using namespace sim;
    using namespace sim::detail;
    const Params p = params_of(seed);
    const GasSchedule schedule;

    MinerPolicy attack;
    attack.kind = PolicyKind::adversarial;
    attack.adversary = "mallory";
    attack.victim = "alice";
    attack.suppress_blocks = k_blocks;

    Script script = suppression_script(p);
    script.blocks = k_blocks + 2;

    ScenarioReport report;
    if (venue == Venue::continuous_book)
    {
        attack.suppress_everyone = true;  // all-or-none on the base layer
        report = score_delta<ContinuousRun>("suppression", venue, script, attack, seed, p.fair,
            "mallory");
        report.note = "network-wide withholding cannot target one maker";
    }
    else
    {
        report = score_delta<CallMarketRun>("suppression", venue, script, attack, seed, p.fair,
            "mallory", "partial");
        if (report.verdict == "partial")
            report.note = "victim order missed the call deadline";
    }
    report.suppression_cost_gwei =
        k_blocks * schedule.block_gas_limit * schedule.gas_price_gwei;
    return report;
}

/// The hybrid improvement-extraction attack, scored for a miner-attacker:
/// the honest close already pays the miner every improvement, so the
/// scripted insertion-plus-suppression variant nets exactly the same
/// wealth.
inline ScenarioReport hybrid_call_market(const MinerPolicy& base, std::uint64_t seed)
{
    using namespace sim;
    using namespace sim::detail;
    const Params p = params_of(seed);

    ScenarioReport report = make_report("hybrid", Venue::call_market, base, seed);

    // Honest run: one call, Alice's ask crosses Bob's bid, the improvement
    // goes to the miner Mallory.
    Script honest;
    honest.miner = "mallory";
    honest.endowments = {{"alice", 0, p.volume}, {"bob", (p.fair + 200) * p.volume, 0},
        {"mallory", (p.fair + 1) * p.volume, 0}};
    honest.txs = {
        {.sender = "alice", .kind = TxKind::submit_ask, .price = p.fair, .volume = p.volume,
            .arrival = 0},
        {.sender = "bob", .kind = TxKind::submit_bid, .price = p.fair + 200, .volume = p.volume,
            .arrival = 0},
    };
    honest.close_blocks = {1};
    honest.blocks = 2;

    CallMarketRun honest_run{honest};
    MinerPolicy fifo;
    fifo.kind = PolicyKind::fifo;
    honest_run.run(honest, fifo);
    const std::int64_t honest_wealth = honest_run.wealth("mallory", p.fair);

    // Attack run: Mallory inserts her own bid, suppresses Bob to the next
    // call, and re-quotes just under him there.
    Script attacked = honest;
    attacked.txs.push_back({.sender = "mallory", .kind = TxKind::submit_bid,
        .price = p.fair + 1, .volume = p.volume, .nonce = 0, .arrival = 2});
    attacked.txs.push_back({.sender = "mallory", .kind = TxKind::submit_ask,
        .price = p.fair + 199, .volume = p.volume, .nonce = 1, .arrival = 10,
        .available_block = 2});
    attacked.close_blocks = {1, 3};
    attacked.blocks = 4;

    MinerPolicy attack = attack_policy(base, "mallory", "bob", 2);
    attack.kind = PolicyKind::adversarial;
    CallMarketRun attack_run{attacked};
    attack_run.run(attacked, attack);

    report.attacker_profit = attack_run.wealth("mallory", p.fair) - honest_wealth;
    report.fills = attack_run.fills();
    report.miner_revenue = honest_run.miner_revenue();
    report.verdict = report.attacker_profit > 0 ? "vulnerable" : "mitigated";
    report.note = "improvements flow to the miner either way";
    return report;
}

inline ScenarioReport run_scenario(const std::string& name, Venue venue,
    const MinerPolicy& policy, std::uint64_t seed)
{
    using namespace sim;
    using namespace sim::detail;
    const Params p = params_of(seed);
    const bool cda = venue == Venue::continuous_book;

    if (name == "insertion")
    {
        const MinerPolicy attack = attack_policy(policy, "mallory", "alice");
        return cda ? score_delta<ContinuousRun>(name, venue, insertion_cda(p), attack, seed,
                         p.fair, "mallory")
                   : score_delta<CallMarketRun>(name, venue, insertion_cm(p), attack, seed,
                         p.fair, "mallory");
    }
    if (name == "displacement")
    {
        const MinerPolicy attack = attack_policy(policy, "mallory", "bob");
        return cda ? score_delta<ContinuousRun>(name, venue, displacement_cda(p), attack, seed,
                         p.fair, "mallory")
                   : score_delta<CallMarketRun>(name, venue, displacement_cm(p), attack, seed,
                         p.fair, "mallory");
    }
    if (name == "suppression")
        return suppression_scenario(3, venue, seed);
    if (name == "hybrid")
    {
        if (cda)
        {
            const MinerPolicy attack = attack_policy(policy, "mallory", "alice");
            auto report = score_delta<ContinuousRun>(name, venue, insertion_cda(p), attack, seed,
                p.fair, "mallory");
            report.note = "sandwich: buy the resting ask, re-quote under the victim";
            return report;
        }
        return hybrid_call_market(policy, seed);
    }
    if (name == "suspension")
    {
        MinerPolicy attack = attack_policy(policy, "mallory", "alice", 3);
        attack.kind = PolicyKind::adversarial;
        attack.suppress_everyone = true;
        Script script = suspension_script(p);
        script.blocks += attack.suppress_blocks;
        script.close_blocks = {attack.suppress_blocks + 1};
        ScenarioReport report =
            cda ? score_delta<ContinuousRun>(name, venue, script, attack, seed, p.fair, "mallory")
                : score_delta<CallMarketRun>(name, venue, script, attack, seed, p.fair,
                      "mallory");
        report.verdict = "partial";  // feasible for anyone willing to pay for the blocks
        report.suppression_cost_gwei = attack.suppress_blocks *
                                       GasSchedule{}.block_gas_limit * GasSchedule{}.gas_price_gwei;
        report.note = "whole-market denial of service, no trading edge";
        return report;
    }
    if (name == "spoofing")
    {
        const MinerPolicy attack = attack_policy(policy, "mallory", "alice");
        auto report = cda ? score_delta<ContinuousRun>(name, venue, spoofing_script(p), attack,
                                seed, p.fair, "mallory")
                          : score_delta<CallMarketRun>(name, venue, spoofing_script(p), attack,
                                seed, p.fair, "mallory");
        if (!cda)
            report.note = "not applicable: no cancellations, the bait executes";
        return report;
    }
    if (name == "cancellation_griefing")
    {
        const MinerPolicy attack = attack_policy(policy, "mallory", "alice");
        auto report = cda ? score_delta<ContinuousRun>(name, venue, griefing_script(p), attack,
                                seed, p.fair, "mallory")
                          : score_delta<CallMarketRun>(name, venue, griefing_script(p), attack,
                                seed, p.fair, "mallory");
        if (!cda)
            report.note = "not applicable: no cancellations to grief";
        return report;
    }
    std::string known;
    for (const auto& n : scenario_names())
        known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument{"unknown scenario '" + name + "'; known scenarios: " + known};
}

namespace sim::detail
{
inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss{s};
    std::string part;
    while (std::getline(ss, part, sep))
    {
        const auto b = part.find_first_not_of(" \t");
        const auto e = part.find_last_not_of(" \t");
        parts.push_back(b == std::string::npos ? "" : part.substr(b, e - b + 1));
    }
    return parts;
}

inline TxKind tx_kind_from_string(const std::string& s)
{
    if (s == "bid" || s == "submit_bid")
        return TxKind::submit_bid;
    if (s == "ask" || s == "submit_ask")
        return TxKind::submit_ask;
    if (s == "cancel")
        return TxKind::cancel;
    if (s == "deposit_ether")
        return TxKind::deposit_ether;
    if (s == "deposit_token")
        return TxKind::deposit_token;
    if (s == "close" || s == "close_market")
        return TxKind::close_market;
    throw std::invalid_argument{"unknown transaction kind: " + s};
}
}  // namespace sim::detail

/// Declarative scenario description, loadable from a flat key-value file:
///
///   name        = custom
///   venue       = call_market | continuous_book
///   policy      = adversarial | fifo | fee_priority
///   adversary   = mallory          # also the scored attacker
///   victim      = alice
///   suppress_blocks = 0
///   blocks      = 2
///   close_blocks = 1               # comma-separated close heights
///   fair_price  = 1000             # mark-to-market reference
///   endowments  = carol:0:10, alice:12000:0   # account:cash:tokens
///   tx1         = carol:ask:1000:10:0         # sender:kind:price:volume
///   tx2         = alice:bid:1200:10:1         #   [:arrival[:available[:nonce]]]
///
/// The stream is scored like the built-in scenarios: once under arrival
/// order, once under the configured policy, and the attacker profit is
/// the wealth difference.
struct ScenarioConfig
{
    std::string name = "custom";
    Venue venue = Venue::call_market;
    MinerPolicy policy;
    std::string attacker;
    std::uint64_t fair_price = 0;
    sim::Script script;

    static ScenarioConfig load(const std::string& path)
    {
        return from_config(KeyValueConfig::load(path));
    }

    static ScenarioConfig from_config(const KeyValueConfig& cfg)
    {
        using sim::detail::split;
        ScenarioConfig sc;
        sc.name = cfg.get("name", "custom");
        const std::string venue = cfg.get("venue", "call_market");
        if (venue == "call_market")
            sc.venue = Venue::call_market;
        else if (venue == "continuous_book")
            sc.venue = Venue::continuous_book;
        else
            throw std::invalid_argument{"unknown venue: " + venue};

        const std::string policy = cfg.get("policy", "adversarial");
        sc.policy.kind = policy == "fifo"           ? PolicyKind::fifo
                         : policy == "fee_priority" ? PolicyKind::fee_priority
                                                    : PolicyKind::adversarial;
        sc.policy.adversary = cfg.get("adversary", "mallory");
        sc.policy.victim = cfg.get("victim", "");
        sc.policy.suppress_blocks = cfg.get_u64("suppress_blocks", 0);
        sc.attacker = cfg.get("attacker", sc.policy.adversary);
        sc.fair_price = cfg.get_u64("fair_price", 1000);

        sc.script.blocks = cfg.get_u64("blocks", 2);
        for (const auto& h : split(cfg.get("close_blocks", ""), ','))
            if (!h.empty())
                sc.script.close_blocks.push_back(std::stoull(h));
        for (const auto& entry : split(cfg.get("endowments", ""), ','))
        {
            if (entry.empty())
                continue;
            const auto f = split(entry, ':');
            if (f.size() != 3)
                throw std::invalid_argument{"endowment must be account:cash:tokens: " + entry};
            sc.script.endowments.push_back(
                sim::Endowment{f[0], std::stoull(f[1]), std::stoull(f[2])});
        }
        std::vector<std::pair<std::uint64_t, std::string>> tx_entries;
        for (const auto& [key, value] : cfg.entries())
        {
            if (key.rfind("tx", 0) != 0)
                continue;
            tx_entries.emplace_back(std::stoull(key.substr(2)), value);
        }
        std::sort(tx_entries.begin(), tx_entries.end());
        for (const auto& [index, value] : tx_entries)
        {
            const auto f = split(value, ':');
            if (f.size() < 4)
                throw std::invalid_argument{
                    "transaction must be sender:kind:price:volume[:arrival[:available[:nonce]]]: " +
                    value};
            SimTransaction tx;
            tx.sender = f[0];
            tx.kind = sim::detail::tx_kind_from_string(f[1]);
            tx.price = std::stoull(f[2]);
            tx.volume = std::stoull(f[3]);
            tx.arrival = f.size() > 4 ? std::stoull(f[4]) : sc.script.txs.size();
            tx.available_block = f.size() > 5 ? std::stoull(f[5]) : 0;
            tx.nonce = f.size() > 6 ? std::stoull(f[6]) : 0;
            sc.script.txs.push_back(tx);
        }
        return sc;
    }
};

inline ScenarioReport run_scenario_config(const ScenarioConfig& sc, std::uint64_t seed = 0)
{
    using namespace sim;
    using namespace sim::detail;
    ScenarioReport report =
        sc.venue == Venue::continuous_book
            ? score_delta<ContinuousRun>(sc.name, sc.venue, sc.script, sc.policy, seed,
                  sc.fair_price, sc.attacker)
            : score_delta<CallMarketRun>(sc.name, sc.venue, sc.script, sc.policy, seed,
                  sc.fair_price, sc.attacker);
    if (sc.policy.suppress_blocks > 0)
        report.suppression_cost_gwei = sc.policy.suppress_blocks *
                                       GasSchedule{}.block_gas_limit *
                                       GasSchedule{}.gas_price_gwei;
    return report;
}

struct VerdictCell
{
    std::string scenario;
    std::string venue;
    std::string verdict;
};

/// Table-shaped verdict matrix: one row per scenario, one column per
/// implemented venue.
inline std::vector<VerdictCell> verdict_matrix(std::uint64_t seed)
{
    std::vector<VerdictCell> cells;
    MinerPolicy policy;
    policy.kind = PolicyKind::adversarial;
    for (const auto& name : scenario_names())
        for (Venue venue : {Venue::call_market, Venue::continuous_book})
        {
            const auto report = run_scenario(name, venue, policy, seed);
            cells.push_back({name, to_string(venue), report.verdict});
        }
    return cells;
}

}  // namespace gasbook
