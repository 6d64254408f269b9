// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gas.hpp"
#include "pq.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasbook
{
enum class Side
{
    bid,
    ask,
};

enum class Asset
{
    ether,
    token,
};

/// Which crossing bid a dequeued ask is paired with when the book crosses.
///   best_bid_first:    classic call-market execution, best bid meets best
///                      ask until they no longer cross.
///   nearest_bid_first: the lowest still-crossing bid meets the best ask;
///                      non-crossing bids are discarded as they surface.
/// Both policies execute at the two quoted prices and route the difference
/// to the miner; they differ only in how fills are paired.
enum class MatchPolicy
{
    best_bid_first,
    nearest_bid_first,
};

struct Order
{
    std::string trader;
    Side side = Side::bid;
    std::uint64_t price = 0;   // currency per token, fixed-point (price_scale)
    std::uint64_t volume = 0;  // token units
};

struct Fill
{
    std::string buyer;
    std::string seller;
    std::uint64_t volume = 0;
    std::uint64_t bid_price = 0;
    std::uint64_t ask_price = 0;

    [[nodiscard]] std::uint64_t improvement_per_unit() const { return bid_price - ask_price; }
    [[nodiscard]] std::uint64_t improvement_total() const
    {
        return improvement_per_unit() * volume;
    }
    [[nodiscard]] std::uint64_t buyer_pays() const { return bid_price * volume; }
    [[nodiscard]] std::uint64_t seller_receives() const { return ask_price * volume; }

    friend bool operator==(const Fill&, const Fill&) = default;
};

/// In-memory mirror of the per-account balance slots.
class BalanceLedger
{
public:
    [[nodiscard]] std::uint64_t total(const std::string& account, Asset asset) const
    {
        return find(total_, account, asset);
    }
    [[nodiscard]] std::uint64_t unavailable(const std::string& account, Asset asset) const
    {
        return find(unavailable_, account, asset);
    }
    [[nodiscard]] std::uint64_t withdrawable(const std::string& account, Asset asset) const
    {
        return total(account, asset) - unavailable(account, asset);
    }
    [[nodiscard]] const std::map<std::pair<std::string, int>, std::uint64_t>& totals() const
    {
        return total_;
    }

    void check_invariants() const
    {
        for (const auto& [key, committed] : unavailable_)
            if (committed > find(total_, key.first, static_cast<Asset>(key.second)))
                throw std::logic_error{"ledger invariant violated: unavailable > total"};
    }

private:
    friend class CallMarket;
    using Map = std::map<std::pair<std::string, int>, std::uint64_t>;

    static std::uint64_t find(const Map& m, const std::string& account, Asset asset)
    {
        const auto it = m.find({account, static_cast<int>(asset)});
        return it == m.end() ? 0 : it->second;
    }

    Map total_;
    Map unavailable_;
};

struct MarketConfig
{
    std::uint64_t order_cap = 100;
    std::uint64_t price_scale = 100;  // two decimals
    PqVariant backend = PqVariant::linked_list_key_value;
    CleanupPolicy cleanup = CleanupPolicy::clean;
    MatchPolicy matching = MatchPolicy::best_bid_first;
    PqConfig pq;
};

/// The call market: deposit/claim ledger, order submission into the two
/// priority queues, and a batch close that executes marketable pairs and
/// routes price improvements to the miner. Every operation runs inside an
/// open arena transaction supplied by the caller.
class CallMarket
{
public:
    CallMarket(StorageArena& arena, MarketConfig cfg = {}) : cfg_{cfg}
    {
        contract_ = arena.create_contract(0);
        const QueueDirection bid_dir = cfg_.matching == MatchPolicy::best_bid_first
                                           ? QueueDirection::max_first
                                           : QueueDirection::min_first;
        bids_ = make_queue(cfg_.backend, bid_dir, cfg_.cleanup, arena, cfg_.pq);
        asks_ = make_queue(cfg_.backend, QueueDirection::min_first, cfg_.cleanup, arena, cfg_.pq);
    }

    [[nodiscard]] const MarketConfig& config() const { return cfg_; }
    [[nodiscard]] const BalanceLedger& ledger() const { return ledger_; }
    [[nodiscard]] bool is_open() const { return open_; }
    [[nodiscard]] std::uint64_t miner_revenue() const { return miner_revenue_; }
    [[nodiscard]] const std::vector<Fill>& last_fills() const { return last_fills_; }
    [[nodiscard]] QueueBackend& bid_queue() { return *bids_; }
    [[nodiscard]] QueueBackend& ask_queue() { return *asks_; }

    void deposit(StorageArena& arena, const std::string& account, Asset asset, std::uint64_t amount)
    {
        if (amount == 0)
            throw std::invalid_argument{"deposit amount must be positive"};
        credit_total(arena, account, asset, amount);
    }

    /// Transfers the free (uncommitted) balance out and zeroes it.
    std::uint64_t claim(StorageArena& arena, const std::string& account, Asset asset)
    {
        const std::uint64_t free = ledger_.withdrawable(account, asset);
        if (free == 0)
            throw std::logic_error{"nothing to claim"};
        debit_total(arena, account, asset, free);
        return free;
    }

    void open_market(StorageArena& arena)
    {
        if (open_)
            throw std::logic_error{"market already open"};
        if (bids_->size(arena) != 0 || asks_->size(arena) != 0)
            throw std::logic_error{"cannot open with a non-empty book"};
        open_ = true;
        arena.sstore(contract_, kPhaseSlot, 1);
    }

    void submit_bid(StorageArena& arena, const std::string& trader, std::uint64_t price,
        std::uint64_t volume)
    {
        submit(arena, trader, Side::bid, price, volume);
    }
    void submit_ask(StorageArena& arena, const std::string& trader, std::uint64_t price,
        std::uint64_t volume)
    {
        submit(arena, trader, Side::ask, price, volume);
    }

    std::vector<Fill> close_market(StorageArena& arena, const std::string& miner)
    {
        if (!open_)
            throw std::logic_error{"market is not open"};
        std::vector<Fill> fills;

        std::optional<OpenOrder> bid;
        std::optional<OpenOrder> ask;
        while (true)
        {
            if (!bid)
                bid = pop_order(arena, *bids_);
            if (!bid)
                break;
            if (!ask)
                ask = pop_order(arena, *asks_);
            if (!ask)
                break;
            if (bid->price < ask->price)
            {
                if (cfg_.matching == MatchPolicy::nearest_bid_first)
                {
                    // This bid crosses no remaining ask; drop it and keep going.
                    bid.reset();
                    continue;
                }
                break;  // best bid below best ask: nothing left to execute
            }

            const std::uint64_t volume = std::min(bid->remaining, ask->remaining);
            execute_fill(arena, *bid, *ask, volume, miner, fills);
            bid->remaining -= volume;
            ask->remaining -= volume;
            if (bid->remaining == 0)
            {
                settle_consumed(arena, *bid);
                bid.reset();
            }
            else
                arena.sstore(contract_, order_slot(bid->id, 2), bid->remaining);
            if (ask->remaining == 0)
            {
                settle_consumed(arena, *ask);
                ask.reset();
            }
            else
                arena.sstore(contract_, order_slot(ask->id, 2), ask->remaining);
        }
        if (bid)
            discard_order(arena, *bid);
        if (ask)
            discard_order(arena, *ask);
        discard_remaining(arena, *bids_);
        discard_remaining(arena, *asks_);

        // Anything still reserved belongs to orders that can never execute.
        release_leftovers(arena);
        open_orders_.clear();
        arena.sstore(contract_, kPhaseSlot, 0);
        arena.sstore(contract_, kCallCountSlot, 0);
        submitted_this_call_ = 0;
        open_ = false;
        last_fills_ = fills;
        return fills;
    }

    /// Off-chain analytic: midpoint of the final executed fill, in display
    /// units. Never feeds back into settlement.
    [[nodiscard]] std::optional<double> clearing_price(const std::vector<Fill>& fills) const
    {
        if (fills.empty())
            return std::nullopt;
        const auto& f = fills.back();
        return (static_cast<double>(f.bid_price) + static_cast<double>(f.ask_price)) / 2.0 /
               static_cast<double>(cfg_.price_scale);
    }

private:
    static constexpr SlotId kPhaseSlot = 0;
    static constexpr SlotId kCallCountSlot = 1;
    static constexpr SlotId kSequenceSlot = 2;
    static constexpr SlotId kBalanceBase = 16;
    static constexpr SlotId kOrderBase = 1ULL << 40;

    struct OpenOrder
    {
        std::uint64_t id = 0;
        std::string trader;
        Side side = Side::bid;
        std::uint64_t price = 0;
        std::uint64_t remaining = 0;
    };

    [[nodiscard]] std::uint64_t account_index(const std::string& account)
    {
        const auto it = accounts_.find(account);
        if (it != accounts_.end())
            return it->second;
        const std::uint64_t idx = accounts_.size();
        accounts_.emplace(account, idx);
        return idx;
    }

    [[nodiscard]] SlotId balance_slot(std::uint64_t idx, Asset asset, bool unavailable) const
    {
        return kBalanceBase + idx * 4 + static_cast<std::uint64_t>(asset) * 2 +
               (unavailable ? 1 : 0);
    }
    static constexpr SlotId order_slot(std::uint64_t id, std::uint64_t field)
    {
        return kOrderBase + id * 4 + field;
    }

    // Compound assignments on a mapping slot read it before writing back.
    void credit_total(StorageArena& arena, const std::string& account, Asset asset,
        std::uint64_t amount)
    {
        auto& v = ledger_.total_[{account, static_cast<int>(asset)}];
        v += amount;
        const SlotId slot = balance_slot(account_index(account), asset, false);
        arena.sload(contract_, slot);
        arena.sstore(contract_, slot, v);
    }
    void debit_total(StorageArena& arena, const std::string& account, Asset asset,
        std::uint64_t amount)
    {
        auto& v = ledger_.total_[{account, static_cast<int>(asset)}];
        if (v < amount)
            throw std::logic_error{"insufficient total balance"};
        v -= amount;
        const SlotId slot = balance_slot(account_index(account), asset, false);
        arena.sload(contract_, slot);
        arena.sstore(contract_, slot, v);
    }
    void adjust_unavailable(StorageArena& arena, const std::string& account, Asset asset,
        std::int64_t delta)
    {
        auto& v = ledger_.unavailable_[{account, static_cast<int>(asset)}];
        v = static_cast<std::uint64_t>(static_cast<std::int64_t>(v) + delta);
        const SlotId slot = balance_slot(account_index(account), asset, true);
        arena.sload(contract_, slot);
        arena.sstore(contract_, slot, v);
    }

    void submit(StorageArena& arena, const std::string& trader, Side side, std::uint64_t price,
        std::uint64_t volume)
    {
        arena.sload(contract_, kPhaseSlot);
        if (!open_)
            throw std::logic_error{"market is closed"};
        arena.sload(contract_, kCallCountSlot);
        if (submitted_this_call_ >= cfg_.order_cap)
            throw std::logic_error{"order cap reached"};
        if (price == 0 || volume == 0)
            throw std::invalid_argument{"price and volume must be positive"};

        const Asset asset = side == Side::bid ? Asset::ether : Asset::token;
        const std::uint64_t required = side == Side::bid ? price * volume : volume;
        arena.sload(contract_, balance_slot(account_index(trader), asset, false));
        arena.sload(contract_, balance_slot(account_index(trader), asset, true));
        if (ledger_.withdrawable(trader, asset) < required)
            throw std::logic_error{"insufficient free balance"};

        const std::uint64_t id = next_order_id_++;
        const std::uint64_t seq = next_sequence_++;
        // The enqueue can still reject (static capacity); it runs before any
        // ledger mirror is touched so a revert leaves no phantom state.
        (side == Side::bid ? *bids_ : *asks_).enqueue(arena, QueueEntry{price, id, seq});

        adjust_unavailable(arena, trader, asset, static_cast<std::int64_t>(required));
        arena.sstore(contract_, kSequenceSlot, next_sequence_);
        arena.sstore(contract_, order_slot(id, 0), account_index(trader) + 1);
        arena.sstore(contract_, order_slot(id, 1), price);
        arena.sstore(contract_, order_slot(id, 2), volume);
        arena.sstore(contract_, order_slot(id, 3), seq + 1);
        open_orders_[id] = OpenOrder{id, trader, side, price, volume};
        ++submitted_this_call_;
        arena.sstore(contract_, kCallCountSlot, submitted_this_call_);
    }

    std::optional<OpenOrder> pop_order(StorageArena& arena, QueueBackend& queue)
    {
        if (queue.size(arena) == 0)
            return std::nullopt;
        const QueueEntry e = queue.dequeue(arena);
        return load_order(arena, e.payload);
    }

    OpenOrder load_order(StorageArena& arena, std::uint64_t id)
    {
        arena.sload(contract_, order_slot(id, 0));
        arena.sload(contract_, order_slot(id, 1));
        arena.sload(contract_, order_slot(id, 2));
        arena.sload(contract_, order_slot(id, 3));
        return open_orders_.at(id);
    }

    void execute_fill(StorageArena& arena, const OpenOrder& bid, const OpenOrder& ask,
        std::uint64_t volume, const std::string& miner, std::vector<Fill>& fills)
    {
        const std::uint64_t pays = bid.price * volume;
        const std::uint64_t receives = ask.price * volume;
        const std::uint64_t improvement = pays - receives;

        // Buyer: committed ether spent at the bid price, tokens received.
        adjust_unavailable(arena, bid.trader, Asset::ether, -static_cast<std::int64_t>(pays));
        debit_total(arena, bid.trader, Asset::ether, pays);
        credit_total(arena, bid.trader, Asset::token, volume);
        // Seller: committed tokens spent, ether received at the ask price.
        adjust_unavailable(arena, ask.trader, Asset::token, -static_cast<std::int64_t>(volume));
        debit_total(arena, ask.trader, Asset::token, volume);
        credit_total(arena, ask.trader, Asset::ether, receives);
        // The price improvement goes to the miner (coinbase transfer).
        if (improvement > 0)
        {
            arena.transfer_value(contract_);
            credit_total(arena, miner, Asset::ether, improvement);
            miner_revenue_ += improvement;
        }
        fills.push_back(Fill{bid.trader, ask.trader, volume, bid.price, ask.price});
    }

    /// Fully consumed order: under the clean policy its record is deleted,
    /// otherwise it dangles.
    void settle_consumed(StorageArena& arena, const OpenOrder& order)
    {
        if (cfg_.cleanup == CleanupPolicy::clean)
            clear_order_record(arena, order.id);
        open_orders_.erase(order.id);
    }

    /// Unfilled or partially filled order at close: release the leftover
    /// reservation; the record follows the cleanup policy.
    void discard_order(StorageArena& arena, const OpenOrder& order)
    {
        if (order.side == Side::bid)
            adjust_unavailable(arena, order.trader, Asset::ether,
                -static_cast<std::int64_t>(order.price * order.remaining));
        else
            adjust_unavailable(arena, order.trader, Asset::token,
                -static_cast<std::int64_t>(order.remaining));
        if (cfg_.cleanup == CleanupPolicy::clean)
            clear_order_record(arena, order.id);
        open_orders_.erase(order.id);
    }

    void clear_order_record(StorageArena& arena, std::uint64_t id)
    {
        arena.sstore(contract_, order_slot(id, 0), 0);
        arena.sstore(contract_, order_slot(id, 1), 0);
        arena.sstore(contract_, order_slot(id, 2), 0);
        arena.sstore(contract_, order_slot(id, 3), 0);
    }

    /// Drain whatever is left in a queue after matching stopped. Under the
    /// clean policy every leftover is dequeued (earning its refunds); under
    /// leave the structure is reset and the data dangles.
    void discard_remaining(StorageArena& arena, QueueBackend& queue)
    {
        if (cfg_.cleanup == CleanupPolicy::clean)
        {
            while (queue.size(arena) != 0)
            {
                const QueueEntry e = queue.dequeue(arena);
                const auto it = open_orders_.find(e.payload);
                if (it != open_orders_.end())
                    discard_order(arena, it->second);
            }
        }
        else
        {
            queue.reset_dangling(arena);
            std::vector<std::uint64_t> ids;
            for (const auto& [id, order] : open_orders_)
                ids.push_back(id);
            for (auto id : ids)
            {
                const auto it = open_orders_.find(id);
                if (it != open_orders_.end() && queue_side(it->second.side, queue))
                    discard_order(arena, it->second);
            }
        }
    }

    [[nodiscard]] bool queue_side(Side side, const QueueBackend& queue) const
    {
        return (side == Side::bid) == (&queue == bids_.get());
    }

    void release_leftovers(StorageArena& arena)
    {
        std::vector<std::uint64_t> ids;
        for (const auto& [id, order] : open_orders_)
            ids.push_back(id);
        for (auto id : ids)
        {
            const auto it = open_orders_.find(id);
            if (it != open_orders_.end())
                discard_order(arena, it->second);
        }
    }

    MarketConfig cfg_;
    Address contract_ = 0;
    std::unique_ptr<QueueBackend> bids_;
    std::unique_ptr<QueueBackend> asks_;
    BalanceLedger ledger_;
    std::map<std::string, std::uint64_t> accounts_;
    std::map<std::uint64_t, OpenOrder> open_orders_;
    std::vector<Fill> last_fills_;
    std::uint64_t next_order_id_ = 1;
    std::uint64_t next_sequence_ = 0;
    std::uint64_t submitted_this_call_ = 0;
    std::uint64_t miner_revenue_ = 0;
    bool open_ = false;
};

/// Exact decimal parse onto the integer price grid.
inline std::uint64_t parse_fixed_point(const std::string& text, std::uint64_t scale)
{
    const auto dot = text.find('.');
    const std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
    std::uint64_t value = (whole.empty() ? 0 : std::stoull(whole)) * scale;
    std::uint64_t digit_scale = scale;
    for (char c : frac)
    {
        if (c < '0' || c > '9')
            throw std::invalid_argument{"bad decimal: " + text};
        if (digit_scale % 10 != 0)
            throw std::invalid_argument{"too many decimal places for scale: " + text};
        digit_scale /= 10;
        value += static_cast<std::uint64_t>(c - '0') * digit_scale;
    }
    return value;
}

/// Book snapshot rows: trader, side, price, volume. Prices are
/// decimals with up to two places; a header row is skipped if present.
inline std::vector<Order> load_book_csv(std::istream& in, std::uint64_t price_scale = 100)
{
    std::vector<Order> book;
    std::string line;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        std::stringstream row{line};
        std::string trader, side, price, volume;
        if (!std::getline(row, trader, ',') || !std::getline(row, side, ',') ||
            !std::getline(row, price, ',') || !std::getline(row, volume, ','))
            throw std::invalid_argument{"malformed book row: " + line};
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        trader = trim(trader);
        side = trim(side);
        if (trader == "trader" || trader == "Trader")
            continue;  // header row
        Order o;
        o.trader = trader;
        if (side == "bid" || side == "Bid" || side == "BID")
            o.side = Side::bid;
        else if (side == "ask" || side == "Ask" || side == "ASK")
            o.side = Side::ask;
        else
            throw std::invalid_argument{"unknown side: " + side};
        o.price = parse_fixed_point(trim(price), price_scale);
        o.volume = std::stoull(trim(volume));
        book.push_back(o);
    }
    return book;
}

}  // namespace gasbook
