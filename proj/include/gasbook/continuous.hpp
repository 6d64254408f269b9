// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gas.hpp"
#include "market.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasbook
{
/// Continuous double auction baseline: marketable orders execute
/// immediately against resting orders at the resting price, price-time
/// priority, cancellations allowed. Positions are position-backed (no
/// shorting), settlement is immediate. Storage costs are modeled coarsely:
/// a resting order occupies two slots, fills update the counterparties'
/// balance slots.
class ContinuousBook
{
public:
    explicit ContinuousBook(StorageArena& arena) : contract_{arena.create_contract(0)} {}

    void fund(const std::string& trader, std::uint64_t cash, std::uint64_t tokens)
    {
        positions_[trader].cash += cash;
        positions_[trader].tokens += tokens;
    }

    [[nodiscard]] std::uint64_t cash(const std::string& trader) const
    {
        const auto it = positions_.find(trader);
        return it == positions_.end() ? 0 : it->second.cash;
    }
    [[nodiscard]] std::uint64_t tokens(const std::string& trader) const
    {
        const auto it = positions_.find(trader);
        return it == positions_.end() ? 0 : it->second.tokens;
    }
    [[nodiscard]] const std::vector<Fill>& fills() const { return fills_; }

    [[nodiscard]] std::optional<std::uint64_t> best_bid() const
    {
        return best(Side::bid);
    }
    [[nodiscard]] std::optional<std::uint64_t> best_ask() const
    {
        return best(Side::ask);
    }

    /// Submit an order; returns its id (0 if it fully executed on entry).
    std::uint64_t submit(StorageArena& arena, const Order& order)
    {
        if (order.price == 0 || order.volume == 0)
            throw std::invalid_argument{"price and volume must be positive"};
        auto& pos = positions_[order.trader];
        const std::uint64_t required =
            order.side == Side::bid ? order.price * order.volume : order.volume;
        std::uint64_t& backing = order.side == Side::bid ? pos.cash : pos.tokens;
        const std::uint64_t reserved =
            order.side == Side::bid ? reserved_cash(order.trader) : reserved_tokens(order.trader);
        if (backing < reserved + required)
            throw std::logic_error{"insufficient position to back the order"};

        Resting incoming{next_id_++, order.trader, order.side, order.price, order.volume, seq_++};
        // Take liquidity while the order is marketable.
        while (incoming.volume > 0)
        {
            Resting* counter = best_resting(order.side == Side::bid ? Side::ask : Side::bid);
            if (counter == nullptr)
                break;
            const bool crosses = order.side == Side::bid ? incoming.price >= counter->price
                                                         : incoming.price <= counter->price;
            if (!crosses)
                break;
            const std::uint64_t volume = std::min(incoming.volume, counter->volume);
            const std::uint64_t exec_price = counter->price;  // resting price
            const auto& buyer = order.side == Side::bid ? incoming.trader : counter->trader;
            const auto& seller = order.side == Side::bid ? counter->trader : incoming.trader;
            settle(arena, buyer, seller, exec_price, volume);
            fills_.push_back(Fill{buyer, seller, volume, exec_price, exec_price});
            incoming.volume -= volume;
            counter->volume -= volume;
            if (counter->volume == 0)
                remove_resting(arena, counter->id);
        }
        if (incoming.volume == 0)
            return 0;
        // Rest the remainder: order record occupies two slots.
        arena.sstore(contract_, 2 * incoming.id, (incoming.price << 20) | incoming.volume);
        arena.sstore(contract_, 2 * incoming.id + 1, incoming.seq + 1);
        book_.push_back(incoming);
        return incoming.id;
    }

    /// Cancel a resting order; id 0 targets the trader's oldest resting
    /// order. Errors if unknown or already executed.
    void cancel(StorageArena& arena, const std::string& trader, std::uint64_t id)
    {
        if (id == 0)
        {
            const Resting* oldest = nullptr;
            for (const auto& r : book_)
                if (r.trader == trader && (oldest == nullptr || r.seq < oldest->seq))
                    oldest = &r;
            if (oldest == nullptr)
                throw std::logic_error{"no resting order to cancel"};
            remove_resting(arena, oldest->id);
            return;
        }
        for (const auto& r : book_)
        {
            if (r.id == id)
            {
                if (r.trader != trader)
                    throw std::logic_error{"cannot cancel another trader's order"};
                remove_resting(arena, id);
                return;
            }
        }
        throw std::logic_error{"no such resting order"};
    }

private:
    struct Resting
    {
        std::uint64_t id = 0;
        std::string trader;
        Side side = Side::bid;
        std::uint64_t price = 0;
        std::uint64_t volume = 0;
        std::uint64_t seq = 0;
    };

    struct Position
    {
        std::uint64_t cash = 0;
        std::uint64_t tokens = 0;
    };

    [[nodiscard]] std::optional<std::uint64_t> best(Side side) const
    {
        std::optional<std::uint64_t> px;
        for (const auto& r : book_)
        {
            if (r.side != side)
                continue;
            if (!px || (side == Side::bid ? r.price > *px : r.price < *px))
                px = r.price;
        }
        return px;
    }

    Resting* best_resting(Side side)
    {
        Resting* found = nullptr;
        for (auto& r : book_)
        {
            if (r.side != side)
                continue;
            if (found == nullptr)
            {
                found = &r;
                continue;
            }
            const bool better = side == Side::bid
                                    ? (r.price > found->price ||
                                          (r.price == found->price && r.seq < found->seq))
                                    : (r.price < found->price ||
                                          (r.price == found->price && r.seq < found->seq));
            if (better)
                found = &r;
        }
        return found;
    }

    void settle(StorageArena& arena, const std::string& buyer, const std::string& seller,
        std::uint64_t price, std::uint64_t volume)
    {
        auto& b = positions_[buyer];
        auto& s = positions_[seller];
        const std::uint64_t cash = price * volume;
        if (b.cash < cash || s.tokens < volume)
            throw std::logic_error{"position underflow at settlement"};
        b.cash -= cash;
        b.tokens += volume;
        s.cash += cash;
        s.tokens -= volume;
        // four balance-slot updates
        const SlotId bs = kBalanceBase + hash_of(buyer);
        const SlotId ss = kBalanceBase + hash_of(seller);
        const std::pair<SlotId, std::uint64_t> writes[] = {
            {bs, b.cash}, {bs + 1, b.tokens}, {ss, s.cash}, {ss + 1, s.tokens}};
        for (const auto& [slot, value] : writes)
        {
            arena.sload(contract_, slot);
            arena.sstore(contract_, slot, value);
        }
    }

    void remove_resting(StorageArena& arena, std::uint64_t id)
    {
        arena.sstore(contract_, 2 * id, 0);
        arena.sstore(contract_, 2 * id + 1, 0);
        std::erase_if(book_, [&](const Resting& r) { return r.id == id; });
    }

    [[nodiscard]] std::uint64_t reserved_cash(const std::string& trader) const
    {
        std::uint64_t sum = 0;
        for (const auto& r : book_)
            if (r.side == Side::bid && r.trader == trader)
                sum += r.price * r.volume;
        return sum;
    }
    [[nodiscard]] std::uint64_t reserved_tokens(const std::string& trader) const
    {
        std::uint64_t sum = 0;
        for (const auto& r : book_)
            if (r.side == Side::ask && r.trader == trader)
                sum += r.volume;
        return sum;
    }

    static std::uint64_t hash_of(const std::string& s)
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : s)
            h = (h ^ static_cast<std::uint8_t>(c)) * 1099511628211ULL;
        return (h % 4096) * 2;
    }

    static constexpr SlotId kBalanceBase = 1ULL << 32;

    Address contract_;
    std::vector<Resting> book_;
    std::map<std::string, Position> positions_;
    std::vector<Fill> fills_;
    std::uint64_t next_id_ = 1;
    std::uint64_t seq_ = 0;
};

}  // namespace gasbook
