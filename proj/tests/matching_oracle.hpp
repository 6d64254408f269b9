// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Brute-force call-auction matcher used as an independent oracle: sort
// bids descending and asks ascending (submission order breaks price
// ties), then greedily match until the best bid no longer crosses the
// best ask. Kept free of the metered market implementation on purpose.
#pragma once

#include <gasbook/market.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace oracle
{
struct BookOrder
{
    std::string trader;
    std::uint64_t price = 0;
    std::uint64_t volume = 0;
    std::uint64_t arrival = 0;  // submission position
};

struct MatchResult
{
    std::vector<gasbook::Fill> fills;
    std::uint64_t miner_revenue = 0;
};

inline MatchResult match_book(const std::vector<gasbook::Order>& book)
{
    std::vector<BookOrder> bids, asks;
    for (std::size_t i = 0; i < book.size(); ++i)
    {
        const auto& o = book[i];
        (o.side == gasbook::Side::bid ? bids : asks)
            .push_back(BookOrder{o.trader, o.price, o.volume, i});
    }
    std::sort(bids.begin(), bids.end(), [](const BookOrder& a, const BookOrder& b) {
        return a.price != b.price ? a.price > b.price : a.arrival < b.arrival;
    });
    std::sort(asks.begin(), asks.end(), [](const BookOrder& a, const BookOrder& b) {
        return a.price != b.price ? a.price < b.price : a.arrival < b.arrival;
    });

    MatchResult result;
    std::size_t bi = 0, ai = 0;
    while (bi < bids.size() && ai < asks.size() && bids[bi].price >= asks[ai].price)
    {
        auto& bid = bids[bi];
        auto& ask = asks[ai];
        const std::uint64_t volume = std::min(bid.volume, ask.volume);
        result.fills.push_back(gasbook::Fill{bid.trader, ask.trader, volume, bid.price, ask.price});
        result.miner_revenue += (bid.price - ask.price) * volume;
        bid.volume -= volume;
        ask.volume -= volume;
        if (bid.volume == 0)
            ++bi;
        if (ask.volume == 0)
            ++ai;
    }
    return result;
}

}  // namespace oracle
