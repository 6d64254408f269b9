// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "gas.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gasbook
{
enum class QueueDirection
{
    max_first,  // bids: highest price is highest priority
    min_first,  // asks: lowest price is highest priority
};

enum class CleanupPolicy
{
    clean,  // self-destruct consumed nodes / delete consumed entries
    leave,  // leave consumed data dangling
};

enum class PqVariant
{
    heap_dynamic_array,
    heap_static_array,
    heap_key_value,
    linked_list_contracts,
    linked_list_key_value,
};

[[nodiscard]] inline std::string to_string(PqVariant v)
{
    switch (v)
    {
    case PqVariant::heap_dynamic_array: return "heap_dynamic_array";
    case PqVariant::heap_static_array: return "heap_static_array";
    case PqVariant::heap_key_value: return "heap_key_value";
    case PqVariant::linked_list_contracts: return "linked_list_contracts";
    case PqVariant::linked_list_key_value: return "linked_list_key_value";
    }
    return "unknown";
}

[[nodiscard]] inline PqVariant pq_variant_from_string(const std::string& s)
{
    for (auto v : {PqVariant::heap_dynamic_array, PqVariant::heap_static_array,
             PqVariant::heap_key_value, PqVariant::linked_list_contracts,
             PqVariant::linked_list_key_value})
        if (to_string(v) == s)
            return v;
    throw std::invalid_argument{"unknown queue variant: " + s};
}

/// Key layout of the heap-with-key-value variant.
///   order_key:   the heap is a dynamic array of entry ids; comparisons
///                copy the record (priority, payload, sequence; three
///                slots) out of the key-value region, one naive struct
///                load per examined child.
///   packed_rank: the heap is a static array of packed comparison ranks;
///                the record shrinks to (packed priority+sequence,
///                payload) and is touched only at the endpoints.
enum class HkvKeyMode
{
    order_key,
    packed_rank,
};

struct PqConfig
{
    std::uint64_t static_capacity = 256;
    std::uint64_t node_code_size = 100;  // bytes per linked-list node contract
    HkvKeyMode hkv_key_mode = HkvKeyMode::order_key;
};

struct QueueEntry
{
    std::uint64_t priority = 0;  // price, integer fixed-point
    std::uint64_t payload = 0;   // opaque order id
    std::uint64_t sequence = 0;  // tie order, unique per queue

    friend bool operator==(const QueueEntry&, const QueueEntry&) = default;
};

namespace detail
{
inline constexpr std::uint64_t kOrd32 = 0xFFFF'FFFFULL;

inline void check_entry(const QueueEntry& e)
{
    if (e.priority == 0 || e.priority >= kOrd32 || e.sequence >= kOrd32)
        throw std::invalid_argument{"queue entry out of range: priority in [1, 2^32-2], "
                                    "sequence in [0, 2^32-2]"};
}

/// Packs (priority, sequence) into one word so that a single integer
/// comparison yields the dequeue order: larger rank dequeues first, equal
/// priorities fall back to the lower sequence number.
inline std::uint64_t pack_rank(const QueueEntry& e, QueueDirection dir)
{
    const std::uint64_t pr = dir == QueueDirection::max_first ? e.priority : kOrd32 - e.priority;
    return (pr << 32) | (kOrd32 - e.sequence);
}

inline QueueEntry unpack_rank(std::uint64_t rank, std::uint64_t payload, QueueDirection dir)
{
    QueueEntry e;
    e.sequence = kOrd32 - (rank & kOrd32);
    const std::uint64_t pr = rank >> 32;
    e.priority = dir == QueueDirection::max_first ? pr : kOrd32 - pr;
    e.payload = payload;
    return e;
}
}  // namespace detail

/// Storage-metered priority queue. All five variants expose identical
/// enqueue/dequeue semantics; they differ only in slot layout and thus in
/// gas. Construction deploys the queue's root contract, so it must run
/// inside an open transaction.
class QueueBackend
{
public:
    virtual ~QueueBackend() = default;

    [[nodiscard]] PqVariant variant() const { return variant_; }
    [[nodiscard]] QueueDirection direction() const { return direction_; }
    [[nodiscard]] CleanupPolicy cleanup_policy() const { return policy_; }
    void set_cleanup_policy(CleanupPolicy p) { policy_ = p; }

    virtual void enqueue(StorageArena& arena, const QueueEntry& entry) = 0;
    virtual QueueEntry dequeue(StorageArena& arena) = 0;

    /// Metered occupancy read (one sload).
    [[nodiscard]] std::uint64_t size(StorageArena& arena) const
    {
        return arena.sload(root_, kSizeSlot).low();
    }
    [[nodiscard]] std::uint64_t size_unmetered(const StorageArena& arena) const
    {
        return arena.peek(root_, kSizeSlot).low();
    }

    /// Unmetered structure dump for audits; ordering is layout-defined.
    [[nodiscard]] virtual std::vector<QueueEntry> snapshot(const StorageArena& arena) const = 0;
    /// Unmetered structural invariant check (heap order / list order).
    [[nodiscard]] virtual bool audit(const StorageArena& arena) const = 0;

    /// O(1) structural reset that leaves the stored entries dangling.
    virtual void reset_dangling(StorageArena& arena)
    {
        arena.sstore(root_, kSizeSlot, 0);
    }

protected:
    QueueBackend(PqVariant v, QueueDirection d, CleanupPolicy p, StorageArena& arena)
        : variant_{v}, direction_{d}, policy_{p}, root_{arena.create_contract(0)}
    {}

    static constexpr SlotId kSizeSlot = 0;

    [[nodiscard]] std::uint64_t rank_of(const QueueEntry& e) const
    {
        return detail::pack_rank(e, direction_);
    }
    [[nodiscard]] QueueEntry entry_of(std::uint64_t rank, std::uint64_t payload) const
    {
        return detail::unpack_rank(rank, payload, direction_);
    }

    PqVariant variant_;
    QueueDirection direction_;
    CleanupPolicy policy_;
    Address root_;
};

/// Binary max-heap over packed ranks stored as (rank, payload) slot pairs;
/// slot i holds entry i. The dynamic-array flavour re-reads the length slot
/// on every indexed access (the storage-array bounds check); the static
/// flavour checks against a compile-time capacity instead.
class HeapArrayQueue final : public QueueBackend
{
public:
    HeapArrayQueue(StorageArena& arena, QueueDirection dir, CleanupPolicy policy, bool dynamic,
        const PqConfig& cfg)
        : QueueBackend{dynamic ? PqVariant::heap_dynamic_array : PqVariant::heap_static_array, dir,
              policy, arena},
          dynamic_{dynamic},
          capacity_{cfg.static_capacity}
    {}

    void enqueue(StorageArena& arena, const QueueEntry& entry) override
    {
        detail::check_entry(entry);
        const std::uint64_t n = arena.sload(root_, kSizeSlot).low();
        if (!dynamic_ && n >= capacity_)
            throw std::length_error{"static-array heap capacity exceeded"};
        const std::uint64_t rank = rank_of(entry);

        std::uint64_t hole = n + 1;
        while (hole > 1)
        {
            const std::uint64_t parent = hole / 2;
            const std::uint64_t parent_rank = read_key(arena, parent);
            if (parent_rank >= rank)
                break;
            move_entry(arena, parent, hole);
            hole = parent;
        }
        write_entry(arena, hole, rank, entry.payload);
        arena.sstore(root_, kSizeSlot, n + 1);
    }

    QueueEntry dequeue(StorageArena& arena) override
    {
        const std::uint64_t n = arena.sload(root_, kSizeSlot).low();
        if (n == 0)
            throw std::logic_error{"dequeue from empty queue"};
        const std::uint64_t root_rank = read_key(arena, 1);
        const std::uint64_t root_payload = read_payload(arena, 1);
        const QueueEntry out = entry_of(root_rank, root_payload);

        if (n == 1)
        {
            vacate(arena, 1);
            arena.sstore(root_, kSizeSlot, 0);
            return out;
        }

        const std::uint64_t last_rank = read_key(arena, n);
        const std::uint64_t last_payload = read_payload(arena, n);
        vacate(arena, n);
        const std::uint64_t size = n - 1;
        arena.sstore(root_, kSizeSlot, size);

        std::uint64_t hole = 1;
        while (true)
        {
            const std::uint64_t left = 2 * hole;
            if (left > size)
                break;
            std::uint64_t child = left;
            std::uint64_t child_rank = read_key(arena, left);
            if (left + 1 <= size)
            {
                const std::uint64_t right_rank = read_key(arena, left + 1);
                if (right_rank > child_rank)
                {
                    child = left + 1;
                    child_rank = right_rank;
                }
            }
            if (last_rank >= child_rank)
                break;
            move_entry(arena, child, hole);
            hole = child;
        }
        write_entry(arena, hole, last_rank, last_payload);
        return out;
    }

    [[nodiscard]] std::vector<QueueEntry> snapshot(const StorageArena& arena) const override
    {
        const std::uint64_t n = arena.peek(root_, kSizeSlot).low();
        std::vector<QueueEntry> out;
        out.reserve(n);
        for (std::uint64_t i = 1; i <= n; ++i)
            out.push_back(
                entry_of(arena.peek(root_, key_slot(i)).low(), arena.peek(root_, payload_slot(i)).low()));
        return out;
    }

    [[nodiscard]] bool audit(const StorageArena& arena) const override
    {
        const std::uint64_t n = arena.peek(root_, kSizeSlot).low();
        for (std::uint64_t i = 2; i <= n; ++i)
        {
            const auto parent = arena.peek(root_, key_slot(i / 2)).low();
            const auto child = arena.peek(root_, key_slot(i)).low();
            if (child == 0 || parent < child)
                return false;
        }
        return true;
    }

private:
    static constexpr SlotId key_slot(std::uint64_t i) { return 2 * i; }
    static constexpr SlotId payload_slot(std::uint64_t i) { return 2 * i + 1; }

    // Dynamic storage arrays re-read their length slot to bounds-check
    // every indexed access.
    void bounds_check(StorageArena& arena) const
    {
        if (dynamic_)
            arena.sload(root_, kSizeSlot);
    }

    std::uint64_t read_key(StorageArena& arena, std::uint64_t i) const
    {
        bounds_check(arena);
        return arena.sload(root_, key_slot(i)).low();
    }
    std::uint64_t read_payload(StorageArena& arena, std::uint64_t i) const
    {
        bounds_check(arena);
        return arena.sload(root_, payload_slot(i)).low();
    }
    void write_entry(StorageArena& arena, std::uint64_t i, std::uint64_t rank, std::uint64_t payload)
    {
        bounds_check(arena);
        arena.sstore(root_, key_slot(i), rank);
        bounds_check(arena);
        arena.sstore(root_, payload_slot(i), payload);
    }

    /// Storage-to-storage struct assignment: loads every source field and
    /// stores it to the destination (comparison reads do not carry over).
    void move_entry(StorageArena& arena, std::uint64_t from, std::uint64_t to)
    {
        const std::uint64_t rank = read_key(arena, from);
        const std::uint64_t payload = read_payload(arena, from);
        write_entry(arena, to, rank, payload);
    }

    /// Zero a vacated position. A dynamic-array pop always clears (language
    /// semantics); the static array mirrors it only under the clean policy.
    void vacate(StorageArena& arena, std::uint64_t i)
    {
        if (!dynamic_ && policy_ == CleanupPolicy::leave)
            return;
        bounds_check(arena);
        arena.sstore(root_, key_slot(i), 0);
        bounds_check(arena);
        arena.sstore(root_, payload_slot(i), 0);
    }

    bool dynamic_;
    std::uint64_t capacity_;
};

/// Heap that keeps only a key per position; the full entry lives as a
/// three-slot record in a key-value region addressed by sequence number.
class HeapKeyValueQueue final : public QueueBackend
{
public:
    HeapKeyValueQueue(StorageArena& arena, QueueDirection dir, CleanupPolicy policy,
        const PqConfig& cfg)
        : QueueBackend{PqVariant::heap_key_value, dir, policy, arena},
          mode_{cfg.hkv_key_mode},
          capacity_{cfg.static_capacity}
    {}

    void enqueue(StorageArena& arena, const QueueEntry& entry) override
    {
        detail::check_entry(entry);
        const std::uint64_t n = arena.sload(root_, kSizeSlot).low();
        if (mode_ == HkvKeyMode::packed_rank && n >= capacity_)
            throw std::length_error{"static-array heap capacity exceeded"};
        store_record(arena, entry);

        const std::uint64_t rank = rank_of(entry);
        const std::uint64_t key = make_key(entry);
        std::uint64_t hole = n + 1;
        while (hole > 1)
        {
            const std::uint64_t parent = hole / 2;
            const std::uint64_t parent_key = read_key(arena, parent);
            if (rank_of_key(arena, parent_key) >= rank)
                break;
            move_key(arena, parent, hole);
            hole = parent;
        }
        write_key(arena, hole, key);
        arena.sstore(root_, kSizeSlot, n + 1);
    }

    QueueEntry dequeue(StorageArena& arena) override
    {
        const std::uint64_t n = arena.sload(root_, kSizeSlot).low();
        if (n == 0)
            throw std::logic_error{"dequeue from empty queue"};
        const std::uint64_t root_key = read_key(arena, 1);
        const QueueEntry out = load_record(arena, seq_of_key(root_key));
        if (policy_ == CleanupPolicy::clean)
            delete_record(arena, out.sequence);

        if (n == 1)
        {
            write_key(arena, 1, 0);
            arena.sstore(root_, kSizeSlot, 0);
            return out;
        }

        const std::uint64_t last_key = read_key(arena, n);
        const std::uint64_t last_rank = rank_of_key(arena, last_key);
        write_key(arena, n, 0);
        const std::uint64_t size = n - 1;
        arena.sstore(root_, kSizeSlot, size);

        std::uint64_t hole = 1;
        while (true)
        {
            const std::uint64_t left = 2 * hole;
            if (left > size)
                break;
            std::uint64_t child = left;
            std::uint64_t child_key = read_key(arena, left);
            std::uint64_t child_rank = rank_of_key(arena, child_key);
            if (left + 1 <= size)
            {
                const std::uint64_t right_key = read_key(arena, left + 1);
                const std::uint64_t right_rank = rank_of_key(arena, right_key);
                if (right_rank > child_rank)
                {
                    child = left + 1;
                    child_key = right_key;
                    child_rank = right_rank;
                }
            }
            if (last_rank >= child_rank)
                break;
            move_key(arena, child, hole);
            hole = child;
        }
        write_key(arena, hole, last_key);
        return out;
    }

    [[nodiscard]] std::vector<QueueEntry> snapshot(const StorageArena& arena) const override
    {
        const std::uint64_t n = arena.peek(root_, kSizeSlot).low();
        std::vector<QueueEntry> out;
        out.reserve(n);
        for (std::uint64_t i = 1; i <= n; ++i)
        {
            const std::uint64_t key = arena.peek(root_, key_slot(i)).low();
            const std::uint64_t seq = seq_of_key(key);
            out.push_back(peek_record(arena, seq));
        }
        return out;
    }

    [[nodiscard]] bool audit(const StorageArena& arena) const override
    {
        const std::uint64_t n = arena.peek(root_, kSizeSlot).low();
        for (std::uint64_t i = 1; i <= n; ++i)
        {
            const std::uint64_t key = arena.peek(root_, key_slot(i)).low();
            if (key == 0)
                return false;
            const QueueEntry e = peek_record(arena, seq_of_key(key));
            if (e.priority == 0)
                return false;  // record missing
            if (i >= 2)
            {
                const std::uint64_t parent_key = arena.peek(root_, key_slot(i / 2)).low();
                const QueueEntry p = peek_record(arena, seq_of_key(parent_key));
                if (detail::pack_rank(p, direction_) < detail::pack_rank(e, direction_))
                    return false;
            }
        }
        return true;
    }

private:
    static constexpr SlotId kRecordBase = 1ULL << 32;
    static constexpr SlotId key_slot(std::uint64_t i) { return 1 + i; }
    static constexpr SlotId rec_slot(std::uint64_t seq, std::uint64_t field)
    {
        return kRecordBase + seq * 4 + field;
    }

    [[nodiscard]] std::uint64_t make_key(const QueueEntry& e) const
    {
        return mode_ == HkvKeyMode::order_key ? e.sequence + 1 : rank_of(e);
    }
    [[nodiscard]] std::uint64_t seq_of_key(std::uint64_t key) const
    {
        if (mode_ == HkvKeyMode::order_key)
            return key - 1;
        return detail::kOrd32 - (key & detail::kOrd32);
    }

    /// Comparison rank of a stored key. In order_key mode this copies the
    /// whole record out of the key-value region, the way a naive struct
    /// load compiles.
    std::uint64_t rank_of_key(StorageArena& arena, std::uint64_t key)
    {
        if (mode_ == HkvKeyMode::packed_rank)
            return key;
        return rank_of(load_record(arena, key - 1));
    }

    void store_record(StorageArena& arena, const QueueEntry& e)
    {
        if (mode_ == HkvKeyMode::order_key)
        {
            arena.sstore(root_, rec_slot(e.sequence, 0), e.priority);
            arena.sstore(root_, rec_slot(e.sequence, 1), e.payload);
            arena.sstore(root_, rec_slot(e.sequence, 2), e.sequence + 1);
        }
        else
        {
            arena.sstore(root_, rec_slot(e.sequence, 0), rank_of(e));
            arena.sstore(root_, rec_slot(e.sequence, 1), e.payload);
        }
    }

    QueueEntry load_record(StorageArena& arena, std::uint64_t seq)
    {
        if (mode_ == HkvKeyMode::order_key)
        {
            QueueEntry e;
            e.priority = arena.sload(root_, rec_slot(seq, 0)).low();
            e.payload = arena.sload(root_, rec_slot(seq, 1)).low();
            e.sequence = arena.sload(root_, rec_slot(seq, 2)).low() - 1;
            return e;
        }
        const std::uint64_t rank = arena.sload(root_, rec_slot(seq, 0)).low();
        const std::uint64_t payload = arena.sload(root_, rec_slot(seq, 1)).low();
        return entry_of(rank, payload);
    }

    void delete_record(StorageArena& arena, std::uint64_t seq)
    {
        arena.sstore(root_, rec_slot(seq, 0), 0);
        arena.sstore(root_, rec_slot(seq, 1), 0);
        if (mode_ == HkvKeyMode::order_key)
            arena.sstore(root_, rec_slot(seq, 2), 0);
    }

    // The dynamic key array of order_key mode bounds-checks each indexed
    // access; the static array of packed_rank mode does not.
    std::uint64_t read_key(StorageArena& arena, std::uint64_t i)
    {
        if (mode_ == HkvKeyMode::order_key)
            arena.sload(root_, kSizeSlot);
        return arena.sload(root_, key_slot(i)).low();
    }
    void write_key(StorageArena& arena, std::uint64_t i, std::uint64_t key)
    {
        if (mode_ == HkvKeyMode::order_key)
            arena.sload(root_, kSizeSlot);
        arena.sstore(root_, key_slot(i), key);
    }
    void move_key(StorageArena& arena, std::uint64_t from, std::uint64_t to)
    {
        write_key(arena, to, read_key(arena, from));
    }

    [[nodiscard]] QueueEntry peek_record(const StorageArena& arena, std::uint64_t seq) const
    {
        if (mode_ == HkvKeyMode::order_key)
        {
            QueueEntry e;
            e.priority = arena.peek(root_, rec_slot(seq, 0)).low();
            e.payload = arena.peek(root_, rec_slot(seq, 1)).low();
            const auto s = arena.peek(root_, rec_slot(seq, 2)).low();
            e.sequence = s == 0 ? 0 : s - 1;
            return e;
        }
        return entry_of(arena.peek(root_, rec_slot(seq, 0)).low(),
            arena.peek(root_, rec_slot(seq, 1)).low());
    }

    HkvKeyMode mode_;
    std::uint64_t capacity_;
};

/// Sorted singly-linked list where every node is its own three-slot
/// contract (rank, payload, next). Node fields are reached through the
/// node's external interface, one call per field.
class LinkedListContractQueue final : public QueueBackend
{
public:
    LinkedListContractQueue(StorageArena& arena, QueueDirection dir, CleanupPolicy policy,
        const PqConfig& cfg)
        : QueueBackend{PqVariant::linked_list_contracts, dir, policy, arena},
          node_code_size_{cfg.node_code_size}
    {}

    void enqueue(StorageArena& arena, const QueueEntry& entry) override
    {
        detail::check_entry(entry);
        const std::uint64_t rank = rank_of(entry);
        // Constructor stores the node fields directly.
        const Address node = arena.create_contract(node_code_size_);
        arena.sstore(node, kNodeRank, rank);
        arena.sstore(node, kNodePayload, entry.payload);

        const std::uint64_t n = arena.sload(root_, kSizeSlot).low();
        Address prev = 0;
        Address cur = arena.sload(root_, kHeadSlot).low();
        while (cur != 0)
        {
            const std::uint64_t cur_rank = node_field(arena, cur, kNodeRank);
            if (cur_rank < rank)
                break;
            prev = cur;
            cur = node_field(arena, cur, kNodeNext);
        }
        arena.sstore(node, kNodeNext, cur);
        if (prev == 0)
            arena.sstore(root_, kHeadSlot, node);
        else
        {
            arena.call_contract(prev);
            arena.sstore(prev, kNodeNext, node);
        }
        arena.sstore(root_, kSizeSlot, n + 1);
    }

    QueueEntry dequeue(StorageArena& arena) override
    {
        const std::uint64_t n = arena.sload(root_, kSizeSlot).low();
        if (n == 0)
            throw std::logic_error{"dequeue from empty queue"};
        const Address head = arena.sload(root_, kHeadSlot).low();
        const std::uint64_t rank = node_field(arena, head, kNodeRank);
        const std::uint64_t payload = node_field(arena, head, kNodePayload);
        const Address next = node_field(arena, head, kNodeNext);
        arena.sstore(root_, kHeadSlot, next);
        if (policy_ == CleanupPolicy::clean)
        {
            arena.call_contract(head);
            arena.self_destruct(head);
        }
        arena.sstore(root_, kSizeSlot, n - 1);
        return entry_of(rank, payload);
    }

    void reset_dangling(StorageArena& arena) override
    {
        arena.sstore(root_, kSizeSlot, 0);
        arena.sstore(root_, kHeadSlot, 0);
    }

    [[nodiscard]] std::vector<QueueEntry> snapshot(const StorageArena& arena) const override
    {
        std::vector<QueueEntry> out;
        for (Address cur = arena.peek(root_, kHeadSlot).low(); cur != 0;
             cur = arena.peek(cur, kNodeNext).low())
            out.push_back(entry_of(arena.peek(cur, kNodeRank).low(), arena.peek(cur, kNodePayload).low()));
        return out;
    }

    [[nodiscard]] bool audit(const StorageArena& arena) const override
    {
        const std::uint64_t n = arena.peek(root_, kSizeSlot).low();
        std::uint64_t count = 0;
        std::uint64_t prev_rank = ~0ULL;
        for (Address cur = arena.peek(root_, kHeadSlot).low(); cur != 0;
             cur = arena.peek(cur, kNodeNext).low())
        {
            if (!arena.contract_alive(cur))
                return false;
            const std::uint64_t rank = arena.peek(cur, kNodeRank).low();
            if (rank == 0 || rank >= prev_rank)
                return false;
            prev_rank = rank;
            ++count;
        }
        return count == n;
    }

private:
    static constexpr SlotId kHeadSlot = 1;
    static constexpr SlotId kNodeRank = 0;
    static constexpr SlotId kNodePayload = 1;
    static constexpr SlotId kNodeNext = 2;

    std::uint64_t node_field(StorageArena& arena, Address node, SlotId slot)
    {
        arena.call_contract(node);
        return arena.sload(node, slot).low();
    }

    std::uint64_t node_code_size_;
};

/// Sorted doubly-linked list in a key-value region: per-node records carry
/// (rank, payload, next, prev) keyed by sequence; the contract stores the
/// head and tail keys. Inserts scan from the head toward the tail.
class LinkedListKeyValueQueue final : public QueueBackend
{
public:
    LinkedListKeyValueQueue(StorageArena& arena, QueueDirection dir, CleanupPolicy policy)
        : QueueBackend{PqVariant::linked_list_key_value, dir, policy, arena}
    {}

    void enqueue(StorageArena& arena, const QueueEntry& entry) override
    {
        detail::check_entry(entry);
        const std::uint64_t rank = rank_of(entry);
        const std::uint64_t key = entry.sequence + 1;
        const std::uint64_t n = arena.sload(root_, kSizeSlot).low();

        arena.sstore(root_, rec_slot(key, kRank), rank);
        arena.sstore(root_, rec_slot(key, kPayload), entry.payload);

        std::uint64_t above = 0;  // last node still better than the new entry
        std::uint64_t cur = arena.sload(root_, kHeadSlot).low();
        while (cur != 0)
        {
            const std::uint64_t cur_rank = arena.sload(root_, rec_slot(cur, kRank)).low();
            if (cur_rank < rank)
                break;
            above = cur;
            cur = arena.sload(root_, rec_slot(cur, kNext)).low();
        }
        arena.sstore(root_, rec_slot(key, kNext), cur);
        arena.sstore(root_, rec_slot(key, kPrev), above);
        if (above == 0)
            arena.sstore(root_, kHeadSlot, key);
        else
            arena.sstore(root_, rec_slot(above, kNext), key);
        if (cur == 0)
            arena.sstore(root_, kTailSlot, key);
        else
            arena.sstore(root_, rec_slot(cur, kPrev), key);
        arena.sstore(root_, kSizeSlot, n + 1);
    }

    QueueEntry dequeue(StorageArena& arena) override
    {
        const std::uint64_t n = arena.sload(root_, kSizeSlot).low();
        if (n == 0)
            throw std::logic_error{"dequeue from empty queue"};
        const std::uint64_t key = arena.sload(root_, kHeadSlot).low();
        const std::uint64_t rank = arena.sload(root_, rec_slot(key, kRank)).low();
        const std::uint64_t payload = arena.sload(root_, rec_slot(key, kPayload)).low();
        const std::uint64_t next = arena.sload(root_, rec_slot(key, kNext)).low();
        arena.sload(root_, rec_slot(key, kPrev));  // full record copy

        arena.sstore(root_, kHeadSlot, next);
        if (next == 0)
            arena.sstore(root_, kTailSlot, 0);
        else
            arena.sstore(root_, rec_slot(next, kPrev), 0);
        if (policy_ == CleanupPolicy::clean)
        {
            arena.sstore(root_, rec_slot(key, kRank), 0);
            arena.sstore(root_, rec_slot(key, kPayload), 0);
            arena.sstore(root_, rec_slot(key, kNext), 0);
            arena.sstore(root_, rec_slot(key, kPrev), 0);
        }
        arena.sstore(root_, kSizeSlot, n - 1);
        return entry_of(rank, payload);
    }

    void reset_dangling(StorageArena& arena) override
    {
        arena.sstore(root_, kSizeSlot, 0);
        arena.sstore(root_, kHeadSlot, 0);
        arena.sstore(root_, kTailSlot, 0);
    }

    [[nodiscard]] std::vector<QueueEntry> snapshot(const StorageArena& arena) const override
    {
        std::vector<QueueEntry> out;
        for (std::uint64_t cur = arena.peek(root_, kHeadSlot).low(); cur != 0;
             cur = arena.peek(root_, rec_slot(cur, kNext)).low())
            out.push_back(entry_of(arena.peek(root_, rec_slot(cur, kRank)).low(),
                arena.peek(root_, rec_slot(cur, kPayload)).low()));
        return out;
    }

    [[nodiscard]] bool audit(const StorageArena& arena) const override
    {
        const std::uint64_t n = arena.peek(root_, kSizeSlot).low();
        std::uint64_t count = 0;
        std::uint64_t prev_rank = ~0ULL;
        std::uint64_t prev_key = 0;
        for (std::uint64_t cur = arena.peek(root_, kHeadSlot).low(); cur != 0;
             cur = arena.peek(root_, rec_slot(cur, kNext)).low())
        {
            const std::uint64_t rank = arena.peek(root_, rec_slot(cur, kRank)).low();
            if (rank == 0 || rank >= prev_rank)
                return false;
            if (arena.peek(root_, rec_slot(cur, kPrev)).low() != prev_key)
                return false;
            prev_rank = rank;
            prev_key = cur;
            ++count;
        }
        if (arena.peek(root_, kTailSlot).low() != prev_key)
            return false;
        return count == n;
    }

private:
    static constexpr SlotId kHeadSlot = 1;
    static constexpr SlotId kTailSlot = 2;
    static constexpr SlotId kRecordBase = 1ULL << 32;
    static constexpr std::uint64_t kRank = 0;
    static constexpr std::uint64_t kPayload = 1;
    static constexpr std::uint64_t kNext = 2;
    static constexpr std::uint64_t kPrev = 3;

    static constexpr SlotId rec_slot(std::uint64_t key, std::uint64_t field)
    {
        return kRecordBase + key * 8 + field;
    }
};

inline std::unique_ptr<QueueBackend> make_queue(PqVariant variant, QueueDirection dir,
    CleanupPolicy policy, StorageArena& arena, const PqConfig& cfg = {})
{
    switch (variant)
    {
    case PqVariant::heap_dynamic_array:
        return std::make_unique<HeapArrayQueue>(arena, dir, policy, true, cfg);
    case PqVariant::heap_static_array:
        return std::make_unique<HeapArrayQueue>(arena, dir, policy, false, cfg);
    case PqVariant::heap_key_value:
        return std::make_unique<HeapKeyValueQueue>(arena, dir, policy, cfg);
    case PqVariant::linked_list_contracts:
        return std::make_unique<LinkedListContractQueue>(arena, dir, policy, cfg);
    case PqVariant::linked_list_key_value:
        return std::make_unique<LinkedListKeyValueQueue>(arena, dir, policy);
    }
    throw std::invalid_argument{"unknown queue variant"};
}

inline constexpr PqVariant kAllPqVariants[] = {PqVariant::heap_dynamic_array,
    PqVariant::heap_static_array, PqVariant::heap_key_value, PqVariant::linked_list_contracts,
    PqVariant::linked_list_key_value};

}  // namespace gasbook
