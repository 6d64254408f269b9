// gasbook: storage-metered call market laboratory
// Copyright 2026 The gasbook Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: runs the queue and market benchmarks, the
// front-running scenarios, and the rollup cost split, and emits the
// results as CSV or JSON. All commands are deterministic for a fixed seed
// and configuration.

#include <gasbook/bench.hpp>
#include <gasbook/config.hpp>
#include <gasbook/io.hpp>
#include <gasbook/rollup.hpp>
#include <gasbook/scenario.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace
{
using namespace gasbook;

struct Options
{
    std::string config_path;
    std::string schedule_path;
    std::string backend;
    std::string hkv_key_mode = "order_key";
    std::uint64_t n = 50;
    std::uint64_t seed = 1;
    std::string format = "csv";
    std::string out;
    std::string scenario = "all";
    std::string venue = "both";
    std::string book_path;
};

std::vector<PqVariant> selected_backends(const std::string& backend)
{
    if (backend.empty() || backend == "all")
        return {kAllPqVariants, kAllPqVariants + 5};
    return {pq_variant_from_string(backend)};
}

/// Config-file values apply only where the flag was not given on the
/// command line: flags override the file.
void apply_config_file(Options& opt, const CLI::App* cmd)
{
    if (opt.config_path.empty())
        return;
    const auto cfg = KeyValueConfig::load(opt.config_path);
    auto absent = [&](const std::string& flag) { return cmd->count(flag) == 0; };
    if (absent("--schedule"))
        opt.schedule_path = cfg.get("schedule", opt.schedule_path);
    if (absent("--backend"))
        opt.backend = cfg.get("backend", opt.backend);
    if (absent("--hkv-key-mode"))
        opt.hkv_key_mode = cfg.get("hkv_key_mode", opt.hkv_key_mode);
    if (absent("--n"))
        opt.n = cfg.get_u64("n", opt.n);
    if (absent("--seed"))
        opt.seed = cfg.get_u64("seed", opt.seed);
    if (absent("--format"))
        opt.format = cfg.get("format", opt.format);
    if (absent("--out"))
        opt.out = cfg.get("out", opt.out);
    if (cmd->get_option_no_throw("--scenario") != nullptr && absent("--scenario"))
        opt.scenario = cfg.get("scenario", opt.scenario);
    if (cmd->get_option_no_throw("--venue") != nullptr && absent("--venue"))
        opt.venue = cfg.get("venue", opt.venue);
}

GasSchedule schedule_of(const Options& opt)
{
    return opt.schedule_path.empty() ? GasSchedule{} : load_schedule(opt.schedule_path);
}

PqConfig pq_config_of(const Options& opt)
{
    PqConfig pq;
    if (opt.hkv_key_mode == "packed_rank")
        pq.hkv_key_mode = HkvKeyMode::packed_rank;
    else if (opt.hkv_key_mode == "order_key")
        pq.hkv_key_mode = HkvKeyMode::order_key;
    else
        throw CLI::ValidationError{"--hkv-key-mode must be order_key or packed_rank"};
    return pq;
}

void emit(const Options& opt, const std::string& text)
{
    if (opt.out.empty())
    {
        std::cout << text;
        return;
    }
    std::ofstream file{opt.out, std::ios::binary};
    if (!file)
        throw std::runtime_error{"cannot open output file: " + opt.out};
    file << text;
}

int cmd_bench_pq(const Options& opt)
{
    const PqConfig pq = pq_config_of(opt);
    std::vector<std::pair<PqVariant, std::vector<GasReceipt>>> series;
    std::vector<bench::DrainReport> drains;
    for (const auto variant : selected_backends(opt.backend))
    {
        series.emplace_back(variant,
            bench::enqueue_series(variant, opt.n, opt.seed, QueueDirection::max_first,
                CleanupPolicy::clean, pq));
        drains.push_back(bench::drain_cost_report(variant, CleanupPolicy::clean, opt.n, opt.seed,
            pq));
    }

    // Invariant audit: all variants drain the same sequence.
    {
        StorageArena arena;
        arena.begin_tx();
        auto reference = make_queue(PqVariant::linked_list_key_value, QueueDirection::max_first,
            CleanupPolicy::clean, arena, pq);
        arena.end_tx();
        std::vector<QueueEntry> expected;
        for (const auto& e : bench::random_entries(opt.n, opt.seed))
        {
            arena.begin_tx();
            reference->enqueue(arena, e);
            arena.end_tx();
        }
        while (reference->size_unmetered(arena) != 0)
        {
            arena.begin_tx();
            expected.push_back(reference->dequeue(arena));
            if (!reference->audit(arena))
                throw std::runtime_error{"queue structure audit failed"};
            arena.end_tx();
        }
        for (const auto variant : selected_backends(opt.backend))
        {
            StorageArena check_arena;
            check_arena.begin_tx();
            auto q = make_queue(variant, QueueDirection::max_first, CleanupPolicy::clean,
                check_arena, pq);
            check_arena.end_tx();
            for (const auto& e : bench::random_entries(opt.n, opt.seed))
            {
                check_arena.begin_tx();
                q->enqueue(check_arena, e);
                check_arena.end_tx();
            }
            for (const auto& want : expected)
            {
                check_arena.begin_tx();
                if (q->dequeue(check_arena) != want || !q->audit(check_arena))
                    throw std::runtime_error{
                        "behavioral equivalence audit failed for " + to_string(variant)};
                check_arena.end_tx();
            }
        }
    }

    std::ostringstream out;
    if (opt.format == "json")
    {
        json doc;
        json enq = json::object();
        for (const auto& [variant, receipts] : series)
        {
            json arr = json::array();
            for (const auto& r : receipts)
                arr.push_back(to_json(r));
            enq[to_string(variant)] = std::move(arr);
        }
        json drain_rows = json::array();
        for (const auto& d : drains)
            drain_rows.push_back(json{{"variant", to_string(d.variant)},
                {"cleanup", d.policy == CleanupPolicy::clean ? "clean" : "leave"}, {"n", d.n},
                {"drain", to_json(d.drain)}});
        doc["enqueue_series"] = std::move(enq);
        doc["drain"] = std::move(drain_rows);
        out << doc.dump(2) << '\n';
    }
    else
    {
        write_enqueue_series_csv(out, series);
        out << '\n';
        write_drain_csv(out, drains);
    }
    emit(opt, out.str());
    return 0;
}

int cmd_bench_cleanup(const Options& opt)
{
    const PqConfig pq = pq_config_of(opt);
    std::vector<bench::DrainReport> rows;
    // Row order: node contracts without/with destruction, then the
    // mapping list without/with deletion.
    rows.push_back(bench::drain_cost_report(
        PqVariant::linked_list_contracts, CleanupPolicy::leave, opt.n, opt.seed, pq));
    rows.push_back(bench::drain_cost_report(
        PqVariant::linked_list_contracts, CleanupPolicy::clean, opt.n, opt.seed, pq));
    rows.push_back(bench::drain_cost_report(
        PqVariant::linked_list_key_value, CleanupPolicy::leave, opt.n, opt.seed, pq));
    rows.push_back(bench::drain_cost_report(
        PqVariant::linked_list_key_value, CleanupPolicy::clean, opt.n, opt.seed, pq));

    std::ostringstream out;
    if (opt.format == "json")
    {
        json arr = json::array();
        for (const auto& d : rows)
            arr.push_back(json{{"variant", to_string(d.variant)},
                {"cleanup", d.policy == CleanupPolicy::clean ? "clean" : "leave"}, {"n", d.n},
                {"drain", to_json(d.drain)}});
        out << arr.dump(2) << '\n';
    }
    else
        write_drain_csv(out, rows, true);
    emit(opt, out.str());
    return 0;
}

int cmd_bench_market(const Options& opt)
{
    MarketConfig base;
    base.pq = pq_config_of(opt);
    std::vector<bench::MarketBenchRow> rows;
    for (const auto variant : selected_backends(opt.backend))
        rows.push_back(bench::bench_market(variant, opt.seed, base));

    // Invariant audit: every close receipt hits the refund cap.
    for (const auto& row : rows)
    {
        const GasSchedule schedule;
        if (row.close_at_max.refund_applied !=
            schedule.refund_cap(row.close_at_max.gas_used_pre_refund))
            throw std::runtime_error{"close receipt missed the refund cap for " +
                                     to_string(row.variant)};
    }

    std::ostringstream out;
    if (opt.format == "json")
    {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back(json{{"variant", to_string(r.variant)}, {"max_trades", r.max_trades},
                {"close_at_max", to_json(r.close_at_max)},
                {"gas_1000_trades", r.gas_1000_trades}, {"avg_submission", r.avg_submission}});
        out << arr.dump(2) << '\n';
    }
    else
        write_market_bench_csv(out, rows);
    emit(opt, out.str());
    return 0;
}

int cmd_sim(const Options& opt, const std::string& scenario_file)
{
    if (!scenario_file.empty())
    {
        const auto sc = ScenarioConfig::load(scenario_file);
        const auto report = run_scenario_config(sc, opt.seed);
        std::ostringstream out;
        out << to_json(report).dump(2) << '\n';
        emit(opt, out.str());
        return 0;
    }

    MinerPolicy policy;
    policy.kind = PolicyKind::adversarial;

    std::vector<Venue> venues;
    if (opt.venue == "both")
        venues = {Venue::call_market, Venue::continuous_book};
    else if (opt.venue == "call_market")
        venues = {Venue::call_market};
    else if (opt.venue == "continuous_book")
        venues = {Venue::continuous_book};
    else
        throw CLI::ValidationError{"--venue must be call_market, continuous_book or both"};

    std::ostringstream out;
    if (opt.scenario == "all")
    {
        const auto cells = verdict_matrix(opt.seed);
        if (opt.format == "json")
        {
            json arr = json::array();
            for (const auto& name : scenario_names())
                for (Venue venue : venues)
                    arr.push_back(to_json(run_scenario(name, venue, policy, opt.seed)));
            out << arr.dump(2) << '\n';
        }
        else
            write_verdict_matrix_csv(out, cells);
    }
    else
    {
        // Individual scenario reports are structured output either way.
        json arr = json::array();
        for (Venue venue : venues)
            arr.push_back(to_json(run_scenario(opt.scenario, venue, policy, opt.seed)));
        out << (arr.size() == 1 ? arr[0] : arr).dump(2) << '\n';
    }
    emit(opt, out.str());
    return 0;
}

int cmd_rollup(const Options& opt, bool n_given)
{
    std::vector<std::uint64_t> pair_counts = {1, 2, 4, 8, 16, 38, 64, 100};
    if (n_given)
        pair_counts = {opt.n};

    RollupConfig cfg;
    std::vector<SavingsRow> rows;
    rows.reserve(pair_counts.size());
    for (const auto pairs : pair_counts)
        rows.push_back(savings_report(pairs, cfg.l2_backend, cfg, schedule_of(opt)));

    std::ostringstream out;
    if (opt.format == "json")
    {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back(json{{"n_pairs", r.n_pairs}, {"l1_direct", r.l1_direct},
                {"l1_rollup", r.l1_rollup}, {"arbgas", r.arbgas}, {"savings", r.savings}});
        out << arr.dump(2) << '\n';
    }
    else
        write_savings_csv(out, rows);
    emit(opt, out.str());
    return 0;
}

int cmd_close_book(const Options& opt)
{
    if (opt.book_path.empty())
        throw CLI::ValidationError{"--book <csv> is required"};
    std::ifstream in{opt.book_path};
    if (!in)
        throw std::runtime_error{"cannot open book file: " + opt.book_path};
    const auto book = load_book_csv(in);

    MarketConfig cfg;
    cfg.pq = pq_config_of(opt);
    if (!opt.backend.empty() && opt.backend != "all")
        cfg.backend = pq_variant_from_string(opt.backend);
    const auto probe = bench::play_book(cfg.backend, book, cfg);

    std::uint64_t revenue = 0;
    json fills = json::array();
    for (const auto& f : probe.fills)
    {
        fills.push_back(to_json(f));
        revenue += f.improvement_total();
    }
    json doc{{"fills", std::move(fills)}, {"miner_revenue", revenue},
        {"close_receipt", to_json(probe.receipt)}};
    std::ostringstream out;
    out << doc.dump(2) << '\n';
    emit(opt, out.str());
    return 0;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gasbook: storage-metered call market laboratory"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opt.config_path, "flat key-value config file");
        cmd->add_option("--schedule", opt.schedule_path, "gas schedule file");
        cmd->add_option("--backend", opt.backend, "queue backend name or 'all'");
        cmd->add_option("--hkv-key-mode", opt.hkv_key_mode,
            "heap_key_value layout: order_key or packed_rank");
        cmd->add_option("--n", opt.n, "entry / pair count");
        cmd->add_option("--seed", opt.seed, "random seed");
        cmd->add_option("--format", opt.format, "csv or json");
        cmd->add_option("--out", opt.out, "output path (stdout if omitted)");
    };

    auto* bench_pq = app.add_subcommand("bench-pq", "per-insert and drain gas for the queues");
    add_common(bench_pq);
    auto* bench_cleanup =
        app.add_subcommand("bench-cleanup", "cleanup cost-benefit for the list variants");
    add_common(bench_cleanup);
    auto* bench_market =
        app.add_subcommand("bench-market", "worst-case close capacity per backend");
    add_common(bench_market);
    auto* sim = app.add_subcommand("sim", "front-running scenarios and the verdict matrix");
    add_common(sim);
    std::string scenario_file;
    sim->add_option("--scenario", opt.scenario, "scenario name or 'all'");
    sim->add_option("--venue", opt.venue, "call_market, continuous_book or both");
    sim->add_option("--scenario-file", scenario_file, "declarative scenario definition file");
    auto* rollup = app.add_subcommand("rollup", "L1/L2 cost split across a pair sweep");
    add_common(rollup);
    auto* close_book = app.add_subcommand("close-book", "match one book from a CSV snapshot");
    add_common(close_book);
    close_book->add_option("--book", opt.book_path, "book CSV: trader,side,price,volume");

    CLI11_PARSE(app, argc, argv);

    try
    {
        const CLI::App* active = app.get_subcommands().front();
        apply_config_file(opt, active);
        if (bench_pq->parsed())
            return cmd_bench_pq(opt);
        if (bench_cleanup->parsed())
            return cmd_bench_cleanup(opt);
        if (bench_market->parsed())
            return cmd_bench_market(opt);
        if (sim->parsed())
            return cmd_sim(opt, scenario_file);
        if (rollup->parsed())
            return cmd_rollup(opt, rollup->count("--n") > 0);
        if (close_book->parsed())
            return cmd_close_book(opt);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
