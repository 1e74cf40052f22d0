#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace pstrust {

struct BenchConfig {
    // Every (sellers, buyers) size is swept over every bit width below.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> sizes;
    std::vector<int> ebv_bits;
    int key_bits = 512;
    int reps = 1;
    std::uint64_t seed = 1;
};

struct BenchRecord {
    std::uint32_t sellers = 0;
    std::uint32_t buyers = 0;
    std::uint32_t groups = 0;
    int ebv_bits = 0;
    int key_bits = 0;
    int rep = 0;
    std::uint32_t rounds = 0;
    std::uint64_t product_calls = 0;
    // Auctioneer-side channel totals, both directions.
    std::uint64_t frames = 0;
    std::uint64_t bytes = 0;
    double wall_ms = 0.0;
};

// One in-process session per (size, bit width, rep). Within one size the
// instance (locations, grouping, bids) is fixed across bit widths, so the
// sweep isolates how costs scale with the bid length. Deterministic per
// config apart from wall_ms.
std::vector<BenchRecord> run_bench(const BenchConfig& cfg);

// Header + one line per record:
// sellers,buyers,groups,ebv_bits,key_bits,rep,rounds,product_calls,frames,bytes,wall_ms
void write_bench_csv(std::span<const BenchRecord> records, std::ostream& out);

}  // namespace pstrust
