#include "pstrust/bench.hpp"

#include <algorithm>
#include <ostream>

#include "pstrust/errors.hpp"
#include "pstrust/instance.hpp"
#include "pstrust/protocol.hpp"

namespace pstrust {

std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
    if (cfg.sizes.empty() || cfg.ebv_bits.empty())
        throw InputError("bench: needs at least one size and one bit width");
    if (cfg.reps < 1) throw InputError("bench: reps must be positive");
    const int narrowest = *std::min_element(cfg.ebv_bits.begin(), cfg.ebv_bits.end());

    std::vector<BenchRecord> records;
    std::uint64_t sequence = 0;
    for (auto [sellers, buyers] : cfg.sizes) {
        // Bids drawn to fit the narrowest width stay valid at every width,
        // so one instance serves the whole bit-width sweep.
        GenParams gen;
        gen.sellers = sellers;
        gen.buyers = buyers;
        gen.bid_bits = narrowest;
        gen.seed = cfg.seed + 0x1000 * ++sequence;
        InstanceFile file = generate_instance(gen);

        for (int bits : cfg.ebv_bits) {
            file.bid_bits = bits;
            PlainInstance inst = prepare(file);
            for (int rep = 0; rep < cfg.reps; ++rep) {
                SessionConfig session;
                session.key_bits = cfg.key_bits;
                session.perm_seed = gen.seed + static_cast<std::uint64_t>(rep);
                LocalRunOutcome run = run_local(inst, session);

                BenchRecord rec;
                rec.sellers = sellers;
                rec.buyers = buyers;
                rec.groups = static_cast<std::uint32_t>(inst.groups.size());
                rec.ebv_bits = bits;
                rec.key_bits = cfg.key_bits;
                rec.rep = rep;
                rec.rounds = run.auctioneer.stats.rounds;
                rec.product_calls = run.auctioneer.stats.product_calls;
                const ChannelStats& ch = run.auctioneer.stats.channel;
                rec.frames = ch.frames_sent + ch.frames_received;
                rec.bytes = ch.bytes_sent + ch.bytes_received;
                rec.wall_ms = run.auctioneer.stats.wall_ms;
                records.push_back(rec);
            }
        }
    }
    return records;
}

void write_bench_csv(std::span<const BenchRecord> records, std::ostream& out) {
    out << "sellers,buyers,groups,ebv_bits,key_bits,rep,rounds,product_calls,frames,bytes,"
           "wall_ms\n";
    for (const BenchRecord& r : records) {
        out << r.sellers << ',' << r.buyers << ',' << r.groups << ',' << r.ebv_bits << ','
            << r.key_bits << ',' << r.rep << ',' << r.rounds << ',' << r.product_calls << ','
            << r.frames << ',' << r.bytes << ',' << r.wall_ms << "\n";
    }
}

}  // namespace pstrust
