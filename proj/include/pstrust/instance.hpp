#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pstrust/auction.hpp"
#include "pstrust/groups.hpp"

namespace pstrust {

// On-disk auction description. Text format, one `keyword values...` line per
// entry, `#` starts a comment:
//
//   m 3                  sellers
//   n 5                  buyers
//   k 8                  bid bit width (bids live in [1, 2^k - 2])
//   arena 100.0 100.0    buyer area width/height (with loc lines)
//   protection 20.0      conflict distance, inclusive (with loc lines)
//   seed-group 7         grouping seed (with loc lines)
//   seed-perm 11         optional session permutation seed
//   sellers 2 5 8        one ask per seller
//   buyers 9 6 1 4 4     one bid per buyer
//   loc 0 12.250 3.375   buyer id, x, y  (one per buyer), or instead:
//   group 0 1 3 4        group id then member buyer ids (partition)
//
// A file carries either `loc` lines (groups are formed from the induced
// conflict graph) or `group` lines (used verbatim), never both.
struct InstanceFile {
    std::uint32_t sellers = 0;
    std::uint32_t buyers = 0;
    int bid_bits = 8;
    double arena_width = 0.0;
    double arena_height = 0.0;
    double protection = 0.0;
    std::uint64_t group_seed = 1;
    std::optional<std::uint64_t> perm_seed;
    std::vector<std::uint32_t> seller_bids;
    std::vector<std::uint32_t> buyer_bids;
    std::vector<BuyerLocation> locations;                    // loc form
    std::vector<std::vector<std::uint32_t>> explicit_groups; // group form
};

// InputError with a line number on any malformed, duplicated, or unknown
// entry. Structural cross-checks (counts, partition) happen in prepare.
InstanceFile parse_instance(std::istream& in);
InstanceFile read_instance_file(const std::string& path);

// Canonical serialization: fixed keyword order, coordinates with three
// decimals. parse(write(f)) reproduces f exactly.
void write_instance(const InstanceFile& file, std::ostream& out);
void write_instance_file(const InstanceFile& file, const std::string& path);

// Grouping (for the loc form) plus full validation. The result is ready for
// both the plaintext oracle and a secure session.
PlainInstance prepare(const InstanceFile& file);

struct GenParams {
    std::uint32_t sellers = 10;
    std::uint32_t buyers = 30;
    int bid_bits = 8;
    std::uint64_t seed = 1;
    double arena_width = 100.0;
    double arena_height = 100.0;
    double protection = 20.0;
};

// Random instance: buyer locations uniform on a millimeter grid over the
// arena, seller asks uniform in [1, 2^k - 2], buyer bids capped so that no
// group bid can reach the saturation value. Deterministic per params.
InstanceFile generate_instance(const GenParams& params);

}  // namespace pstrust
