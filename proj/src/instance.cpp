#include "pstrust/instance.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "pstrust/errors.hpp"

namespace pstrust {

namespace {

[[noreturn]] void fail_line(int line, const std::string& why) {
    throw InputError("instance line " + std::to_string(line) + ": " + why);
}

template <typename T>
T parse_number(const std::string& token, int line, const char* what) {
    std::istringstream in(token);
    T value{};
    in >> value;
    if (in.fail() || !in.eof()) fail_line(line, std::string("bad ") + what + " '" + token + "'");
    if constexpr (std::is_integral_v<T>) {
        if (!token.empty() && (token[0] == '-' || token[0] == '+'))
            fail_line(line, std::string(what) + " must be an unsigned integer");
    }
    return value;
}

std::string format_coord(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

InstanceFile parse_instance(std::istream& in) {
    InstanceFile file;
    bool saw_m = false, saw_n = false, saw_k = false, saw_arena = false, saw_protection = false,
         saw_group_seed = false, saw_perm_seed = false, saw_sellers = false, saw_buyers = false;

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream fields(raw);
        std::string keyword;
        if (!(fields >> keyword)) continue;
        std::vector<std::string> args;
        for (std::string tok; fields >> tok;) args.push_back(tok);

        auto want = [&](std::size_t n) {
            if (args.size() != n)
                fail_line(line, keyword + " takes " + std::to_string(n) + " value(s), got " +
                                    std::to_string(args.size()));
        };
        auto once = [&](bool& seen) {
            if (seen) fail_line(line, "duplicate " + keyword);
            seen = true;
        };

        if (keyword == "m") {
            want(1), once(saw_m);
            file.sellers = parse_number<std::uint32_t>(args[0], line, "seller count");
        } else if (keyword == "n") {
            want(1), once(saw_n);
            file.buyers = parse_number<std::uint32_t>(args[0], line, "buyer count");
        } else if (keyword == "k") {
            want(1), once(saw_k);
            file.bid_bits = parse_number<int>(args[0], line, "bit width");
        } else if (keyword == "arena") {
            want(2), once(saw_arena);
            file.arena_width = parse_number<double>(args[0], line, "arena width");
            file.arena_height = parse_number<double>(args[1], line, "arena height");
        } else if (keyword == "protection") {
            want(1), once(saw_protection);
            file.protection = parse_number<double>(args[0], line, "protection distance");
        } else if (keyword == "seed-group") {
            want(1), once(saw_group_seed);
            file.group_seed = parse_number<std::uint64_t>(args[0], line, "grouping seed");
        } else if (keyword == "seed-perm") {
            want(1), once(saw_perm_seed);
            file.perm_seed = parse_number<std::uint64_t>(args[0], line, "permutation seed");
        } else if (keyword == "sellers") {
            once(saw_sellers);
            for (const std::string& tok : args)
                file.seller_bids.push_back(parse_number<std::uint32_t>(tok, line, "seller ask"));
        } else if (keyword == "buyers") {
            once(saw_buyers);
            for (const std::string& tok : args)
                file.buyer_bids.push_back(parse_number<std::uint32_t>(tok, line, "buyer bid"));
        } else if (keyword == "loc") {
            want(3);
            BuyerLocation loc;
            loc.id = parse_number<std::uint32_t>(args[0], line, "buyer id");
            loc.x = parse_number<double>(args[1], line, "x coordinate");
            loc.y = parse_number<double>(args[2], line, "y coordinate");
            file.locations.push_back(loc);
        } else if (keyword == "group") {
            if (args.size() < 2) fail_line(line, "group needs an id and at least one member");
            std::uint32_t id = parse_number<std::uint32_t>(args[0], line, "group id");
            if (id != file.explicit_groups.size())
                fail_line(line, "group ids must appear in order starting at 0");
            std::vector<std::uint32_t> members;
            for (std::size_t i = 1; i < args.size(); ++i)
                members.push_back(parse_number<std::uint32_t>(args[i], line, "group member"));
            file.explicit_groups.push_back(std::move(members));
        } else {
            fail_line(line, "unknown keyword '" + keyword + "'");
        }
    }

    if (!saw_m || !saw_n) throw InputError("instance: missing m or n");
    if (!saw_sellers || !saw_buyers) throw InputError("instance: missing sellers or buyers line");
    if (!file.locations.empty() && !file.explicit_groups.empty())
        throw InputError("instance: has both loc and group lines; pick one form");
    if (file.locations.empty() && file.explicit_groups.empty())
        throw InputError("instance: needs loc lines or group lines");
    return file;
}

InstanceFile read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open instance file " + path);
    return parse_instance(in);
}

void write_instance(const InstanceFile& file, std::ostream& out) {
    out << "m " << file.sellers << "\n";
    out << "n " << file.buyers << "\n";
    out << "k " << file.bid_bits << "\n";
    if (!file.locations.empty()) {
        out << "arena " << format_coord(file.arena_width) << ' '
            << format_coord(file.arena_height) << "\n";
        out << "protection " << format_coord(file.protection) << "\n";
        out << "seed-group " << file.group_seed << "\n";
    }
    if (file.perm_seed) out << "seed-perm " << *file.perm_seed << "\n";
    out << "sellers";
    for (std::uint32_t b : file.seller_bids) out << ' ' << b;
    out << "\n";
    out << "buyers";
    for (std::uint32_t b : file.buyer_bids) out << ' ' << b;
    out << "\n";
    for (const BuyerLocation& loc : file.locations)
        out << "loc " << loc.id << ' ' << format_coord(loc.x) << ' ' << format_coord(loc.y)
            << "\n";
    for (std::size_t g = 0; g < file.explicit_groups.size(); ++g) {
        out << "group " << g;
        for (std::uint32_t id : file.explicit_groups[g]) out << ' ' << id;
        out << "\n";
    }
}

void write_instance_file(const InstanceFile& file, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write instance file " + path);
    write_instance(file, out);
    if (!out) throw InputError("write failed for instance file " + path);
}

PlainInstance prepare(const InstanceFile& file) {
    if (file.seller_bids.size() != file.sellers)
        throw InputError("instance: sellers line has " + std::to_string(file.seller_bids.size()) +
                         " asks for m=" + std::to_string(file.sellers));
    if (file.buyer_bids.size() != file.buyers)
        throw InputError("instance: buyers line has " + std::to_string(file.buyer_bids.size()) +
                         " bids for n=" + std::to_string(file.buyers));

    PlainInstance inst;
    inst.seller_bids = file.seller_bids;
    inst.buyer_bids = file.buyer_bids;
    inst.bid_bits = file.bid_bits;

    if (!file.locations.empty()) {
        if (file.locations.size() != file.buyers)
            throw InputError("instance: needs exactly one loc line per buyer");
        ConflictGraph graph = build_conflict_graph(file.locations, file.protection);
        inst.groups = form_groups(graph, file.group_seed);
    } else {
        for (std::size_t g = 0; g < file.explicit_groups.size(); ++g)
            inst.groups.push_back(
                BuyerGroup{static_cast<std::uint32_t>(g), file.explicit_groups[g]});
    }

    validate_instance(inst);
    return inst;
}

InstanceFile generate_instance(const GenParams& params) {
    if (params.sellers == 0 || params.buyers == 0)
        throw InputError("generate_instance: both sides must be non-empty");
    if (params.bid_bits < 2 || params.bid_bits > 48)
        throw InputError("generate_instance: bit width out of range");
    if (params.arena_width <= 0 || params.arena_height <= 0 || params.protection < 0)
        throw InputError("generate_instance: bad arena geometry");

    InstanceFile file;
    file.sellers = params.sellers;
    file.buyers = params.buyers;
    file.bid_bits = params.bid_bits;
    file.arena_width = params.arena_width;
    file.arena_height = params.arena_height;
    file.protection = params.protection;

    std::mt19937_64 rng(params.seed);
    file.group_seed = rng();

    // Locations on a 0.001 grid so the text round-trip is exact.
    auto grid = [&](double extent) {
        auto cells = static_cast<std::uint64_t>(extent * 1000.0);
        return static_cast<double>(rng() % (cells + 1)) / 1000.0;
    };
    for (std::uint32_t i = 0; i < params.buyers; ++i)
        file.locations.push_back(BuyerLocation{i, grid(params.arena_width),
                                               grid(params.arena_height)});

    // Group sizes decide how large a buyer bid may be: the group bid
    // size * min(member bids) must stay below the saturation value 2^k - 1.
    ConflictGraph graph = build_conflict_graph(file.locations, file.protection);
    std::vector<BuyerGroup> groups = form_groups(graph, file.group_seed);
    std::size_t largest = 0;
    for (const BuyerGroup& g : groups) largest = std::max(largest, g.size());

    const std::uint64_t top = (std::uint64_t{1} << params.bid_bits) - 2;
    const std::uint64_t buyer_cap = top / largest;
    if (buyer_cap < 1)
        throw InputError("generate_instance: bit width too small for the group sizes");

    for (std::uint32_t i = 0; i < params.sellers; ++i)
        file.seller_bids.push_back(static_cast<std::uint32_t>(1 + rng() % top));
    for (std::uint32_t i = 0; i < params.buyers; ++i)
        file.buyer_bids.push_back(static_cast<std::uint32_t>(1 + rng() % buyer_cap));
    return file;
}

}  // namespace pstrust
