#pragma once

// Deliberately naive reference implementations used as test oracles. They
// share no code with the library beyond plain data types.

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using Blocks = std::vector<std::array<int, 6>>;
using Table = std::vector<std::vector<int>>;

/// Histogram of c over all quadruples (o, x, y, p), by direct scanning.
std::map<int, std::uint64_t> fingerprint(const Blocks& blocks, int points);

/// True iff every unordered pair of points lies in exactly one block.
bool is_steiner(const Blocks& blocks, int points);

/// Group axioms checked straight from the definition.
bool is_group(const Table& t);

/// Order-5 Latin square that is not a group table.
Table non_associative_latin_square(std::mt19937& rng);

/// Z_m x Z_n table with mixed-radix indices (first coordinate major).
Table product_table(int m, int n);

/// Left development by integer addition mod n, for cyclic groups.
Blocks develop_cyclic(const Blocks& base, int n, bool with_infinity);

}  // namespace oracle
