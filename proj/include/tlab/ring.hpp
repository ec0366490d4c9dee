#pragma once

#include <string>
#include <vector>

#include "tlab/int.hpp"

namespace tlab {

// Base ring: Z with a finite set of primes inverted, or the localization Z_(p)
// (every prime except p inverted).
struct Ring {
    std::vector<Int> inverted;  // sorted, distinct primes; empty for Z
    Int local_prime = 0;        // nonzero: Z_(p) mode, `inverted` ignored

    static Ring Z() { return {}; }
    static Ring invert(std::vector<Int> primes);
    static Ring local(Int p);

    bool is_Z() const { return local_prime == 0 && inverted.empty(); }
    bool is_local() const { return local_prime != 0; }

    // is the prime p a unit in this ring?
    bool unit_prime(const Int& p) const;

    // remove unit-prime content from g (g != 0); result > 0.
    // For Z_(p) this is just the p-part, no factorization needed.
    Int strip_units(const Int& g) const;

    std::string describe() const;

    bool operator==(const Ring&) const = default;
};

}  // namespace tlab
