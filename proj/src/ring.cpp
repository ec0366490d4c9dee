#include "tlab/ring.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tlab {

Ring Ring::invert(std::vector<Int> primes) {
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    for (const auto& p : primes)
        if (!is_probable_prime(p)) throw std::domain_error("ring: inverted entries must be prime");
    Ring r;
    r.inverted = std::move(primes);
    return r;
}

Ring Ring::local(Int p) {
    if (!is_probable_prime(p)) throw std::domain_error("ring: local_prime must be prime");
    Ring r;
    r.local_prime = std::move(p);
    return r;
}

bool Ring::unit_prime(const Int& p) const {
    if (is_local()) return p != local_prime;
    return std::binary_search(inverted.begin(), inverted.end(), p);
}

Int Ring::strip_units(const Int& g) const {
    if (g == 0) throw std::domain_error("strip_units(0)");
    Int n = abs_int(g);
    if (is_local()) return pow_int(local_prime, valuation(n, local_prime));
    for (const auto& p : inverted)
        while (n % p == 0) n /= p;
    return n;
}

std::string Ring::describe() const {
    std::ostringstream os;
    if (is_local()) {
        os << "Z_(" << local_prime << ")";
    } else if (inverted.empty()) {
        os << "Z";
    } else {
        os << "Z[";
        for (size_t i = 0; i < inverted.size(); ++i)
            os << (i ? ",1/" : "1/") << inverted[i];
        os << "]";
    }
    return os.str();
}

}  // namespace tlab
