#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <utility>
#include <vector>

namespace tlab {

using Int = boost::multiprecision::cpp_int;

// floor division / remainder (remainder has the sign of b, in [0,|b|) for b>0)
Int fdiv(const Int& a, const Int& b);
Int fmod(const Int& a, const Int& b);

// g = gcd(a,b) >= 0 with g = x*a + y*b
Int xgcd(const Int& a, const Int& b, Int& x, Int& y);

Int gcd(const Int& a, const Int& b);
Int abs_int(const Int& a);
Int pow_int(const Int& base, unsigned long exp);

bool is_probable_prime(const Int& n);

// prime factorization of n > 0, sorted by prime
std::vector<std::pair<Int, int>> factorize(Int n);

// largest power of p dividing n (n != 0)
int valuation(Int n, const Int& p);

}  // namespace tlab
