#include "tlab/int.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace tlab {

Int fdiv(const Int& a, const Int& b) {
    if (b == 0) throw std::domain_error("fdiv by zero");
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

Int fmod(const Int& a, const Int& b) { return a - fdiv(a, b) * b; }

Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

Int gcd(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }

Int xgcd(const Int& a, const Int& b, Int& x, Int& y) {
    // iterative extended Euclid; result g >= 0
    Int old_r = a, r = b;
    Int old_s = 1, s = 0;
    Int old_t = 0, t = 1;
    while (r != 0) {
        Int q = old_r / r;
        Int tmp;
        tmp = old_r - q * r; old_r = r; r = tmp;
        tmp = old_s - q * s; old_s = s; s = tmp;
        tmp = old_t - q * t; old_t = t; t = tmp;
    }
    if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
    // canonicalize: shrink y modulo a/g so that a | b yields (x, y) = (+-1, 0);
    // downstream pivot elimination relies on this to make progress
    if (a != 0 && old_r != 0) {
        Int astep = a / old_r, bstep = b / old_r;
        Int k = old_t / astep;
        old_s += k * bstep;
        old_t -= k * astep;
    }
    x = old_s;
    y = old_t;
    return old_r;
}

Int pow_int(const Int& base, unsigned long exp) {
    Int r = 1, b = base;
    while (exp) {
        if (exp & 1) r *= b;
        b *= b;
        exp >>= 1;
    }
    return r;
}

namespace {

Int mulmod(const Int& a, const Int& b, const Int& m) { return a * b % m; }

Int powmod(Int base, Int exp, const Int& m) {
    Int r = 1;
    base %= m;
    while (exp > 0) {
        if ((exp & 1) != 0) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

bool miller_rabin(const Int& n, const Int& a) {
    if (n % a == 0) return n == a;
    Int d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    Int x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

Int pollard_rho(const Int& n) {
    // Brent's variant; n odd composite, not a prime power of small primes
    for (Int c = 1;; ++c) {
        Int x = 2, y = 2, d = 1;
        Int ys = y, q = 1;
        auto f = [&](const Int& v) { return (v * v + c) % n; };
        int m = 64;
        Int r = 1;
        while (d == 1) {
            x = y;
            for (Int i = 0; i < r; ++i) y = f(y);
            Int k = 0;
            while (k < r && d == 1) {
                ys = y;
                Int lim = r - k;
                if (lim > m) lim = m;
                for (Int i = 0; i < lim; ++i) {
                    y = f(y);
                    q = mulmod(q, abs_int(x - y), n);
                }
                d = gcd(q, n);
                k += lim;
            }
            r *= 2;
        }
        if (d == n) {
            // backtrack
            d = 1;
            while (d == 1) {
                ys = f(ys);
                d = gcd(abs_int(x - ys), n);
            }
        }
        if (d != n) return d;
    }
}

}  // namespace

bool is_probable_prime(const Int& n) {
    if (n < 2) return false;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    // deterministic for anything we will ever see in practice
    for (int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
        if (!miller_rabin(n, a)) return false;
    return true;
}

std::vector<std::pair<Int, int>> factorize(Int n) {
    if (n <= 0) throw std::domain_error("factorize: n must be positive");
    std::map<Int, int> fac;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}) {
        while (n % p == 0) { ++fac[p]; n /= p; }
    }
    std::vector<Int> stack;
    if (n > 1) stack.push_back(n);
    while (!stack.empty()) {
        Int m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (is_probable_prime(m)) {
            int e = 0;
            (void)e;
            ++fac[m];
            continue;
        }
        Int d = pollard_rho(m);
        stack.push_back(d);
        stack.push_back(m / d);
    }
    return {fac.begin(), fac.end()};
}

int valuation(Int n, const Int& p) {
    if (n == 0) throw std::domain_error("valuation of zero");
    n = abs_int(n);
    int v = 0;
    while (n % p == 0) { n /= p; ++v; }
    return v;
}

}  // namespace tlab
