#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlab/int.hpp"

namespace tlab {

// Ordinals below w^10 in Cantor normal form: sum of w^e * c with exponents
// strictly decreasing and coefficients >= 1.  Empty term list is 0.
class Ordinal {
public:
    static constexpr int exponent_cap = 10;

    Ordinal() = default;

    static Ordinal zero() { return Ordinal(); }
    static Ordinal from_nat(const Int& n);
    static Ordinal omega();                 // w
    static Ordinal omega_pow(int e);        // w^e
    static Ordinal term(int e, const Int& c);

    // grammar: 0 | w^E*C (+ w^E*C)* (+ C)?   with w^1 written "w" and *1 omissible
    static Ordinal parse(const std::string& s);
    std::string format() const;

    bool is_zero() const { return terms_.empty(); }
    bool is_finite() const { return terms_.empty() || terms_.back().first == 0; }
    bool is_successor() const { return !terms_.empty() && terms_.back().first == 0; }
    bool is_limit() const { return !terms_.empty() && terms_.back().first >= 1; }

    // finite value, if the ordinal is finite
    std::optional<Int> finite() const;

    int cmp(const Ordinal& o) const;  // -1 / 0 / 1
    bool operator==(const Ordinal& o) const { return terms_ == o.terms_; }
    bool operator<(const Ordinal& o) const { return cmp(o) < 0; }
    bool operator<=(const Ordinal& o) const { return cmp(o) <= 0; }
    bool operator>(const Ordinal& o) const { return cmp(o) > 0; }
    bool operator>=(const Ordinal& o) const { return cmp(o) >= 0; }

    Ordinal operator+(const Ordinal& o) const;  // left CNF addition, absorbing
    Ordinal successor() const;
    Ordinal predecessor() const;  // requires successor ordinal

    const std::vector<std::pair<int, Int>>& terms() const { return terms_; }

private:
    std::vector<std::pair<int, Int>> terms_;  // (exponent, coefficient), descending
};

// Canonical fundamental-sequence policy ("fund-v1"): for a limit written
// beta + w^e (one coefficient unit peeled off the last term),
//   e >= 2: beta + w^{e-1}*(n+1) + 1,   e = 1: beta + (n+1);
// zero and successors are returned unchanged.  All outputs for limits are
// successor ordinals, strictly increasing in n and cofinal in the input.
Ordinal fundamental(const Ordinal& a, const Int& n);

inline const char* fundamental_rule_id() { return "fund-v1"; }

}  // namespace tlab
