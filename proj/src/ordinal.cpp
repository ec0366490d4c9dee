#include "tlab/ordinal.hpp"

#include <sstream>
#include <stdexcept>

namespace tlab {

Ordinal Ordinal::from_nat(const Int& n) {
    if (n < 0) throw std::invalid_argument("ordinal: negative natural");
    Ordinal o;
    if (n > 0) o.terms_.push_back({0, n});
    return o;
}

Ordinal Ordinal::omega() { return omega_pow(1); }

Ordinal Ordinal::omega_pow(int e) { return term(e, 1); }

Ordinal Ordinal::term(int e, const Int& c) {
    if (e < 0 || e >= exponent_cap) throw std::invalid_argument("ordinal: exponent out of range");
    if (c < 1) throw std::invalid_argument("ordinal: coefficient must be positive");
    Ordinal o;
    o.terms_.push_back({e, c});
    return o;
}

namespace {

// one CNF summand: decimal natural, or w[^E][*C]
std::pair<int, Int> parse_term(const std::string& t) {
    if (t.empty()) throw std::invalid_argument("ordinal: empty term");
    size_t pos = 0;
    auto read_nat = [&]() {
        if (pos >= t.size() || !isdigit((unsigned char)t[pos]))
            throw std::invalid_argument("ordinal: expected number in '" + t + "'");
        Int v = 0;
        while (pos < t.size() && isdigit((unsigned char)t[pos])) {
            v = v * 10 + (t[pos] - '0');
            ++pos;
        }
        return v;
    };
    if (t[0] != 'w') {
        Int c = read_nat();
        if (pos != t.size()) throw std::invalid_argument("ordinal: trailing junk in '" + t + "'");
        return {0, c};
    }
    pos = 1;
    Int e = 1;
    if (pos < t.size() && t[pos] == '^') {
        ++pos;
        e = read_nat();
    }
    Int c = 1;
    if (pos < t.size() && t[pos] == '*') {
        ++pos;
        c = read_nat();
    }
    if (pos != t.size()) throw std::invalid_argument("ordinal: trailing junk in '" + t + "'");
    if (e < 1 || e >= Ordinal::exponent_cap)
        throw std::invalid_argument("ordinal: exponent out of range in '" + t + "'");
    if (c < 1) throw std::invalid_argument("ordinal: zero coefficient in '" + t + "'");
    return {e.convert_to<int>(), c};
}

}  // namespace

Ordinal Ordinal::parse(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!isspace((unsigned char)c)) t += c;
    if (t == "0") return Ordinal();
    Ordinal o;
    size_t start = 0;
    int last_e = exponent_cap;
    while (start <= t.size()) {
        size_t plus = t.find('+', start);
        std::string piece = t.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
        auto [e, c] = parse_term(piece);
        if (e >= last_e) throw std::invalid_argument("ordinal: terms not strictly descending");
        if (e == 0 && c == 0) throw std::invalid_argument("ordinal: zero term");
        o.terms_.push_back({e, c});
        last_e = e;
        if (plus == std::string::npos) break;
        start = plus + 1;
    }
    return o;
}

std::string Ordinal::format() const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto& [e, c] : terms_) {
        if (!first) out << "+";
        first = false;
        if (e == 0) {
            out << c;
        } else {
            out << "w";
            if (e != 1) out << "^" << e;
            if (c != 1) out << "*" << c;
        }
    }
    return out.str();
}

std::optional<Int> Ordinal::finite() const {
    if (terms_.empty()) return Int(0);
    if (terms_.size() == 1 && terms_[0].first == 0) return terms_[0].second;
    return std::nullopt;
}

int Ordinal::cmp(const Ordinal& o) const {
    size_t n = std::min(terms_.size(), o.terms_.size());
    for (size_t i = 0; i < n; ++i) {
        if (terms_[i].first != o.terms_[i].first)
            return terms_[i].first < o.terms_[i].first ? -1 : 1;
        if (terms_[i].second != o.terms_[i].second)
            return terms_[i].second < o.terms_[i].second ? -1 : 1;
    }
    if (terms_.size() == o.terms_.size()) return 0;
    return terms_.size() < o.terms_.size() ? -1 : 1;
}

Ordinal Ordinal::operator+(const Ordinal& o) const {
    if (o.is_zero()) return *this;
    int lead = o.terms_[0].first;
    Ordinal r;
    for (auto& t : terms_)
        if (t.first > lead) r.terms_.push_back(t);
    // merge the boundary term, then copy the rest of o
    size_t j = 0;
    if (!terms_.empty()) {
        for (auto& t : terms_)
            if (t.first == lead) {
                r.terms_.push_back({lead, t.second + o.terms_[0].second});
                j = 1;
                break;
            }
    }
    for (; j < o.terms_.size(); ++j) r.terms_.push_back(o.terms_[j]);
    return r;
}

Ordinal Ordinal::successor() const { return *this + from_nat(1); }

Ordinal Ordinal::predecessor() const {
    if (!is_successor()) throw std::invalid_argument("ordinal: predecessor of non-successor");
    Ordinal r = *this;
    if (r.terms_.back().second == 1)
        r.terms_.pop_back();
    else
        r.terms_.back().second -= 1;
    return r;
}

Ordinal fundamental(const Ordinal& a, const Int& n) {
    if (!a.is_limit()) return a;
    auto terms = a.terms();
    auto [e, c] = terms.back();
    // beta + w^e with one unit of the last coefficient peeled off
    Ordinal beta;
    for (size_t i = 0; i + 1 < terms.size(); ++i) beta = beta + Ordinal::term(terms[i].first, terms[i].second);
    if (c > 1) beta = beta + Ordinal::term(e, c - 1);
    if (e >= 2) return beta + Ordinal::term(e - 1, n + 1) + Ordinal::from_nat(1);
    return beta + Ordinal::from_nat(n + 1);
}

}  // namespace tlab
