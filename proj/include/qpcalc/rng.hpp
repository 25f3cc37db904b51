#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpcalc/polynomial.hpp"

namespace qpcalc {

// Deterministic splitmix64 generator.  Used instead of <random> distributions
// so that reports are byte-identical across platforms and standard-library
// versions.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }

    // uniform in [lo, hi]
    long range(long lo, long hi) { return lo + (long)below((uint64_t)(hi - lo + 1)); }

    // nonzero rational with small numerator/denominator
    Rational small_rational() {
        long num = range(-4, 4);
        if (num == 0)
            num = 1;
        long den = range(1, 3);
        Rational q(num, den);
        q.canonicalize();
        return q;
    }

    // stable derived stream, e.g. one per check or per trial
    static uint64_t derive_seed(uint64_t base, const std::string& tag, uint64_t index = 0) {
        uint64_t h = 1469598103934665603ull ^ base;
        for (char c : tag) {
            h ^= (unsigned char)c;
            h *= 1099511628211ull;
        }
        h ^= index + 0x9E3779B97F4A7C15ull;
        h *= 1099511628211ull;
        return h;
    }

private:
    uint64_t state_;
};

// All monomials over the chart with exponents capped per coordinate (odd
// coordinates at 1, even at `even_cap`), bucketed by total degree.  Small
// charts only; used to sample random homogeneous polynomials.
class MonomialPool {
public:
    MonomialPool(ChartPtr chart, uint32_t even_cap = 2) : chart_(std::move(chart)) {
        Monomial current;
        enumerate(0, even_cap, current);
    }

    const std::vector<Monomial>& of_degree(int d) const {
        static const std::vector<Monomial> empty;
        auto it = buckets_.find(d);
        return it == buckets_.end() ? empty : it->second;
    }

    std::vector<int> degrees() const {
        std::vector<int> r;
        for (const auto& [d, v] : buckets_)
            r.push_back(d);
        return r;
    }

    // Random homogeneous polynomial of the given degree with up to
    // `max_terms` monomials; zero when no monomial of that degree exists.
    GradedPolynomial random_homogeneous(Rng& rng, int degree, int max_terms = 3) const {
        GradedPolynomial p = GradedPolynomial::zero(chart_);
        const auto& bucket = of_degree(degree);
        if (bucket.empty())
            return p;
        int n = 1 + (int)rng.below((uint64_t)max_terms);
        for (int i = 0; i < n; ++i)
            p.add_term(bucket[rng.below(bucket.size())], Scalar(rng.small_rational()));
        return p;
    }

private:
    void enumerate(size_t coord, uint32_t even_cap, Monomial& current) {
        if (coord == chart_->size()) {
            buckets_[current.degree(*chart_)].push_back(current);
            return;
        }
        enumerate(coord + 1, even_cap, current);
        uint32_t cap = chart_->coord((CoordId)coord).parity() == 1 ? 1 : even_cap;
        for (uint32_t e = 1; e <= cap; ++e) {
            current.coords.emplace_back((CoordId)coord, e);
            enumerate(coord + 1, even_cap, current);
            current.coords.pop_back();
        }
    }

    ChartPtr chart_;
    std::map<int, std::vector<Monomial>> buckets_;
};

// Random polynomial in the degree-0 coordinates with total degree <= max_deg.
inline GradedPolynomial random_body_polynomial(const ChartPtr& chart, Rng& rng, int max_deg,
                                               int max_terms = 3) {
    GradedPolynomial p = GradedPolynomial::zero(chart);
    const auto& xs = chart->degree0_ids();
    int n = 1 + (int)rng.below((uint64_t)max_terms);
    for (int t = 0; t < n; ++t) {
        Monomial m;
        int deg = (int)rng.below((uint64_t)(max_deg + 1));
        std::vector<uint32_t> exps(xs.size(), 0);
        for (int k = 0; k < deg && !xs.empty(); ++k)
            ++exps[rng.below(xs.size())];
        for (size_t i = 0; i < xs.size(); ++i)
            if (exps[i])
                m.coords.emplace_back(xs[i], exps[i]);
        std::sort(m.coords.begin(), m.coords.end());
        p.add_term(m, Scalar(rng.small_rational()));
    }
    return p;
}

} // namespace qpcalc
