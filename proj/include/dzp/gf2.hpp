#pragma once

// Dense GF(2) vectors and incremental column-echelon spans. This is the
// shared linear-algebra kernel behind Betti numbers, homology bases and
// the zigzag interval computation.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace dzp {

class Gf2Vec {
public:
    Gf2Vec() = default;
    explicit Gf2Vec(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

    std::size_t size() const { return bits_; }

    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    Gf2Vec& operator^=(const Gf2Vec& o) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
        return *this;
    }

    bool any() const {
        for (auto w : words_)
            if (w) return true;
        return false;
    }

    // Index of the lowest set bit; -1 when zero.
    int pivot() const {
        for (std::size_t w = 0; w < words_.size(); ++w)
            if (words_[w]) return static_cast<int>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(words_[w])));
        return -1;
    }

    std::vector<std::size_t> set_bits() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < bits_; ++i)
            if (test(i)) out.push_back(i);
        return out;
    }

private:
    std::size_t bits_ = 0;
    std::vector<std::uint64_t> words_;
};

// Columns kept keyed by pivot, each with an augmentation vector recording
// the combination of inserted columns it represents.
class Gf2Span {
public:
    // Reduces (v, aug) in place against the span. After the call v is the
    // residual and aug the accumulated combination.
    void reduce(Gf2Vec& v, Gf2Vec& aug) const {
        int p;
        while ((p = v.pivot()) != -1) {
            auto it = cols_.find(p);
            if (it == cols_.end()) break;
            v ^= it->second.first;
            if (aug.size() > 0) aug ^= it->second.second;
        }
    }

    void reduce(Gf2Vec& v) const {
        Gf2Vec no_aug;
        reduce(v, no_aug);
    }

    // Returns true when the column was independent (rank grew).
    bool insert(Gf2Vec v, Gf2Vec aug = Gf2Vec()) {
        reduce(v, aug);
        int p = v.pivot();
        if (p == -1) return false;
        cols_.emplace(p, std::make_pair(std::move(v), std::move(aug)));
        return true;
    }

    // Like insert, but hands back the reduced column/augmentation of a
    // dependent input (used to harvest null-space combinations).
    bool insert_or_remainder(Gf2Vec v, Gf2Vec aug, Gf2Vec& aug_out) {
        reduce(v, aug);
        const int p = v.pivot();
        if (p == -1) {
            aug_out = std::move(aug);
            return false;
        }
        cols_.emplace(p, std::make_pair(std::move(v), std::move(aug)));
        return true;
    }

    std::size_t rank() const { return cols_.size(); }

private:
    std::map<int, std::pair<Gf2Vec, Gf2Vec>> cols_;
};

// Rank of the matrix whose columns are given.
inline std::size_t gf2_rank(const std::vector<Gf2Vec>& columns) {
    Gf2Span span;
    for (const auto& c : columns) span.insert(c);
    return span.rank();
}

// Basis of {x : sum_i x_i * columns[i] = 0}, each vector of width columns.size().
inline std::vector<Gf2Vec> gf2_nullspace(const std::vector<Gf2Vec>& columns) {
    Gf2Span span;
    std::vector<Gf2Vec> basis;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        Gf2Vec aug(columns.size());
        aug.set(i);
        Gf2Vec combo;
        if (!span.insert_or_remainder(columns[i], std::move(aug), combo)) basis.push_back(std::move(combo));
    }
    return basis;
}

}  // namespace dzp
