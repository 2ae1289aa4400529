#pragma once

// Subshifts of finite type: admissible words, periodic points and entropy.

#include "forcekit/error.hpp"
#include "forcekit/rational.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace forcekit::symbolic {

// Square matrix of non-negative integers indexed by state. Each state carries
// a display label used to spell words ("0", "1", ... by default).
class TransitionMatrix {
public:
    TransitionMatrix() = default;
    explicit TransitionMatrix(std::vector<std::vector<std::int64_t>> rows,
                              std::vector<std::string> labels = {});

    static TransitionMatrix full_shift(std::size_t q);
    static TransitionMatrix identity(std::size_t q);
    // A = (1 1; 1 0) with states (I1, I0), i.e. labels {"1", "0"}: edges
    // I0 -> I1, I1 -> I0 and I1 -> I1.
    static TransitionMatrix fibonacci();

    std::size_t size() const { return q_; }
    std::int64_t operator()(std::size_t i, std::size_t j) const { return entries_[i * q_ + j]; }
    bool edge(std::size_t i, std::size_t j) const { return (*this)(i, j) > 0; }
    const std::vector<std::string>& labels() const { return labels_; }
    std::vector<std::vector<std::int64_t>> rows() const;

    // True when every entry of *this is <= the matching entry of other.
    bool dominated_by(const TransitionMatrix& other) const;

private:
    std::size_t q_ = 0;
    std::vector<std::int64_t> entries_;
    std::vector<std::string> labels_;
};

// Finite word over the state indices of a matrix.
struct Word {
    std::vector<std::size_t> symbols;

    // Spells the word with the matrix labels; labels are concatenated.
    std::string spell(const TransitionMatrix& a) const;
    // Parses a word. Single-character labels may be written back to back
    // ("011"); longer labels need whitespace separation.
    static Word parse(std::string_view text, const TransitionMatrix& a);
    friend bool operator==(const Word&, const Word&) = default;
};

// A word read as a periodic bi-infinite sequence, stored as its
// lexicographically minimal rotation (compared on labels).
class CycleWord {
public:
    CycleWord(Word w, const TransitionMatrix& a);

    const Word& word() const { return word_; }
    std::size_t length() const { return word_.symbols.size(); }
    // Smallest d with the word equal to its rotation by d.
    std::size_t minimal_period() const;
    bool primitive() const { return minimal_period() == length(); }
    std::string spell(const TransitionMatrix& a) const { return word_.spell(a); }

    friend bool operator==(const CycleWord&, const CycleWord&) = default;

private:
    Word word_;
};

bool is_admissible(const Word& w, const TransitionMatrix& a);
// Admissible as a cycle: also checks the closing pair (last, first).
bool is_admissible_cycle(const Word& w, const TransitionMatrix& a);

// trace(A^p), exact.
BigInt count_periodic_points(const TransitionMatrix& a, int p);

// Natural log of the spectral radius, by power iteration (relative tolerance
// 1e-12) on each strongly connected component. Throws DomainError for the
// zero matrix.
double topological_entropy(const TransitionMatrix& a);

// Spectral radius by power iteration; exposed for the cross-check.
double spectral_radius_power(const TransitionMatrix& a);
// Spectral radius as the largest real root of the exact characteristic
// polynomial, isolated with Sturm sequences and bisection. q <= 8.
double spectral_radius_charpoly(const TransitionMatrix& a);
// Exact characteristic polynomial det(xI - A), coefficients low to high.
std::vector<BigInt> characteristic_polynomial(const TransitionMatrix& a);

inline constexpr int kMaxEnumerationPeriod = 24;

// All admissible cycle words of length p, one per rotation class, sorted by
// spelling. Throws LimitError above kMaxEnumerationPeriod.
std::vector<CycleWord> periodic_words(const TransitionMatrix& a, int p);

}  // namespace forcekit::symbolic
