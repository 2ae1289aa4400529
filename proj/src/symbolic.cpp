#include "forcekit/symbolic.hpp"

#include "forcekit/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>

namespace forcekit::symbolic {

namespace {

using Matrix = std::vector<BigInt>;

Matrix multiply(const Matrix& a, const Matrix& b, std::size_t q) {
    Matrix c(q * q, 0);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t k = 0; k < q; ++k) {
            if (a[i * q + k] == 0) continue;
            for (std::size_t j = 0; j < q; ++j) c[i * q + j] += a[i * q + k] * b[k * q + j];
        }
    return c;
}

// Order of states by label, used for canonical rotations.
std::vector<std::size_t> label_rank(const TransitionMatrix& a) {
    std::vector<std::size_t> order(a.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a.labels()[x] < a.labels()[y]; });
    std::vector<std::size_t> rank(a.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
}

// Tarjan's strongly connected components; returns component id per state.
std::vector<int> strongly_connected(const TransitionMatrix& a, int& count) {
    const std::size_t q = a.size();
    std::vector<int> index(q, -1), low(q, 0), comp(q, -1);
    std::vector<bool> on_stack(q, false);
    std::vector<std::size_t> stack;
    int next = 0;
    count = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = next++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w = 0; w < q; ++w) {
            if (!a.edge(v, w)) continue;
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = count;
            } while (w != v);
            ++count;
        }
    };
    for (std::size_t v = 0; v < q; ++v)
        if (index[v] < 0) visit(v);
    return comp;
}

// Perron root of an irreducible block via Collatz-Wielandt bounds on B = A + I.
// B is primitive, so the bounds squeeze geometrically.
double perron_root(const std::vector<double>& block, std::size_t n) {
    std::vector<double> x(n, 1.0), y(n);
    double lo = 0, hi = 0;
    for (int iter = 0; iter < 1'000'000; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x[i];
            for (std::size_t j = 0; j < n; ++j) s += block[i * n + j] * x[j];
            y[i] = s;
        }
        lo = std::numeric_limits<double>::infinity();
        hi = 0;
        double top = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            top = std::max(top, y[i]);
        }
        if (hi - lo <= 1e-13 * hi) break;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / top;
    }
    return 0.5 * (lo + hi) - 1.0;
}

// Polynomials with rational coefficients, low degree first.
using Poly = std::vector<Rational>;

void normalize(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly derivative(const Poly& p) {
    Poly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<long>(i)));
    normalize(d);
    return d;
}

Poly remainder(Poly a, const Poly& b) {
    normalize(a);
    while (a.size() >= b.size() && !a.empty()) {
        const Rational factor = a.back() / b.back();
        const std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= factor * b[i];
        a.pop_back();
        normalize(a);
    }
    return a;
}

Poly quotient(Poly a, const Poly& b) {
    normalize(a);
    if (a.size() < b.size()) return {};
    Poly q(a.size() - b.size() + 1, Rational(0));
    while (a.size() >= b.size() && !a.empty()) {
        const Rational factor = a.back() / b.back();
        const std::size_t shift = a.size() - b.size();
        q[shift] = factor;
        for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= factor * b[i];
        a.pop_back();
        normalize(a);
    }
    return q;
}

Poly gcd(Poly a, Poly b) {
    normalize(a);
    normalize(b);
    while (!b.empty()) {
        Poly r = remainder(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

int sign_at(const Poly& p, const Rational& x) {
    Rational v = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

int sign_changes(const std::vector<Poly>& chain, const Rational& x) {
    int changes = 0, last = 0;
    for (const Poly& p : chain) {
        const int s = sign_at(p, x);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

int sign_changes_at_infinity(const std::vector<Poly>& chain) {
    int changes = 0, last = 0;
    for (const Poly& p : chain) {
        const int s = p.back() > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

}  // namespace

TransitionMatrix::TransitionMatrix(std::vector<std::vector<std::int64_t>> rows,
                                   std::vector<std::string> labels)
    : q_(rows.size()), labels_(std::move(labels)) {
    if (q_ == 0) throw InputError("transition matrix must have at least one state");
    entries_.reserve(q_ * q_);
    for (const auto& row : rows) {
        if (row.size() != q_) throw InputError("transition matrix must be square");
        for (const auto v : row) {
            if (v < 0) throw InputError("transition matrix entries must be non-negative");
            entries_.push_back(v);
        }
    }
    if (labels_.empty()) {
        for (std::size_t i = 0; i < q_; ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != q_) throw InputError("one label per state is required");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != q_) throw InputError("state labels must be unique");
    for (const auto& l : labels_)
        if (l.empty()) throw InputError("state labels must be non-empty");
}

TransitionMatrix TransitionMatrix::full_shift(std::size_t q) {
    return TransitionMatrix(std::vector<std::vector<std::int64_t>>(q, std::vector<std::int64_t>(q, 1)));
}

TransitionMatrix TransitionMatrix::identity(std::size_t q) {
    std::vector<std::vector<std::int64_t>> rows(q, std::vector<std::int64_t>(q, 0));
    for (std::size_t i = 0; i < q; ++i) rows[i][i] = 1;
    return TransitionMatrix(std::move(rows));
}

TransitionMatrix TransitionMatrix::fibonacci() {
    return TransitionMatrix({{1, 1}, {1, 0}}, {"1", "0"});
}

std::vector<std::vector<std::int64_t>> TransitionMatrix::rows() const {
    std::vector<std::vector<std::int64_t>> out(q_);
    for (std::size_t i = 0; i < q_; ++i)
        out[i].assign(entries_.begin() + static_cast<std::ptrdiff_t>(i * q_),
                      entries_.begin() + static_cast<std::ptrdiff_t>((i + 1) * q_));
    return out;
}

bool TransitionMatrix::dominated_by(const TransitionMatrix& other) const {
    if (other.q_ != q_) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i] > other.entries_[i]) return false;
    return true;
}

std::string Word::spell(const TransitionMatrix& a) const {
    std::string out;
    const bool compact = std::all_of(a.labels().begin(), a.labels().end(),
                                     [](const std::string& l) { return l.size() == 1; });
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (!compact && i > 0) out += ' ';
        out += a.labels().at(symbols[i]);
    }
    return out;
}

Word Word::parse(std::string_view text, const TransitionMatrix& a) {
    auto lookup = [&](std::string_view token) {
        const auto& labels = a.labels();
        const auto it = std::find(labels.begin(), labels.end(), token);
        if (it == labels.end())
            throw InputError("symbol '" + std::string(token) + "' is not a state of the matrix");
        return static_cast<std::size_t>(it - labels.begin());
    };
    Word w;
    const bool spaced = text.find_first_of(" \t,") != std::string_view::npos;
    if (spaced) {
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ','))
                ++i;
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != ',')
                ++j;
            if (j > i) w.symbols.push_back(lookup(text.substr(i, j - i)));
            i = j;
        }
    } else {
        for (std::size_t i = 0; i < text.size(); ++i) w.symbols.push_back(lookup(text.substr(i, 1)));
    }
    if (w.symbols.empty()) throw InputError("words must have length >= 1");
    return w;
}

CycleWord::CycleWord(Word w, const TransitionMatrix& a) {
    if (w.symbols.empty()) throw InputError("cycle words must have length >= 1");
    for (const auto s : w.symbols)
        if (s >= a.size()) throw InputError("symbol out of range");
    const auto rank = label_rank(a);
    const std::size_t n = w.symbols.size();
    std::size_t best = 0;
    for (std::size_t r = 1; r < n; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = rank[w.symbols[(r + i) % n]];
            const auto y = rank[w.symbols[(best + i) % n]];
            if (x != y) {
                if (x < y) best = r;
                break;
            }
        }
    }
    std::rotate(w.symbols.begin(), w.symbols.begin() + static_cast<std::ptrdiff_t>(best), w.symbols.end());
    word_ = std::move(w);
}

std::size_t CycleWord::minimal_period() const {
    const auto& s = word_.symbols;
    const std::size_t n = s.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        bool same = true;
        for (std::size_t i = 0; i < n && same; ++i) same = s[i] == s[(i + d) % n];
        if (same) return d;
    }
    return n;
}

bool is_admissible(const Word& w, const TransitionMatrix& a) {
    if (w.symbols.empty()) throw InputError("words must have length >= 1");
    for (const auto s : w.symbols)
        if (s >= a.size()) throw InputError("symbol " + std::to_string(s) + " out of range");
    for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i)
        if (!a.edge(w.symbols[i], w.symbols[i + 1])) return false;
    return true;
}

bool is_admissible_cycle(const Word& w, const TransitionMatrix& a) {
    return is_admissible(w, a) && a.edge(w.symbols.back(), w.symbols.front());
}

BigInt count_periodic_points(const TransitionMatrix& a, int p) {
    if (p < 1) throw InputError("period must be >= 1");
    const std::size_t q = a.size();
    Matrix base(q * q), result(q * q, 0);
    for (std::size_t i = 0; i < q; ++i) {
        result[i * q + i] = 1;
        for (std::size_t j = 0; j < q; ++j) base[i * q + j] = a(i, j);
    }
    for (unsigned e = static_cast<unsigned>(p); e != 0; e >>= 1) {
        if (e & 1U) result = multiply(result, base, q);
        if (e > 1) base = multiply(base, base, q);
    }
    BigInt trace = 0;
    for (std::size_t i = 0; i < q; ++i) trace += result[i * q + i];
    return trace;
}

double spectral_radius_power(const TransitionMatrix& a) {
    int count = 0;
    const auto comp = strongly_connected(a, count);
    double rho = 0;
    for (int c = 0; c < count; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (comp[i] == c) members.push_back(i);
        const std::size_t n = members.size();
        std::vector<double> block(n * n);
        bool has_cycle = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                block[i * n + j] = static_cast<double>(a(members[i], members[j]));
                if (block[i * n + j] > 0) has_cycle = true;
            }
        if (!has_cycle) continue;
        rho = std::max(rho, perron_root(block, n));
    }
    return rho;
}

std::vector<BigInt> characteristic_polynomial(const TransitionMatrix& a) {
    // Faddeev-LeVerrier; every division below is exact over the integers.
    const std::size_t n = a.size();
    Matrix am(n * n), m(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) am[i * n + j] = a(i, j);
    std::vector<BigInt> c(n + 1, 0);
    c[n] = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        Matrix next = multiply(am, m, n);
        for (std::size_t i = 0; i < n; ++i) next[i * n + i] += c[n - k + 1];
        m = std::move(next);
        const Matrix am_m = multiply(am, m, n);
        BigInt tr = 0;
        for (std::size_t i = 0; i < n; ++i) tr += am_m[i * n + i];
        c[n - k] = -tr / static_cast<long>(k);
    }
    return c;
}

double spectral_radius_charpoly(const TransitionMatrix& a) {
    if (a.size() > 8) throw LimitError("characteristic-polynomial cross-check is limited to q <= 8");
    const auto coeffs = characteristic_polynomial(a);
    Poly p;
    for (const auto& c : coeffs) p.emplace_back(c);
    normalize(p);
    const Poly g = gcd(p, derivative(p));
    Poly sf = quotient(p, g);
    std::vector<Poly> chain{sf, derivative(sf)};
    while (chain.back().size() > 1) {
        Poly r = remainder(chain[chain.size() - 2], chain.back());
        if (r.empty()) break;
        for (auto& v : r) v = -v;
        chain.push_back(std::move(r));
    }
    if (sf.size() == 1) return 0.0;  // constant: no roots
    Rational bound = 1;
    for (std::size_t i = 0; i + 1 < sf.size(); ++i) bound += abs(sf[i] / sf.back());
    const int at_inf = sign_changes_at_infinity(chain);
    // Roots in (x, inf) = V(x) - V(inf).
    Rational lo = -bound, hi = bound;
    for (int iter = 0; iter < 80; ++iter) {
        const Rational mid = (lo + hi) / 2;
        if (sign_changes(chain, mid) - at_inf >= 1)
            lo = mid;
        else
            hi = mid;
    }
    return to_double((lo + hi) / 2);
}

double topological_entropy(const TransitionMatrix& a) {
    bool positive = false;
    for (std::size_t i = 0; i < a.size() && !positive; ++i)
        for (std::size_t j = 0; j < a.size() && !positive; ++j) positive = a.edge(i, j);
    if (!positive) throw DomainError("entropy is undefined for the zero matrix");
    const double rho = spectral_radius_power(a);
    // A non-negative integer matrix has rho = 0 (nilpotent) or rho >= 1.
    if (rho < 0.5) return 0.0;
    return std::max(0.0, std::log(rho));
}

std::vector<CycleWord> periodic_words(const TransitionMatrix& a, int p) {
    if (p < 1) throw InputError("period must be >= 1");
    if (p > kMaxEnumerationPeriod)
        throw LimitError("periodic word enumeration is limited to p <= " +
                         std::to_string(kMaxEnumerationPeriod) + " (got " + std::to_string(p) + ")");
    // Fredricksen-Kessler-Maiorana necklace generation over states ordered by
    // label, pruned on inadmissible prefixes.
    const std::size_t q = a.size();
    std::vector<std::size_t> by_rank(q);
    {
        const auto rank = label_rank(a);
        for (std::size_t s = 0; s < q; ++s) by_rank[rank[s]] = s;
    }
    const auto n = static_cast<std::size_t>(p);
    std::vector<std::size_t> word(n + 1, 0);  // ranks, 1-based
    std::vector<CycleWord> out;
    auto edge = [&](std::size_t r1, std::size_t r2) { return a.edge(by_rank[r1], by_rank[r2]); };
    std::function<void(std::size_t, std::size_t)> gen = [&](std::size_t t, std::size_t period) {
        if (t > n) {
            if (n % period != 0) return;
            if (!edge(word[n], word[1])) return;
            Word w;
            for (std::size_t i = 1; i <= n; ++i) w.symbols.push_back(by_rank[word[i]]);
            out.emplace_back(std::move(w), a);
            return;
        }
        const std::size_t start = word[t - period];
        for (std::size_t j = (t == 1 ? 0 : start); j < q; ++j) {
            if (t > 1 && !edge(word[t - 1], j)) continue;
            word[t] = j;
            gen(t + 1, j == start && t > 1 ? period : t);
        }
    };
    gen(1, 1);
    return out;
}

}  // namespace forcekit::symbolic
