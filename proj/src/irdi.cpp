#include <algorithm>
#include <boost/functional/hash.hpp>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "lcarand/errors.hpp"
#include "lcarand/measures.hpp"
#include "lcarand/parallel.hpp"

namespace lcarand {

namespace {

inline bool bit(u64 x, unsigned i) { return i < 64 && ((x >> i) & 1u); }
inline u64 low(u64 x, unsigned i) { return i >= 64 ? x : (x & ((u64{1} << i) - 1)); }
inline u64 mask_bits(unsigned n) { return n >= 64 ? ~u64{0} : ((u64{1} << n) - 1); }

std::vector<double> alpha_powers(double alpha, unsigned n) {
    std::vector<double> a(n + 1);
    a[0] = 1.0;
    for (unsigned i = 1; i <= n; ++i) a[i] = a[i - 1] * alpha;
    return a;
}

// Sites moved to start at 0, reduced mod 2^n, equal positions cancelled.
std::vector<u64> normalise_sites(const std::vector<i64>& sites, unsigned n) {
    if (sites.empty()) return {};
    i64 lo = *std::min_element(sites.begin(), sites.end());
    std::vector<u64> xs;
    xs.reserve(sites.size());
    for (i64 x : sites) xs.push_back(low(static_cast<u64>(x - lo), n));
    std::sort(xs.begin(), xs.end());
    std::vector<u64> out;
    for (std::size_t i = 0; i < xs.size();) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        if ((j - i) % 2) out.push_back(xs[i]);
        i = j;
    }
    return out;
}

}  // namespace

std::vector<IrdiTerm> irdi_site_terms(u64 M, unsigned levels) {
    std::vector<IrdiTerm> t;
    for (unsigned i = 0; i < std::min(levels, 64u); ++i)
        if (bit(M, i)) t.push_back({i, low(M, i)});
    return t;
}

double irdi_truncation_bound(double alpha, u64 span, unsigned nmax) {
    return 2.0 * static_cast<double>(span) * std::pow(alpha, nmax) / (1.0 - alpha);
}

unsigned suggest_nmax(double alpha, u64 span, double tol) {
    if (tol <= 0) throw std::invalid_argument("tolerance must be positive");
    unsigned n = 1;
    while (irdi_truncation_bound(alpha, span, n) > tol) {
        if (++n > 100000) throw ResourceError("no practical nmax reaches the tolerance");
    }
    return n;
}

double irdi_parity_fixed_offset(const IrdiMeasure& m, const std::vector<i64>& sites, u64 k) {
    std::vector<IrdiTerm> all;
    for (i64 x : sites) {
        u64 M = low(k + static_cast<u64>(x), m.nmax);
        auto t = irdi_site_terms(M, m.nmax);
        all.insert(all.end(), t.begin(), t.end());
    }
    std::sort(all.begin(), all.end());
    double r = 1.0;
    for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j] == all[i]) ++j;
        if ((j - i) % 2) r *= 1.0 - 2.0 * std::pow(m.alpha, all[i].level);
        i = j;
    }
    return r;
}

double irdi_parity_average_bruteforce(double alpha, const std::vector<i64>& sites, unsigned n) {
    if (n > 24) throw ResourceError("brute-force offset average limited to n <= 24");
    IrdiMeasure m{alpha, n};
    double t = 0.0;
    for (u64 k = 0; k < (u64{1} << n); ++k) t += irdi_parity_fixed_offset(m, sites, k);
    return t / static_cast<double>(u64{1} << n);
}

double irdi_parity_average(double alpha, const std::vector<i64>& sites, unsigned n) {
    const std::vector<u64> xs = normalise_sites(sites, n);
    if (xs.empty()) return 1.0;
    const std::size_t K = xs.size();
    const std::size_t W = (K + 63) / 64;
    const std::vector<double> a = alpha_powers(alpha, n);
    unsigned B = 0;  // above bit B every x is 0 and classes are singletons
    while (B < 64 && (xs.back() >> B) != 0) ++B;

    using State = std::vector<u64>;
    std::unordered_map<State, double, boost::hash<State>> cur, next;
    cur.emplace(State(W, 0), 1.0);
    const unsigned phase1 = std::min(n, B);
    std::vector<std::size_t> order(K);
    for (unsigned i = 0; i < phase1; ++i) {
        const double beta = 1.0 - 2.0 * a[i];
        // classes of x mod 2^i share their carry and their r^i variable
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) { return low(xs[u], i) < low(xs[v], i); });
        struct Cls {
            std::size_t rep;
            unsigned odd0, odd1;
        };
        std::vector<Cls> cls;
        for (std::size_t t = 0; t < K;) {
            std::size_t e = t;
            unsigned c0 = 0, c1 = 0;
            while (e < K && low(xs[order[e]], i) == low(xs[order[t]], i)) {
                (bit(xs[order[e]], i) ? c1 : c0) ^= 1u;
                ++e;
            }
            cls.push_back({order[t], c0, c1});
            t = e;
        }
        State xi(W, 0);
        for (std::size_t t = 0; t < K; ++t)
            if (bit(xs[t], i)) xi[t / 64] |= u64{1} << (t % 64);
        next.clear();
        for (const auto& [c, w] : cur) {
            for (unsigned kb = 0; kb < 2; ++kb) {
                unsigned count = 0;
                for (const auto& q : cls) {
                    unsigned cq = (c[q.rep / 64] >> (q.rep % 64)) & 1u;
                    count += (cq ^ kb) ? q.odd0 : q.odd1;
                }
                State nc(W);
                for (std::size_t t = 0; t < W; ++t) nc[t] = kb ? (xi[t] | c[t]) : (xi[t] & c[t]);
                next[nc] += 0.5 * w * std::pow(beta, static_cast<double>(count));
            }
        }
        cur.swap(next);
    }
    if (phase1 == n) {
        double total = 0.0;
        for (const auto& kv : cur) total += kv.second;
        return total;
    }
    // Only the number of pending carries matters from here on.
    std::vector<double> Wm(K + 1, 0.0), Wn(K + 1);
    for (const auto& [c, w] : cur) {
        std::size_t pc = 0;
        for (u64 word : c) pc += static_cast<std::size_t>(__builtin_popcountll(word));
        Wm[pc] += w;
    }
    for (unsigned i = phase1; i < n; ++i) {
        const double beta = 1.0 - 2.0 * a[i];
        std::fill(Wn.begin(), Wn.end(), 0.0);
        for (std::size_t mm = 0; mm <= K; ++mm) {
            if (Wm[mm] == 0.0) continue;
            Wn[0] += 0.5 * Wm[mm] * std::pow(beta, static_cast<double>(mm));
            Wn[mm] += 0.5 * Wm[mm] * std::pow(beta, static_cast<double>(K - mm));
        }
        Wm.swap(Wn);
    }
    double total = 0.0;
    for (double w : Wm) total += w;
    return total;
}

double parity_fold(double alpha, const std::vector<unsigned>& levels) {
    double P = 0.0;
    for (unsigned l : levels) {
        double q = std::pow(alpha, l);
        P = (1.0 - q) * P + q * (1.0 - P);
    }
    return P;
}

namespace {

double increment_from_terms(double alpha, u64 M, u64 Mt, unsigned levels) {
    auto t1 = irdi_site_terms(M, levels), t2 = irdi_site_terms(Mt, levels);
    std::vector<IrdiTerm> diff;
    std::set_symmetric_difference(t1.begin(), t1.end(), t2.begin(), t2.end(), std::back_inserter(diff));
    std::vector<unsigned> lv;
    for (const auto& t : diff) lv.push_back(t.level);
    std::sort(lv.rbegin(), lv.rend());  // fold from the top level down
    return parity_fold(alpha, lv);
}

}  // namespace

double irdi_increment_prob(const IrdiMeasure& m, unsigned N, u64 mm, u64 k) {
    if (N >= 63) throw std::invalid_argument("increment level N must be < 63");
    if (mm >= (u64{1} << N) && !(N == 0 && mm == 0)) throw std::invalid_argument("m must lie in [0, 2^N)");
    u64 M = k + mm;
    if (M < k || M > ~u64{0} - (u64{1} << N)) throw std::overflow_error("k + m + 2^N overflows 64 bits");
    return increment_from_terms(m.alpha, M, M + (u64{1} << N), 64);
}

double irdi_increment_prob_truncated(const IrdiMeasure& m, unsigned N, u64 mm, u64 k) {
    if (N >= m.nmax) throw std::invalid_argument("increment level N must be < nmax");
    const u64 msk = mask_bits(m.nmax);
    u64 M = (k + mm) & msk;
    return increment_from_terms(m.alpha, M, (M + (u64{1} << N)) & msk, m.nmax);
}

double binary_entropy(double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;
    return -q * std::log2(q) - (1.0 - q) * std::log2(1.0 - q);
}

std::vector<IrdiEntropyRow> irdi_entropy_profile(const IrdiMeasure& m, unsigned N_levels, bool parallel) {
    validate(MeasureModel{m});
    const unsigned nmax = m.nmax;
    if (nmax > 30) throw ResourceError("entropy profile enumerates 2^nmax offsets; nmax must be <= 30");
    if (N_levels >= nmax) throw std::invalid_argument("N_levels must be below nmax");
    const std::vector<double> a = alpha_powers(m.alpha, nmax);
    const u64 msk = mask_bits(nmax);
    // H(a_1) averaged over the offset
    double H0 = ordered_sum(u64{1} << nmax, [&](u64 M) {
        double P = 0.0;
        for (unsigned i = 0; i < nmax; ++i)
            if (bit(M, i)) P = (1.0 - a[i]) * P + a[i] * (1.0 - P);
        return binary_entropy(P);
    }, parallel) / static_cast<double>(u64{1} << nmax);

    // delta^n_m(k) depends only on Q = floor((k+m)/2^n), uniform over [0, 2^{nmax-n})
    std::vector<IrdiEntropyRow> rows;
    rows.push_back({0, H0, 0.0});
    double acc = H0;
    for (unsigned n = 0; n < N_levels; ++n) {
        const u64 count = u64{1} << (nmax - n);
        double S = ordered_sum(count, [&](u64 Q) {
            u64 M = Q << n, Mt = (M + (u64{1} << n)) & msk;
            double P = 0.0;
            for (unsigned i = nmax; i-- > n;) {
                unsigned c = (bit(M, i) ? 1u : 0u) + (bit(Mt, i) ? 1u : 0u);
                for (unsigned t = 0; t < c; ++t) P = (1.0 - a[i]) * P + a[i] * (1.0 - P);
            }
            return binary_entropy(P);
        }, parallel) / static_cast<double>(count);
        acc += std::ldexp(S, static_cast<int>(n));
        const unsigned N = n + 1;
        rows.push_back({N, std::ldexp(acc, -static_cast<int>(N)), N * std::pow(m.alpha, N)});
    }
    return rows;
}

}  // namespace lcarand
