#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "lcarand/errors.hpp"
#include "lcarand/measures.hpp"
#include "lcarand/parallel.hpp"
#include "lcarand/rng.hpp"

namespace lcarand {

LocalFreeness is_locally_free(const MarkovMeasure& m) {
    const Eigen::Index n = m.chain.Q.rows();
    Eigen::MatrixXi P = (m.chain.Q.array() > 0).cast<int>();
    Eigen::MatrixXi P2 = P * P;
    LocalFreeness r;
    Eigen::Index i, j;
    r.min_entry = P2.minCoeff(&i, &j);
    r.free = r.min_entry >= 2;
    r.a = static_cast<std::size_t>(i);
    r.b = static_cast<std::size_t>(j);
    (void)n;
    return r;
}

bool locally_free_bruteforce(const MarkovMeasure& m) {
    const std::size_t n = m.chain.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            std::size_t both = 0;
            for (std::size_t c = 0; c < n; ++c)
                if (m.chain.Q(a, c) > 0 && m.chain.Q(c, b) > 0) ++both;  // c in Fol(a) and Prec(b)
            if (both < 2) return false;
        }
    return true;
}

double mrf_harmonic_constant(const MarkovMeasure& m) {
    if (!is_locally_free(m).free) throw std::invalid_argument("mrf_harmonic_constant needs a locally free chain");
    const std::size_t n = m.chain.size();
    Alphabet A{m.p, m.s};
    double c = 0.0;
    for (std::size_t bl = 0; bl < n; ++bl) {
        if (m.chain.pi[bl] <= 0) continue;
        for (std::size_t br = 0; br < n; ++br) {
            std::vector<double> law(n);
            double z = 0.0;
            for (std::size_t a = 0; a < n; ++a) z += law[a] = m.chain.Q(bl, a) * m.chain.Q(a, br);
            if (z <= 0) continue;
            for (std::uint32_t u = 1; u < n; ++u) {
                FreqVec uv = A.decode(u);
                std::complex<double> e{0.0, 0.0};
                for (std::size_t a = 0; a < n; ++a) {
                    FreqVec x = A.decode(static_cast<std::uint32_t>(a));
                    u64 t = 0;
                    for (unsigned k = 0; k < m.s; ++k) t += (u64)uv[k] * x[k];
                    e += law[a] / z * root_of_unity(m.p, t % m.p);
                }
                c = std::max(c, std::abs(e));
            }
        }
    }
    return c;
}

namespace {

void for_each_word(std::size_t A, unsigned len, const std::function<void(const std::vector<std::uint32_t>&)>& fn) {
    std::vector<std::uint32_t> w(len, 0);
    while (true) {
        fn(w);
        unsigned i = 0;
        while (i < len && ++w[i] == A) w[i++] = 0;
        if (i == len) return;
    }
}

}  // namespace

bool markov_word_test(const MeasureModel& m, const std::vector<std::uint32_t>& v, unsigned k, double tol) {
    if (k < 1) throw std::invalid_argument("context length must be >= 1");
    std::optional<TransferChain> tc;
    if (auto* mk = std::get_if<MarkovMeasure>(&m)) tc.emplace(TransferChain::from(*mk));
    if (auto* q = std::get_if<QuasiMarkovMeasure>(&m)) tc.emplace(TransferChain::from(*q));
    if (!tc) throw std::invalid_argument("Markov-word test needs a Markov or quasi-Markov model");
    const std::size_t A = tc->alphabet().size();
    if (std::pow(static_cast<double>(A), k) > 1e4) throw ResourceError("too many context words");
    const double pv = tc->word_probability(v);
    if (pv <= 0) throw std::invalid_argument("word v has probability zero");
    auto cat = [](std::vector<std::uint32_t> a, const std::vector<std::uint32_t>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    for (unsigned lu = 1; lu <= k; ++lu) {
        bool ok = true;
        for_each_word(A, lu, [&](const std::vector<std::uint32_t>& u) {
            if (!ok) return;
            const auto uv = cat(u, v);
            const double puv = tc->word_probability(uv);
            for (unsigned lw = 1; lw <= k && ok; ++lw)
                for_each_word(A, lw, [&](const std::vector<std::uint32_t>& w) {
                    if (!ok) return;
                    double lhs = tc->word_probability(cat(uv, w)) * pv;
                    double rhs = puv * tc->word_probability(cat(v, w));
                    if (std::abs(lhs - rhs) > tol * pv * pv) ok = false;
                });
        });
        if (!ok) return false;
    }
    return true;
}

std::uint64_t character_scan_size(std::size_t alphabet, unsigned rank_max, unsigned span_max) {
    // sum_K C(span-1, K-1) (|A|-1)^K
    long double total = 0, binom = 1;
    for (unsigned K = 1; K <= rank_max && K <= span_max; ++K) {
        if (K > 1) binom = binom * (span_max - K + 1) / (K - 1);
        total += binom * std::pow(static_cast<long double>(alphabet - 1), K);
    }
    return total > 1.8e19L ? ~std::uint64_t{0} : static_cast<std::uint64_t>(total + 0.5L);
}

std::vector<RankScanRow> scan_by_rank(const ExactBackend& backend, u64 p, unsigned s, unsigned rank_max,
                                      unsigned span_max, bool parallel) {
    if (span_max < 1 || span_max > 26) throw std::invalid_argument("exhaustive scan needs 1 <= span_max <= 26");
    if (rank_max < 1) throw std::invalid_argument("rank_max must be >= 1");
    const Alphabet A{p, s};
    const std::size_t nA = A.size();
    const auto nmask = static_cast<std::int64_t>(std::uint64_t{1} << (span_max - 1));
    struct Best {
        double v = -1;
        std::int64_t mask = 0;
        std::uint64_t combo = 0;
        std::uint64_t count = 0;
    };
    auto better = [](const Best& a, const Best& b) {  // deterministic tie-break
        if (a.v != b.v) return a.v > b.v;
        if (a.mask != b.mask) return a.mask < b.mask;
        return a.combo < b.combo;
    };
    auto build = [&](std::int64_t mask, std::uint64_t combo) {
        Character chi(p, s);
        std::vector<i64> sites{0};
        for (unsigned b = 0; b + 1 < span_max; ++b)
            if (mask >> b & 1) sites.push_back(b + 1);
        for (i64 k : sites) {
            chi.set(k, A.decode(static_cast<std::uint32_t>(combo % (nA - 1) + 1)));
            combo /= (nA - 1);
        }
        return chi;
    };
    std::vector<Best> global(rank_max + 1);
    ErrorSlot err;
#pragma omp parallel if (parallel)
    {
        std::vector<Best> local(rank_max + 1);
#pragma omp for schedule(dynamic, 64)
        for (std::int64_t mask = 0; mask < nmask; ++mask) err.guard([&] {
            const unsigned K = static_cast<unsigned>(__builtin_popcountll(mask)) + 1;
            if (K > rank_max) return;
            std::uint64_t combos = 1;
            for (unsigned i = 0; i < K; ++i) combos *= (nA - 1);
            for (std::uint64_t c = 0; c < combos; ++c) {
                Best cand{std::abs(backend.expectation(build(mask, c)).value), mask, c, 0};
                local[K].count++;
                if (better(cand, local[K])) {
                    cand.count = local[K].count;
                    local[K] = cand;
                }
            }
        });
#pragma omp critical
        for (unsigned K = 1; K <= rank_max; ++K) {
            std::uint64_t cnt = global[K].count + local[K].count;
            if (local[K].v >= 0 && better(local[K], global[K])) global[K] = local[K];
            global[K].count = cnt;
        }
    }
    err.rethrow();
    std::vector<RankScanRow> rows;
    for (unsigned K = 1; K <= rank_max && K <= span_max; ++K)
        rows.push_back({K, global[K].v, build(global[K].mask, global[K].combo), global[K].count});
    return rows;
}

HbEstimate harmonic_bound_estimate(const MeasureModel& m, unsigned rank_max, unsigned span_max,
                                   std::uint64_t random_budget, std::uint64_t seed, bool parallel) {
    ExactBackend backend(m);
    const u64 p = model_p(m);
    const unsigned s = model_s(m);
    const std::size_t nA = Alphabet{p, s}.size();
    const std::uint64_t total = character_scan_size(nA, rank_max, span_max);
    HbEstimate est;
    if (span_max <= 26 && total <= 5000000) {
        for (const auto& row : scan_by_rank(backend, p, s, rank_max, span_max, parallel)) {
            est.scanned += row.count;
            if (row.max_abs > est.sup) {
                est.sup = row.max_abs;
                est.argmax = row.argmax;
            }
        }
        return est;
    }
    // randomized scan: uniform rank, uniform site subset containing 0, uniform nonzero frequencies
    est.exhaustive = false;
    std::vector<double> vals(random_budget);
    std::vector<Character> chis(random_budget);
    const auto nb = static_cast<std::int64_t>((random_budget + kSampleBlock - 1) / kSampleBlock);
    ErrorSlot err;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::int64_t b = 0; b < nb; ++b) err.guard([&] {
        auto eng = make_engine(seed, 0x4842, static_cast<std::uint64_t>(b));
        for (std::uint64_t i = b * kSampleBlock; i < std::min<std::uint64_t>(random_budget, (b + 1) * kSampleBlock); ++i) {
            unsigned K = 1 + static_cast<unsigned>(eng() % std::min(rank_max, span_max));
            std::vector<i64> pool(span_max - 1);
            std::iota(pool.begin(), pool.end(), 1);
            std::shuffle(pool.begin(), pool.end(), eng);
            Character chi(p, s);
            chi.set(0, Alphabet{p, s}.decode(static_cast<std::uint32_t>(1 + eng() % (nA - 1))));
            for (unsigned t = 0; t + 1 < K; ++t)
                chi.set(pool[t], Alphabet{p, s}.decode(static_cast<std::uint32_t>(1 + eng() % (nA - 1))));
            vals[i] = std::abs(backend.expectation(chi).value);
            chis[i] = std::move(chi);
        }
    });
    err.rethrow();
    auto it = std::max_element(vals.begin(), vals.end());
    est.sup = *it;
    est.argmax = chis[it - vals.begin()];
    est.scanned = random_budget;
    est.coverage = std::min(1.0, static_cast<double>(random_budget) / static_cast<double>(total));
    return est;
}

double entropy_rate(const MarkovMeasure& m) {
    double h = 0.0;
    for (std::size_t i = 0; i < m.chain.size(); ++i)
        for (std::size_t j = 0; j < m.chain.size(); ++j) {
            double q = m.chain.Q(i, j);
            if (q > 0) h -= m.chain.pi[i] * q * std::log2(q);
        }
    return h;
}

double block_entropy(const MeasureModel& m, unsigned N) {
    if (N == 0) return 0.0;
    auto H = [](const std::vector<double>& w) {
        double h = 0;
        for (double x : w)
            if (x > 0) h -= x * std::log2(x);
        return h;
    };
    if (auto* b = std::get_if<BernoulliMeasure>(&m)) return N * H(b->weights);
    if (auto* mk = std::get_if<MarkovMeasure>(&m)) return H(mk->chain.pi) + (N - 1) * entropy_rate(*mk);
    if (auto* q = std::get_if<QuasiMarkovMeasure>(&m)) {
        TransferChain tc = TransferChain::from(*q);
        const std::size_t A = tc.alphabet().size();
        if (std::pow(static_cast<double>(A), N) > (1 << 22)) throw ResourceError("block too long for word enumeration");
        double h = 0;
        for_each_word(A, N, [&](const std::vector<std::uint32_t>& w) {
            double pr = tc.word_probability(w);
            if (pr > 0) h -= pr * std::log2(pr);
        });
        return h;
    }
    throw std::invalid_argument("IRDI block entropy is reported through irdi_entropy_profile");
}

}  // namespace lcarand
