#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "lcarand/measures.hpp"

namespace lcarand {

namespace {

std::vector<double> cumulative(const double* w, std::size_t n) {
    std::vector<double> c(n);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) c[i] = (t += w[i]);
    for (auto& x : c) x /= t;
    c.back() = 1.0;
    return c;
}

double uniform01(std::mt19937_64& eng) { return std::uniform_real_distribution<double>(0.0, 1.0)(eng); }

}  // namespace

std::uint32_t Sampler::Cdf::draw(std::mt19937_64& eng) const {
    double u = uniform01(eng);
    auto it = std::upper_bound(c.begin(), c.end(), u);
    if (it == c.end()) --it;
    return static_cast<std::uint32_t>(it - c.begin());
}

Sampler::Sampler(const MeasureModel& m) : model_(m) {
    validate(m);
    alphabet_ = Alphabet{model_p(m), model_s(m)};
    const std::size_t A = alphabet_.size();
    symbols_.resize(A);
    for (std::size_t a = 0; a < A; ++a) symbols_[a] = alphabet_.decode(static_cast<std::uint32_t>(a));
    auto load_chain = [this](const FiniteChain& c) {
        initial_.c = cumulative(c.pi.data(), c.pi.size());
        rows_.clear();
        for (Eigen::Index i = 0; i < c.Q.rows(); ++i) {
            std::vector<double> r(c.Q.cols());
            for (Eigen::Index j = 0; j < c.Q.cols(); ++j) r[j] = c.Q(i, j);
            rows_.push_back({cumulative(r.data(), r.size())});
        }
    };
    if (auto* b = std::get_if<BernoulliMeasure>(&m)) initial_.c = cumulative(b->weights.data(), b->weights.size());
    if (auto* mk = std::get_if<MarkovMeasure>(&m)) load_chain(mk->chain);
    if (auto* q = std::get_if<QuasiMarkovMeasure>(&m)) load_chain(q->hidden);
    if (auto* ir = std::get_if<IrdiMeasure>(&m))
        if (ir->nmax > 63) throw std::invalid_argument("IRDI sampling needs nmax <= 63");
}

Window Sampler::draw(i64 a, i64 b, std::mt19937_64& eng) const {
    if (b <= a) throw std::invalid_argument("sample range must be non-empty");
    const std::size_t len = static_cast<std::size_t>(b - a);
    const unsigned s = alphabet_.s;
    Window w;
    w.offset = a;
    w.s = s;
    w.data.resize(len * s);
    auto put = [&](std::size_t i, std::uint32_t sym) {
        std::copy(symbols_[sym].begin(), symbols_[sym].end(), w.data.begin() + i * s);
    };
    switch (model_.index()) {
        case 0:
            for (std::size_t i = 0; i < len; ++i) put(i, initial_.draw(eng));
            break;
        case 1: {
            std::uint32_t x = initial_.draw(eng);
            put(0, x);
            for (std::size_t i = 1; i < len; ++i) put(i, x = rows_[x].draw(eng));
            break;
        }
        case 2: {
            const auto& q = std::get<QuasiMarkovMeasure>(model_);
            const std::size_t B = q.hidden.size(), wl = q.left + q.right + 1;
            std::vector<std::uint32_t> h(len + wl - 1);
            h[0] = initial_.draw(eng);
            for (std::size_t i = 1; i < h.size(); ++i) h[i] = rows_[h[i - 1]].draw(eng);
            for (std::size_t i = 0; i < len; ++i) {
                u64 code = 0;
                for (std::size_t t = 0; t < wl; ++t) code = code * B + h[i + t];
                put(i, q.psi[code]);
            }
            break;
        }
        default: {
            std::vector<i64> all(len);
            std::iota(all.begin(), all.end(), a);
            w.data = draw_irdi(all, eng);
        }
    }
    return w;
}

std::vector<std::uint32_t> Sampler::draw_irdi(const std::vector<i64>& sites, std::mt19937_64& eng) const {
    const auto& ir = std::get<IrdiMeasure>(model_);
    const u64 msk = ir.nmax >= 64 ? ~u64{0} : ((u64{1} << ir.nmax) - 1);
    const u64 k = irdi_k_ ? *irdi_k_ : (eng() & msk);
    // (term, site) pairs sorted by term; each distinct term is drawn once, in term order
    std::vector<std::pair<IrdiTerm, std::uint32_t>> terms;
    terms.reserve(sites.size() * 8);
    for (std::size_t i = 0; i < sites.size(); ++i) {
        u64 M = (k + static_cast<u64>(sites[i])) & msk;
        for (unsigned n = 0; M >> n; ++n)
            if ((M >> n) & 1u) terms.push_back({IrdiTerm{n, M & ((u64{1} << n) - 1)}, static_cast<std::uint32_t>(i)});
    }
    std::sort(terms.begin(), terms.end());
    std::vector<double> q(ir.nmax, 1.0);
    for (unsigned n = 1; n < ir.nmax; ++n) q[n] = q[n - 1] * ir.alpha;
    std::vector<std::uint32_t> out(sites.size(), 0u);
    for (std::size_t t = 0; t < terms.size();) {
        const IrdiTerm cur = terms[t].first;
        const bool v = cur.level == 0 || uniform01(eng) < q[cur.level];
        for (; t < terms.size() && terms[t].first == cur; ++t)
            if (v) out[terms[t].second] ^= 1u;
    }
    return out;
}

std::vector<std::uint32_t> Sampler::draw_sites(const std::vector<i64>& sites, std::mt19937_64& eng) const {
    if (sites.empty()) return {};
    if (std::holds_alternative<IrdiMeasure>(model_)) return draw_irdi(sites, eng);
    auto [lo, hi] = std::minmax_element(sites.begin(), sites.end());
    Window w = draw(*lo, *hi + 1, eng);
    const unsigned s = alphabet_.s;
    std::vector<std::uint32_t> out;
    out.reserve(sites.size() * s);
    for (i64 x : sites) out.insert(out.end(), w.site(x), w.site(x) + s);
    return out;
}

}  // namespace lcarand
