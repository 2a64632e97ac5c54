#include "lcarand/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "lcarand/errors.hpp"

namespace lcarand {

std::size_t Alphabet::size() const {
    u64 n = ipow(p, s);
    if (n > (u64{1} << 20)) throw ResourceError("alphabet (Z/p)^s too large");
    return static_cast<std::size_t>(n);
}

FreqVec Alphabet::decode(std::uint32_t symbol) const {
    FreqVec v(s);
    for (unsigned i = 0; i < s; ++i) {
        v[i] = static_cast<std::uint32_t>(symbol % p);
        symbol = static_cast<std::uint32_t>(symbol / p);
    }
    return v;
}

std::uint32_t Alphabet::encode(const FreqVec& v) const {
    u64 x = 0;
    for (unsigned i = s; i-- > 0;) x = x * p + v[i] % p;
    return static_cast<std::uint32_t>(x);
}

std::vector<double> stationary_vector(const Eigen::MatrixXd& Q) {
    const Eigen::Index n = Q.rows();
    // pi (Q - I) = 0 with sum pi = 1, as a stacked least-squares system
    Eigen::MatrixXd A(n + 1, n);
    A.topRows(n) = Q.transpose() - Eigen::MatrixXd::Identity(n, n);
    A.row(n).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::VectorXd x = A.colPivHouseholderQr().solve(rhs);
    auto residual = [&](const Eigen::VectorXd& v) {
        return (v.transpose() * Q - v.transpose()).cwiseAbs().maxCoeff();
    };
    bool ok = x.minCoeff() > -1e-12 && std::abs(x.sum() - 1.0) < 1e-12 && residual(x) <= 1e-13;
    if (!ok) {
        // lazy chain (I + Q) / 2 is aperiodic with the same stationary vectors
        Eigen::MatrixXd L = 0.5 * (Eigen::MatrixXd::Identity(n, n) + Q);
        Eigen::RowVectorXd v = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
        for (int it = 0; it < 1000000; ++it) {
            Eigen::RowVectorXd w = v * L;
            w /= w.sum();
            double d = (w - v).cwiseAbs().maxCoeff();
            v = w;
            if (d < 1e-16 && (v * Q - v).cwiseAbs().maxCoeff() <= 1e-13) break;
        }
        x = v.transpose();
    }
    std::vector<double> pi(n);
    for (Eigen::Index i = 0; i < n; ++i) pi[i] = std::max(0.0, x(i));
    double t = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (auto& v : pi) v /= t;
    return pi;
}

FiniteChain make_chain(const Eigen::MatrixXd& Q, std::optional<std::vector<double>> pi) {
    if (Q.rows() == 0 || Q.rows() != Q.cols()) throw std::invalid_argument("transition matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < Q.rows(); ++i) {
        if ((Q.row(i).array() < 0).any()) throw std::invalid_argument("negative transition probability");
        if (std::abs(Q.row(i).sum() - 1.0) > 1e-12)
            throw std::invalid_argument("row " + std::to_string(i) + " of Q does not sum to 1");
    }
    FiniteChain c;
    c.Q = Q;
    if (pi) {
        if (static_cast<Eigen::Index>(pi->size()) != Q.rows()) throw std::invalid_argument("pi has wrong length");
        Eigen::RowVectorXd v = Eigen::Map<const Eigen::RowVectorXd>(pi->data(), Q.rows());
        if ((v.array() < 0).any() || std::abs(v.sum() - 1.0) > 1e-10 || (v * Q - v).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("supplied pi is not stationary for Q");
        c.pi = *pi;
    } else {
        c.pi = stationary_vector(Q);
    }
    return c;
}

u64 model_p(const MeasureModel& m) {
    return std::visit([](const auto& x) -> u64 {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, IrdiMeasure>)
            return 2;
        else
            return x.p;
    }, m);
}

unsigned model_s(const MeasureModel& m) {
    return std::visit([](const auto& x) -> unsigned {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, IrdiMeasure>)
            return 1;
        else
            return x.s;
    }, m);
}

std::string model_kind(const MeasureModel& m) {
    static const char* names[] = {"bernoulli", "markov", "quasi", "irdi"};
    return names[m.index()];
}

BernoulliMeasure bernoulli_uniform(u64 p, unsigned s) {
    Alphabet A{p, s};
    std::size_t n = A.size();
    return BernoulliMeasure{p, s, std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

BernoulliMeasure point_mass_zero(u64 p, unsigned s) {
    Alphabet A{p, s};
    std::vector<double> w(A.size(), 0.0);
    w[0] = 1.0;
    return BernoulliMeasure{p, s, w};
}

MarkovMeasure markov_measure(u64 p, unsigned s, const Eigen::MatrixXd& Q) {
    require_prime(p);
    if (static_cast<std::size_t>(Q.rows()) != Alphabet{p, s}.size())
        throw std::invalid_argument("Q must be indexed by the alphabet (Z/p)^s");
    return MarkovMeasure{p, s, make_chain(Q)};
}

QuasiMarkovMeasure even_shift() {
    Eigen::MatrixXd P(3, 3);
    P << 0.5, 0.0, 0.5,
         0.5, 0.0, 0.5,
         0.0, 1.0, 0.0;
    return QuasiMarkovMeasure{2, 1, make_chain(P), 0, 0, {0, 1, 1}};
}

MarkovMeasure mrf_demo_chain() {
    Eigen::MatrixXd Q(2, 2);
    Q << 2.0 / 3.0, 1.0 / 3.0,
         1.0 / 3.0, 2.0 / 3.0;
    return markov_measure(2, 1, Q);
}

void validate(const MeasureModel& m) {
    std::visit([](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IrdiMeasure>) {
            if (!(x.alpha > 0.0 && x.alpha < 1.0)) throw std::invalid_argument("IRDI alpha must lie in (0,1)");
            if (x.nmax < 1 || x.nmax > 200) throw std::invalid_argument("IRDI nmax must lie in [1,200]");
        } else {
            require_prime(x.p);
            const std::size_t n = Alphabet{x.p, x.s}.size();
            if constexpr (std::is_same_v<T, BernoulliMeasure>) {
                if (x.weights.size() != n) throw std::invalid_argument("Bernoulli weights must cover the alphabet");
                double t = 0;
                for (double w : x.weights) {
                    if (w < 0) throw std::invalid_argument("negative Bernoulli weight");
                    t += w;
                }
                if (std::abs(t - 1.0) > 1e-12) throw std::invalid_argument("Bernoulli weights must sum to 1");
            } else if constexpr (std::is_same_v<T, MarkovMeasure>) {
                if (x.chain.size() != n) throw std::invalid_argument("Markov chain must be indexed by the alphabet");
            } else {
                u64 w = ipow(x.hidden.size(), x.left + x.right + 1);
                if (x.psi.size() != w) throw std::invalid_argument("psi must have |B|^(left+right+1) entries");
                for (auto a : x.psi)
                    if (a >= n) throw std::invalid_argument("psi maps outside the alphabet");
            }
        }
    }, m);
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Exact: return "exact";
        case Provenance::MonteCarlo: return "monte-carlo";
        case Provenance::TruncatedExact: return "truncated-exact";
    }
    return "?";
}

// ---- transfer products ----

TransferChain::TransferChain(const FiniteChain& chain, std::vector<std::uint32_t> emit, Alphabet alphabet)
    : alphabet_(alphabet), pi_(chain.pi), emit_(std::move(emit)) {
    const std::size_t n = chain.size();
    if (n == 0) return;  // sparse lift: rows are filled by the caller
    rows_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (chain.Q(i, j) > 0) rows_[i].emplace_back(static_cast<std::uint32_t>(j), chain.Q(i, j));
    if (n <= kDenseLimit) {
        pow2_.push_back(chain.Q);
        for (int i = 1; i < 40; ++i) pow2_.push_back(pow2_.back() * pow2_.back());
    }
}

TransferChain TransferChain::from(const MarkovMeasure& m) {
    std::vector<std::uint32_t> emit(m.chain.size());
    std::iota(emit.begin(), emit.end(), 0u);
    return TransferChain(m.chain, std::move(emit), Alphabet{m.p, m.s});
}

TransferChain TransferChain::from(const QuasiMarkovMeasure& m, std::size_t state_cap) {
    validate(MeasureModel{m});
    const std::size_t B = m.hidden.size();
    const unsigned w = m.left + m.right + 1;
    if (w == 1) return TransferChain(m.hidden, m.psi, Alphabet{m.p, m.s});
    // admissible windows, enumerated by extension from each positive-mass symbol
    std::vector<std::vector<std::uint32_t>> frontier;
    for (std::size_t b = 0; b < B; ++b)
        if (m.hidden.pi[b] > 0) frontier.push_back({static_cast<std::uint32_t>(b)});
    for (unsigned len = 1; len < w; ++len) {
        std::vector<std::vector<std::uint32_t>> next;
        for (const auto& word : frontier)
            for (std::size_t b = 0; b < B; ++b)
                if (m.hidden.Q(word.back(), b) > 0) {
                    next.push_back(word);
                    next.back().push_back(static_cast<std::uint32_t>(b));
                    if (next.size() > state_cap)
                        throw ResourceError("quasi-Markov window lift exceeds " + std::to_string(state_cap) +
                                            " states; use Monte Carlo");
                }
        frontier.swap(next);
    }
    const std::size_t n = frontier.size();
    auto code = [B](const std::uint32_t* w0, unsigned len) {
        u64 c = 0;
        for (unsigned i = 0; i < len; ++i) c = c * B + w0[i];
        return c;
    };
    std::unordered_map<u64, std::uint32_t> index;
    index.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) index.emplace(code(frontier[i].data(), w), static_cast<std::uint32_t>(i));
    FiniteChain lift;
    std::vector<std::uint32_t> emit(n);
    lift.pi.resize(n);
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& word = frontier[i];
        double pr = m.hidden.pi[word[0]];
        for (unsigned t = 1; t < w; ++t) pr *= m.hidden.Q(word[t - 1], word[t]);
        lift.pi[i] = pr;
        emit[i] = m.psi[code(word.data(), w)];
        u64 tail = code(word.data() + 1, w - 1);
        for (std::size_t b = 0; b < B; ++b) {
            double q = m.hidden.Q(word.back(), b);
            if (q <= 0) continue;
            auto it = index.find(tail * B + b);
            if (it != index.end()) rows[i].emplace_back(it->second, q);
        }
    }
    if (n <= kDenseLimit) {
        lift.Q = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (auto [j, q] : rows[i]) lift.Q(i, j) = q;
        return TransferChain(lift, std::move(emit), Alphabet{m.p, m.s});
    }
    TransferChain tc(FiniteChain{Eigen::MatrixXd(0, 0), lift.pi}, std::move(emit), Alphabet{m.p, m.s});
    tc.rows_ = std::move(rows);
    return tc;
}

void TransferChain::advance(Eigen::RowVectorXd& v, u64 steps) const {
    if (!pow2_.empty()) {
        for (unsigned i = 0; steps; ++i, steps >>= 1)
            if (steps & 1) v = v * pow2_.at(i);
        return;
    }
    Eigen::RowVectorXd w(v.size());
    for (u64 t = 0; t < steps; ++t) {
        w.setZero();
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            double x = v(i);
            if (x == 0) continue;
            for (auto [j, q] : rows_[i]) w(j) += x * q;
        }
        v.swap(w);
    }
}

std::complex<double> TransferChain::expectation(const Character& chi) const {
    if (chi.p() != alphabet_.p || chi.s() != alphabet_.s) throw std::invalid_argument("character does not match the alphabet");
    if (chi.trivial()) return {1.0, 0.0};
    const std::size_t n = size();
    const u64 p = alphabet_.p;
    const std::size_t A = alphabet_.size();
    std::vector<FreqVec> sym(A);
    for (std::size_t a = 0; a < A; ++a) sym[a] = alphabet_.decode(static_cast<std::uint32_t>(a));
    std::vector<std::complex<double>> roots(p);
    for (u64 t = 0; t < p; ++t) roots[t] = root_of_unity(p, t);
    Eigen::RowVectorXd re = Eigen::Map<const Eigen::RowVectorXd>(pi_.data(), n), im = Eigen::RowVectorXd::Zero(n);
    std::vector<std::complex<double>> diag(A);
    i64 prev = 0;
    bool first = true;
    for (const auto& [k, u] : chi.freqs()) {
        if (!first) {
            advance(re, static_cast<u64>(k - prev));
            if (p > 2) advance(im, static_cast<u64>(k - prev));
        }
        first = false;
        prev = k;
        for (std::size_t a = 0; a < A; ++a) {
            u64 t = 0;
            for (unsigned i = 0; i < alphabet_.s; ++i) t += (u64)u[i] * sym[a][i];
            diag[a] = roots[t % p];
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<double> z = std::complex<double>(re(i), im(i)) * diag[emit_[i]];
            re(i) = z.real();
            im(i) = z.imag();
        }
    }
    return {re.sum(), im.sum()};
}

double TransferChain::word_probability(const std::vector<std::uint32_t>& word) const {
    const std::size_t n = size();
    Eigen::RowVectorXd v = Eigen::Map<const Eigen::RowVectorXd>(pi_.data(), n);
    for (std::size_t t = 0; t < word.size(); ++t) {
        if (t) advance(v, 1);
        for (std::size_t i = 0; i < n; ++i)
            if (emit_[i] != word[t]) v(i) = 0;
    }
    return v.sum();
}

std::complex<double> char_expectation_bernoulli(const BernoulliMeasure& m, const Character& chi) {
    Alphabet A{m.p, m.s};
    std::complex<double> r{1.0, 0.0};
    for (const auto& [k, u] : chi.freqs()) {
        std::complex<double> z{0.0, 0.0};
        for (std::size_t a = 0; a < m.weights.size(); ++a) {
            if (m.weights[a] == 0) continue;
            FreqVec x = A.decode(static_cast<std::uint32_t>(a));
            u64 t = 0;
            for (unsigned i = 0; i < m.s; ++i) t += (u64)u[i] * x[i];
            z += m.weights[a] * root_of_unity(m.p, t % m.p);
        }
        r *= z;
    }
    return r;
}

SpectralValue char_expectation_markov(const MarkovMeasure& m, const Character& chi) {
    return SpectralValue{TransferChain::from(m).expectation(chi)};
}

SpectralValue char_expectation_quasi(const QuasiMarkovMeasure& m, const Character& chi, std::size_t state_cap) {
    return SpectralValue{TransferChain::from(m, state_cap).expectation(chi)};
}

SpectralValue char_expectation_irdi(const IrdiMeasure& m, const Character& chi, double tolerance) {
    if (chi.p() != 2 || chi.s() != 1) throw std::invalid_argument("IRDI measures live on (Z/2)^Z");
    validate(MeasureModel{m});
    SpectralValue v;
    v.provenance = Provenance::TruncatedExact;
    if (chi.trivial()) {
        v.value = 1.0;
        return v;
    }
    const u64 span = diam(chi) + 1;
    v.error_bound = irdi_truncation_bound(m.alpha, span, m.nmax);
    if (tolerance > 0 && v.error_bound > tolerance) {
        std::ostringstream os;
        os << "IRDI truncation bound " << v.error_bound << " exceeds tolerance " << tolerance
           << "; suggested nmax = " << suggest_nmax(m.alpha, span, tolerance);
        throw ResourceError(os.str());
    }
    v.value = irdi_parity_average(m.alpha, chi.sites(), m.nmax);
    return v;
}

SpectralValue char_expectation(const MeasureModel& m, const Character& chi, const ExactOptions& opt) {
    return ExactBackend(m, opt).expectation(chi);
}

ExactBackend::ExactBackend(const MeasureModel& m, const ExactOptions& opt) : model_(m), opt_(opt) {
    validate(m);
    if (auto* mk = std::get_if<MarkovMeasure>(&m)) chain_.emplace(TransferChain::from(*mk));
    if (auto* q = std::get_if<QuasiMarkovMeasure>(&m)) chain_.emplace(TransferChain::from(*q, opt.state_cap));
}

SpectralValue ExactBackend::expectation(const Character& chi) const {
    if (chi.p() != model_p(model_) || chi.s() != model_s(model_))
        throw std::invalid_argument("character does not match the model alphabet");
    if (chain_) return SpectralValue{chain_->expectation(chi)};
    if (auto* b = std::get_if<BernoulliMeasure>(&model_)) return SpectralValue{char_expectation_bernoulli(*b, chi)};
    return char_expectation_irdi(std::get<IrdiMeasure>(model_), chi, opt_.irdi_tolerance);
}

}  // namespace lcarand
