// lcarand: command-line front end for the randomization lab.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "lcarand/errors.hpp"
#include "lcarand/model_io.hpp"
#include "lcarand/randomlab.hpp"
#include "lcarand/rng.hpp"

using namespace lcarand;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "lcarand 0.1.0";

struct Table {
    std::string suffix;  // empty for the main table
    std::string header;
    std::vector<std::string> rows;
};

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

template <class... T>
std::string csv(const T&... xs) {
    std::ostringstream os;
    bool first = true;
    ((os << (first ? "" : ",") << xs, first = false), ...);
    return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string now_utc() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string table_path(const std::string& out, const std::string& suffix) {
    if (suffix.empty()) return out;
    auto dot = out.rfind('.');
    auto slash = out.rfind('/');
    std::string stem = (dot == std::string::npos || (slash != std::string::npos && dot < slash)) ? out : out.substr(0, dot);
    return stem + "." + suffix + ".csv";
}

// The manifest digest covers command, parameters, seed and version only.
void emit(const std::string& out, const std::string& command, const json& params, std::uint64_t seed,
          const std::vector<std::string>& args, const std::vector<Table>& tables) {
    json core = {{"command", command}, {"params", params}, {"seed", seed}, {"version", kVersion}};
    const std::string digest = hex(fnv1a(core.dump()));
    json manifest = core;
    manifest["digest"] = digest;
    manifest["args"] = args;
    manifest["wall_clock"] = now_utc();
    json files = json::array();
    for (const auto& t : tables) {
        std::ostringstream os;
        os << "# manifest " << digest << "\n" << t.header << "\n";
        for (const auto& r : t.rows) os << r << "\n";
        if (out.empty()) {
            std::cout << os.str();
        } else {
            const std::string path = table_path(out, t.suffix);
            std::ofstream f(path, std::ios::binary);
            if (!f) throw std::invalid_argument("cannot write " + path);
            f << os.str();
            files.push_back(path);
        }
    }
    if (!out.empty()) {
        manifest["files"] = files;
        std::ofstream f(out + ".manifest.json", std::ios::binary);
        f << manifest.dump(2) << "\n";
    }
}

json collect_params(const CLI::App* sub) {
    json p = json::object();
    for (const CLI::Option* o : sub->get_options()) {
        const std::string name = o->get_name(false, true);
        if (name.empty() || name.find("--help") != std::string::npos) continue;
        if (o->count() > 0) {
            auto r = o->results();
            p[name] = r.size() == 1 ? json(r[0]) : json(r);
        } else {
            p[name] = o->get_default_str();
        }
    }
    return p;
}

Character parse_chi(const std::string& text, u64 p, unsigned s) {
    // shorthand "parity@0,3": frequency 1 on each listed site (s = 1 only)
    if (text.rfind("parity@", 0) == 0) {
        if (s != 1) throw std::invalid_argument("parity@ shorthand needs s = 1");
        std::vector<i64> sites;
        std::stringstream ss(text.substr(7));
        std::string tok;
        std::size_t pos = 7;
        while (std::getline(ss, tok, ',')) {
            try {
                std::size_t used = 0;
                sites.push_back(std::stoll(tok, &used));
                if (used != tok.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ParseError("bad site '" + tok + "' in character", pos);
            }
            pos += tok.size() + 1;
        }
        if (sites.empty()) throw ParseError("parity@ needs at least one site", 7);
        return Character::on_sites(p, sites);
    }
    return parse_character(text, p, s);
}

struct Common {
    u64 p = 2;
    unsigned s = 1;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
};

struct ModelArgs {
    std::string file, preset_name;

    void add(CLI::App* c) {
        c->add_option("--model", file, "model file ([markov], [bernoulli], [quasi], [irdi])");
        c->add_option("--preset", preset_name, "bundled model: even-shift, bernoulli, zero, mrf-demo, irdi");
    }
    MeasureModel load(u64 p) const {
        if (!file.empty() && !preset_name.empty()) throw std::invalid_argument("give --model or --preset, not both");
        if (!file.empty()) return load_model(file);
        if (!preset_name.empty()) return preset(preset_name, p);
        throw std::invalid_argument("a model is required (--model FILE or --preset NAME)");
    }
};

struct TrajArgs {
    std::string method = "auto";
    std::uint64_t samples = 20000;
    double tol = -1.0;
    std::size_t state_cap = 200000;

    void add(CLI::App* c) {
        c->add_option("--method", method, "auto | exact | mc")->capture_default_str();
        c->add_option("--samples", samples, "Monte Carlo samples per index")->capture_default_str();
        c->add_option("--tol", tol, "IRDI truncation tolerance; refuse when exceeded (<= 0: report only)")
            ->capture_default_str();
        c->add_option("--state-cap", state_cap, "quasi-Markov lift state cap")->capture_default_str();
    }
    TrajectoryOptions options(std::uint64_t seed) const {
        TrajectoryOptions o;
        o.method = parse_method(method);
        o.samples = samples;
        o.seed = seed;
        o.exact.irdi_tolerance = tol;
        o.exact.state_cap = state_cap;
        return o;
    }
};

Table trajectory_table(const SpectralTrajectory& t) {
    Table tb{"", "j,re,im,abs,method,stderr", {}};
    for (const auto& e : t.entries) {
        const auto& v = e.value;
        double se = v.provenance == Provenance::MonteCarlo ? std::hypot(v.stderr_re, v.stderr_im) : v.error_bound;
        tb.rows.push_back(csv(e.j, num(v.value.real()), num(v.value.imag()), num(std::abs(v.value)),
                              to_string(v.provenance), num(se)));
    }
    return tb;
}

Table density_table(const DensityReport& d, const std::string& suffix) {
    Table tb{suffix, "horizon,count,density", {}};
    for (const auto& [h, c] : d.counts) tb.rows.push_back(csv(h, c, num(static_cast<double>(c) / static_cast<double>(h))));
    return tb;
}

void report_backend(const SpectralTrajectory& t) {
    if (t.entries.empty()) return;
    std::cerr << "backend: " << to_string(t.entries.front().value.provenance) << "\n";
}

int run(const std::vector<std::string>& argv_in) {
    CLI::App app{"Linear cellular automata randomization lab", "lcarand"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    Common g;
    app.add_option("--p", g.p, "prime p")->capture_default_str();
    app.add_option("--s", g.s, "alphabet dimension s")->capture_default_str();
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "OpenMP threads (0: all cores)");
    app.add_option("--out", g.out, "CSV output path (stdout when absent)");

    // lucas
    auto* lucas = app.add_subcommand("lucas", "Lucas-theorem utilities");
    u64 l_set = 0, l_zb = 0, l_gaps = 0, l_inj = 0, l_s0 = 0, l_dens = 0;
    std::vector<u64> l_binom, l_split;
    lucas->add_option("--set", l_set, "print Lambda(N)");
    lucas->add_option("--binomial", l_binom, "binomial N n mod p")->expected(2);
    lucas->add_option("--split", l_split, "split N r: (N mod p^r, N / p^r)")->expected(2);
    lucas->add_option("--zeroblocks", l_zb, "zero blocks of the p-ary digits of N");
    lucas->add_option("--gaps", l_gaps, "gaps in Lambda(N)");
    lucas->add_option("--inJ", l_inj, "membership of N in J(S0)");
    lucas->add_option("--s0", l_s0, "S0 for --inJ and --density")->capture_default_str();
    lucas->add_option("--density", l_dens, "Cesaro density report of J(S0) up to a horizon");

    // lca
    auto* lca = app.add_subcommand("lca", "LCA algebra: power, classify, srank");
    std::string a_phi;
    u64 a_power = 1, a_srank = 0, a_split = 0, a_s0 = 0;
    bool a_classify = false;
    lca->add_option("--phi", a_phi, "LCA polynomial, e.g. 1+x^5+x^6")->required();
    auto* o_power = lca->add_option("--power", a_power, "exponent N");
    lca->add_flag("--classify", a_classify, "bipartite classification");
    lca->add_option("--srank", a_srank, "S-rank of Phi^N with this S");
    lca->add_option("--split", a_split, "Lucas power split of Phi^N for this N (needs --s0)");
    lca->add_option("--s0", a_s0, "S0 for --split");

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "trajectory of <chi o Phi^j, mu>");
    ModelArgs sp_model;
    TrajArgs sp_traj;
    std::string sp_lca, sp_chi;
    u64 sp_jmax = 256;
    double sp_eps = 0;
    sp_model.add(spectrum);
    sp_traj.add(spectrum);
    spectrum->add_option("--lca", sp_lca, "LCA polynomial")->required();
    spectrum->add_option("--chi", sp_chi, "character: 'sites=0,1 freqs=1,1' or 'parity@0,1'")->required();
    spectrum->add_option("--jmax", sp_jmax, "last index j")->capture_default_str();
    spectrum->add_option("--eps", sp_eps, "also write a Cesaro density report for |value| < eps");

    // lucasmix
    auto* lucasmix = app.add_subcommand("lucasmix", "Lucas-mixing trajectory <chi^[h], mu>");
    ModelArgs lm_model;
    TrajArgs lm_traj;
    std::string lm_chi;
    u64 lm_hmin = 0, lm_hmax = 64;
    bool lm_hstyle = false;
    double lm_eps_h = 0.25;
    lm_model.add(lucasmix);
    lm_traj.add(lucasmix);
    lucasmix->add_option("--chi", lm_chi, "character")->required();
    lucasmix->add_option("--hmin", lm_hmin, "first h")->capture_default_str();
    lucasmix->add_option("--hmax", lm_hmax, "last h")->capture_default_str();
    lucasmix->add_flag("--hstyle", lm_hstyle, "keep only h with popcount(h) >= ceil(log2 h)/2 - eps");
    lucasmix->add_option("--hstyle-eps", lm_eps_h, "eps for --hstyle")->capture_default_str();

    // dispersion
    auto* dispersion = app.add_subcommand("dispersion", "S-rank trajectory of chi o Phi^j");
    std::string d_lca, d_chi, d_ladder = "1,2,4,8,16";
    u64 d_S = 1, d_jmax = 1024;
    dispersion->add_option("--lca", d_lca, "LCA polynomial")->required();
    dispersion->add_option("--chi", d_chi, "character")->required();
    dispersion->add_option("--S", d_S, "separation S")->capture_default_str();
    dispersion->add_option("--jmax", d_jmax, "last index j")->capture_default_str();
    dispersion->add_option("--ladder", d_ladder, "rank thresholds R")->capture_default_str();

    // randomize
    auto* randomize = app.add_subcommand("randomize", "empirical total variation of w-windows under Phi^j");
    ModelArgs r_model;
    std::string r_lca;
    unsigned r_w = 4;
    u64 r_jmax = 64;
    std::uint64_t r_samples = 100000;
    r_model.add(randomize);
    randomize->add_option("--lca", r_lca, "LCA polynomial")->required();
    randomize->add_option("--w", r_w, "window width")->capture_default_str();
    randomize->add_option("--jmax", r_jmax, "last index j")->capture_default_str();
    randomize->add_option("--samples", r_samples, "sample paths")->capture_default_str();

    // entropy
    auto* entropy = app.add_subcommand("entropy", "block entropy per symbol");
    ModelArgs e_model;
    unsigned e_N = 10;
    e_model.add(entropy);
    entropy->add_option("--N", e_N, "largest block exponent (IRDI: blocks of 2^N sites)")->capture_default_str();

    // demo
    auto* demo = app.add_subcommand("demo", "worked examples: even-shift, mrf-bound, irdi");
    std::string demo_name;
    u64 dm_N = 200, dm_hmax = 1024;
    unsigned dm_K = 8, dm_span = 14, dm_levels = 10, dm_nmax = 24;
    double dm_alpha = 0.8, dm_tol = 1e-3;
    demo->add_option("name", demo_name, "even-shift | mrf-bound | irdi")->required();
    demo->add_option("--N", dm_N, "even-shift: largest N")->capture_default_str();
    demo->add_option("--K", dm_K, "mrf-bound: largest rank")->capture_default_str();
    demo->add_option("--span", dm_span, "mrf-bound: largest span")->capture_default_str();
    demo->add_option("--alpha", dm_alpha, "irdi: alpha")->capture_default_str();
    demo->add_option("--nmax", dm_nmax, "irdi: truncation depth for the entropy profile")->capture_default_str();
    demo->add_option("--levels", dm_levels, "irdi: entropy profile levels")->capture_default_str();
    demo->add_option("--hmax", dm_hmax, "irdi: largest dilation h")->capture_default_str();
    demo->add_option("--tol", dm_tol, "irdi: truncation tolerance for the Lucas-mixing values")->capture_default_str();

    // replay
    auto* replay = app.add_subcommand("replay", "re-run a saved manifest");
    std::string rp_manifest;
    replay->add_option("--manifest", rp_manifest, "manifest JSON")->required()->check(CLI::ExistingFile);

    std::vector<const char*> cargv;
    cargv.push_back("lcarand");
    for (const auto& a : argv_in) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (g.threads > 0) set_threads(g.threads);
    // arguments that do not change results are left out of the manifest
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < argv_in.size(); ++i) {
        const auto& a = argv_in[i];
        if (a == "--out" || a == "--threads") {
            ++i;
            continue;
        }
        if (a.rfind("--out=", 0) == 0 || a.rfind("--threads=", 0) == 0) continue;
        kept.push_back(a);
    }
    CLI::App* sub = app.get_subcommands().front();
    json params = collect_params(sub);
    params["--p"] = std::to_string(g.p);
    params["--s"] = std::to_string(g.s);
    auto finish = [&](const std::vector<Table>& tables) {
        emit(g.out, sub->get_name(), params, g.seed, kept, tables);
        return 0;
    };

    if (sub == lucas) {
        require_prime(g.p);
        if (lucas->count("--set")) {
            auto L = lucas_set(l_set, g.p);
            for (std::size_t i = 0; i < L.elements.size(); ++i) std::cout << (i ? "," : "") << L.elements[i];
            std::cout << "\n";
        } else if (lucas->count("--binomial")) {
            if (l_binom[1] > l_binom[0]) std::cout << 0 << "\n";
            else std::cout << lucas_binomial(l_binom[0], l_binom[1], g.p) << "\n";
        } else if (lucas->count("--split")) {
            auto [lo, hi] = lucas_decompose(l_split[0], static_cast<unsigned>(l_split[1]), g.p);
            std::cout << lo << "," << hi << "\n";
        } else if (lucas->count("--zeroblocks")) {
            auto zb = zero_blocks(l_zb, g.p);
            std::cout << zb.size();
            for (auto [i, k] : zb) std::cout << " (" << i << "," << k << ")";
            std::cout << "\n";
        } else if (lucas->count("--gaps")) {
            auto gp = gaps_in_lucas_set(l_gaps, g.p);
            std::cout << gp.size();
            for (auto [a, b] : gp) std::cout << " (" << a << "," << b << ")";
            std::cout << "\n";
        } else if (lucas->count("--inJ")) {
            std::cout << (in_J(l_inj, l_s0, g.p) ? "true" : "false") << "\n";
        } else if (lucas->count("--density")) {
            auto d = cesaro_density([&](u64 n) { return in_J(n, l_s0, g.p); }, l_dens);
            return finish({density_table(d, "")});
        } else {
            throw std::invalid_argument("lucas needs one of --set, --binomial, --split, --zeroblocks, --gaps, --inJ, --density");
        }
        return 0;
    }

    if (sub == lca) {
        LcaPolynomial phi = parse_lca(a_phi, g.p);
        if (a_classify) {
            if (auto bf = classify_bipartite(phi))
                std::cout << "bipartite f=" << bf->f << " gamma=" << bf->gamma.to_string() << "\n";
            else
                std::cout << "not bipartite\n";
        } else if (lca->count("--split")) {
            auto bf = classify_bipartite(phi);
            if (!bf) throw std::invalid_argument("--split needs a bipartite LCA");
            auto ps = lucas_power_split(*bf, a_split, a_s0);
            std::cout << "M=" << ps.M << " r=" << ps.r << " H=" << ps.H << "\n";
        } else if (lca->count("--srank")) {
            std::cout << s_rank(power_fast(phi, a_power), a_srank) << "\n";
        } else if (o_power->count()) {
            std::cout << power_fast(phi, a_power).to_string() << "\n";
        } else {
            throw std::invalid_argument("lca needs --power, --classify, --srank or --split");
        }
        return 0;
    }

    if (sub == spectrum) {
        MeasureModel mu = sp_model.load(g.p);
        const u64 p = model_p(mu);
        LcaPolynomial phi = parse_lca(sp_lca, p);
        Character chi = parse_chi(sp_chi, p, model_s(mu));
        auto t = spectral_trajectory(mu, phi, chi, sp_jmax, sp_traj.options(g.seed));
        report_backend(t);
        std::vector<Table> tables{trajectory_table(t)};
        if (sp_eps > 0) {
            auto v = cesaro_report(t, sp_eps);
            std::cerr << "density of |value| < " << sp_eps << ": " << v.density_below.final_density
                      << (v.passed ? " (>= 0.9)" : " (< 0.9)") << "\n";
            tables.push_back(density_table(v.density_below, "density"));
        }
        return finish(tables);
    }

    if (sub == lucasmix) {
        MeasureModel mu = lm_model.load(g.p);
        Character chi = parse_chi(lm_chi, model_p(mu), model_s(mu));
        std::vector<u64> hs;
        for (u64 h = lm_hmin; h <= lm_hmax; ++h)
            if (!lm_hstyle || in_H_style(h, lm_eps_h)) hs.push_back(h);
        auto t = lucas_mixing_at(mu, chi, hs, lm_traj.options(g.seed));
        report_backend(t);
        return finish({trajectory_table(t)});
    }

    if (sub == dispersion) {
        LcaPolynomial phi = parse_lca(d_lca, g.p);
        Character chi = parse_chi(d_chi, g.p, g.s);
        std::vector<unsigned> ladder;
        std::stringstream ss(d_ladder);
        for (std::string tok; std::getline(ss, tok, ',');) ladder.push_back(static_cast<unsigned>(std::stoul(tok)));
        auto r = dispersion_trajectory(phi, chi, d_S, d_jmax, ladder);
        Table ranks{"", "j,srank", {}};
        for (auto [j, k] : r.ranks) ranks.rows.push_back(csv(j, k));
        Table dens{"density", "R,horizon,count,density", {}};
        for (const auto& [R, d] : r.ladder)
            for (const auto& [h, c] : d.counts) dens.rows.push_back(csv(R, h, c, num(static_cast<double>(c) / h)));
        return finish({ranks, dens});
    }

    if (sub == randomize) {
        MeasureModel mu = r_model.load(g.p);
        LcaPolynomial phi = parse_lca(r_lca, model_p(mu));
        auto rows = empirical_randomization(mu, phi, r_w, r_jmax, r_samples, g.seed);
        Table tb{"", "j,tv,cesaro_tv,noise_floor", {}};
        for (const auto& r : rows) tb.rows.push_back(csv(r.j, num(r.tv), num(r.cesaro_tv), num(r.noise_floor)));
        return finish({tb});
    }

    if (sub == entropy) {
        MeasureModel mu = e_model.load(g.p);
        if (auto* ir = std::get_if<IrdiMeasure>(&mu)) {
            Table tb{"", "N,profile,shape", {}};
            for (const auto& r : irdi_entropy_profile(*ir, e_N)) tb.rows.push_back(csv(r.N, num(r.profile), num(r.shape)));
            return finish({tb});
        }
        Table tb{"", "N,block_entropy,per_symbol", {}};
        for (unsigned N = 1; N <= e_N; ++N) {
            double h = block_entropy(mu, N);
            tb.rows.push_back(csv(N, num(h), num(h / N)));
        }
        return finish({tb});
    }

    if (sub == demo) {
        if (demo_name == "even-shift") {
            auto rows = even_shift_demo(dm_N);
            Table tb{"", "N,value,rank", {}};
            for (const auto& r : rows) tb.rows.push_back(csv(r.N, num(r.value), r.rank));
            std::cerr << "final value " << num(rows.back().value) << "; limit formula at the Perron vector "
                      << num(even_shift_limit(even_shift())) << "\n";
            return finish({tb});
        }
        if (demo_name == "mrf-bound") {
            auto mu = mrf_demo_chain();
            auto rows = mrf_hm_demo(mu, dm_K, dm_span);
            Table tb{"", "K,observed,bound,scanned", {}};
            for (const auto& r : rows) tb.rows.push_back(csv(r.K, num(r.observed), num(r.bound), r.scanned));
            std::cerr << "c = " << num(mrf_harmonic_constant(mu)) << "\n";
            return finish({tb});
        }
        if (demo_name == "irdi") {
            IrdiMeasure ent{dm_alpha, dm_nmax};
            Table prof{"", "N,profile,shape", {}};
            for (const auto& r : irdi_entropy_profile(ent, dm_levels)) prof.rows.push_back(csv(r.N, num(r.profile), num(r.shape)));
            // h = 2^k - 1 (full popcount) decays; h = 2^k (popcount 1) is the contrast
            Character chi = Character::single(2, 0);
            std::vector<u64> hs;
            for (u64 h = 2; h <= dm_hmax; h *= 2) {
                hs.push_back(h - 1);
                hs.push_back(h);
            }
            IrdiMeasure lm{dm_alpha, suggest_nmax(dm_alpha, dm_hmax + 1, dm_tol)};
            TrajectoryOptions o;
            o.method = Method::Exact;
            auto t = lucas_mixing_at(MeasureModel{lm}, chi, hs, o);
            Table tr = trajectory_table(t);
            tr.suffix = "lucasmix";
            std::cerr << "entropy profile nmax=" << dm_nmax << "; Lucas-mixing nmax=" << lm.nmax << "\n";
            return finish({prof, tr});
        }
        throw std::invalid_argument("unknown demo '" + demo_name + "' (even-shift | mrf-bound | irdi)");
    }

    if (sub == replay) {
        std::ifstream f(rp_manifest);
        json m = json::parse(f);
        std::vector<std::string> args = m.at("args").get<std::vector<std::string>>();
        if (!g.out.empty()) {
            args.push_back("--out");
            args.push_back(g.out);
        }
        return run(args);
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(args);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "invalid manifest: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
